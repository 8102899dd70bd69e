#include <doctest.h>

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "weedmap/dataset.hpp"

using namespace weedmap;

namespace {

ParcelFeatureVector row(const std::string& id, WeedClass label, double value) {
  ParcelFeatureVector r;
  r.parcel_id = id;
  r.label = label;
  r.schema = {"f0"};
  r.values = {value};
  return r;
}

Dataset dataset_with_counts(const ClassCounts& counts) {
  std::vector<ParcelFeatureVector> rows;
  std::size_t serial = 0;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    for (std::size_t i = 0; i < counts[c]; ++i) {
      rows.push_back(row("P" + std::to_string(serial),
                         static_cast<WeedClass>(c),
                         static_cast<double>(serial)));
      ++serial;
    }
  }
  return make_dataset(std::move(rows));
}

std::set<std::string> ids_of(const Dataset& data) {
  std::set<std::string> ids;
  for (const auto& r : data.rows) ids.insert(r.parcel_id);
  return ids;
}

}  // namespace

TEST_CASE("make_dataset counts classes and rejects unlabeled rows") {
  Dataset data = dataset_with_counts({3, 2, 1, 1});
  CHECK(data.size() == 7);
  CHECK(data.class_counts() == ClassCounts{3, 2, 1, 1});

  auto bad = row("X", WeedClass::Mowing, 0.0);
  bad.label.reset();
  CHECK_THROWS_AS(make_dataset({bad}), Error);

  auto off_schema = row("Y", WeedClass::Mowing, 0.0);
  off_schema.schema = {"g0"};
  CHECK_THROWS_AS(make_dataset({row("X", WeedClass::Mowing, 0.0), off_schema}),
                  Error);
}

TEST_CASE("test counts follow the rounding rule") {
  SplitSpec spec;
  spec.test_fraction = 0.2;
  CHECK(spec.test_count_for(141) == 28);
  CHECK(spec.test_count_for(33) == 7);
  CHECK(spec.test_count_for(31) == 6);
  CHECK(spec.test_count_for(27) == 5);
  CHECK(spec.test_count_for(2) == 1);

  SplitSpec tiny;
  tiny.test_fraction = 0.01;
  CHECK(tiny.test_count_for(10) == 1);  // round(0.1) clamps up to 1

  SplitSpec fat;
  fat.test_fraction = 0.99;
  CHECK(fat.test_count_for(10) == 9);  // round(9.9) clamps down to count-1
}

TEST_CASE("stratified split reserves the expected test supports") {
  Dataset data = dataset_with_counts({141, 33, 31, 27});
  SplitSpec spec;
  spec.test_fraction = 0.2;
  spec.seed = 9;
  SplitResult split = stratified_split(data, spec);
  CHECK(split.test.class_counts() == ClassCounts{28, 7, 6, 5});
  CHECK(split.train.class_counts() == ClassCounts{113, 26, 25, 22});
}

TEST_CASE("split partitions the dataset") {
  Dataset data = dataset_with_counts({141, 33, 31, 27});
  SplitSpec spec;
  spec.seed = 4;
  SplitResult split = stratified_split(data, spec);
  auto train_ids = ids_of(split.train);
  auto test_ids = ids_of(split.test);
  CHECK(train_ids.size() + test_ids.size() == data.size());
  std::set<std::string> overlap;
  std::set_intersection(train_ids.begin(), train_ids.end(), test_ids.begin(),
                        test_ids.end(), std::inserter(overlap, overlap.begin()));
  CHECK(overlap.empty());
  std::set<std::string> all = train_ids;
  all.insert(test_ids.begin(), test_ids.end());
  CHECK(all == ids_of(data));
}

TEST_CASE("single-class dataset of 10 rows splits 2/8") {
  Dataset data = dataset_with_counts({0, 10, 0, 0});
  SplitSpec spec;
  spec.seed = 1;
  SplitResult split = stratified_split(data, spec);
  CHECK(split.test.size() == 2);
  CHECK(split.train.size() == 8);
}

TEST_CASE("split is deterministic and seed sensitive") {
  Dataset data = dataset_with_counts({30, 10, 10, 10});
  SplitSpec spec;
  spec.seed = 77;
  SplitResult a = stratified_split(data, spec);
  SplitResult b = stratified_split(data, spec);
  CHECK(ids_of(a.test) == ids_of(b.test));
  CHECK(ids_of(a.train) == ids_of(b.train));

  bool any_differs = false;
  for (std::uint64_t seed : {1, 2, 3, 4, 5}) {
    SplitSpec other = spec;
    other.seed = seed;
    if (ids_of(stratified_split(data, other).test) != ids_of(a.test)) {
      any_differs = true;
    }
  }
  CHECK(any_differs);
}

TEST_CASE("split rejects classes with fewer than 2 rows") {
  Dataset data = dataset_with_counts({5, 1, 0, 0});
  SplitSpec spec;
  try {
    stratified_split(data, spec);
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ClassTooSmall);
  }
}

TEST_CASE("parcel-hash split keeps the same parcels in test across feature changes") {
  Dataset a = dataset_with_counts({30, 10, 10, 10});
  Dataset b = a;
  for (auto& r : b.rows) r.values[0] += 100.0;  // same parcels, other features
  std::reverse(b.rows.begin(), b.rows.end());

  SplitSpec spec;
  spec.seed = 5;
  spec.by_parcel_hash = true;
  CHECK(ids_of(stratified_split(a, spec).test) ==
        ids_of(stratified_split(b, spec).test));
}

TEST_CASE("undersample with fraction 0 is the identity") {
  Dataset data = dataset_with_counts({10, 4, 3, 3});
  Dataset out = undersample_majority(data, 0.0, 123);
  CHECK(out.size() == data.size());
  CHECK(ids_of(out) == ids_of(data));
}

TEST_CASE("undersample removes one of 141 mowing rows at 0.006") {
  Dataset data = dataset_with_counts({141, 33, 31, 27});
  Dataset out = undersample_majority(data, 0.006, 7);
  CHECK(out.class_counts() == ClassCounts{140, 33, 31, 27});
}

TEST_CASE("undersample never empties the majority class") {
  Dataset data = dataset_with_counts({141, 3, 3, 3});
  Dataset out = undersample_majority(data, 0.999, 7);
  CHECK(out.class_counts()[0] >= 1);
  CHECK(out.class_counts()[1] == 3);
  CHECK(out.class_counts()[2] == 3);
  CHECK(out.class_counts()[3] == 3);
}

TEST_CASE("undersample only touches the majority class") {
  Dataset data = dataset_with_counts({20, 8, 6, 5});
  Dataset out = undersample_majority(data, 0.25, 11);
  CHECK(out.class_counts() == ClassCounts{15, 8, 6, 5});
  auto kept = ids_of(out);
  for (const auto& r : data.rows) {
    if (r.label != WeedClass::Mowing) CHECK(kept.count(r.parcel_id) == 1);
  }
}

TEST_CASE("undersample is deterministic and validates the fraction") {
  Dataset data = dataset_with_counts({20, 8, 6, 5});
  CHECK(ids_of(undersample_majority(data, 0.25, 3)) ==
        ids_of(undersample_majority(data, 0.25, 3)));
  try {
    undersample_majority(data, 1.0, 3);
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::FractionOutOfRange);
  }
}

TEST_CASE("majority ties resolve to the lower ordinal") {
  Dataset data = dataset_with_counts({10, 10, 4, 4});
  Dataset out = undersample_majority(data, 0.2, 3);
  CHECK(out.class_counts() == ClassCounts{8, 10, 4, 4});
}
