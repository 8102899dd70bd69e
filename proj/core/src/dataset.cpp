#include "weedmap/dataset.hpp"

#include <algorithm>
#include <cmath>

#include "weedmap/rng.hpp"

namespace weedmap {

ClassCounts Dataset::class_counts() const {
  ClassCounts counts{};
  for (const auto& row : rows) {
    counts[static_cast<std::size_t>(*row.label)]++;
  }
  return counts;
}

Dataset make_dataset(std::vector<ParcelFeatureVector> rows) {
  Dataset data;
  if (rows.empty()) {
    return data;
  }
  data.schema = rows.front().schema;
  for (const auto& row : rows) {
    if (!row.label.has_value()) {
      throw Error(ErrorCode::EmptyInput,
                  "parcel " + row.parcel_id + " has no label; training rows must be labeled");
    }
    if (row.schema != data.schema) {
      throw Error(ErrorCode::SchemaMismatch,
                  "parcel " + row.parcel_id + " disagrees with dataset schema");
    }
  }
  data.rows = std::move(rows);
  return data;
}

std::size_t SplitSpec::test_count_for(std::size_t class_count) const {
  auto n = static_cast<std::size_t>(
      std::llround(test_fraction * static_cast<double>(class_count)));
  if (class_count >= 2) {
    n = std::clamp<std::size_t>(n, 1, class_count - 1);
  }
  return n;
}

SplitResult stratified_split(const Dataset& data, const SplitSpec& spec) {
  std::array<std::vector<std::size_t>, kNumClasses> per_class;
  for (std::size_t i = 0; i < data.rows.size(); ++i) {
    per_class[static_cast<std::size_t>(*data.rows[i].label)].push_back(i);
  }

  std::vector<bool> in_test(data.rows.size(), false);
  for (WeedClass cls : all_weed_classes()) {
    auto& indices = per_class[static_cast<std::size_t>(cls)];
    if (indices.empty()) continue;
    if (indices.size() < 2) {
      throw Error(ErrorCode::ClassTooSmall,
                  weed_class_name(cls) + " has " + std::to_string(indices.size()) +
                      " row(s); a stratified split needs at least 2 per class");
    }
    const std::size_t n_test = spec.test_count_for(indices.size());
    if (spec.by_parcel_hash) {
      // Rank by keyed hash of the parcel id: stable across row order and
      // across runs that share the parcel universe.
      std::stable_sort(indices.begin(), indices.end(),
                       [&](std::size_t a, std::size_t b) {
                         const auto ha = mix64(spec.seed ^
                                               fnv1a64(data.rows[a].parcel_id));
                         const auto hb = mix64(spec.seed ^
                                               fnv1a64(data.rows[b].parcel_id));
                         if (ha != hb) return ha < hb;
                         return data.rows[a].parcel_id < data.rows[b].parcel_id;
                       });
    } else {
      Rng rng(derive_seed(spec.seed, "stratified_split",
                          static_cast<std::uint64_t>(cls)));
      rng.shuffle(indices);
    }
    for (std::size_t k = 0; k < n_test; ++k) in_test[indices[k]] = true;
  }

  SplitResult result;
  result.train.schema = data.schema;
  result.test.schema = data.schema;
  for (std::size_t i = 0; i < data.rows.size(); ++i) {
    (in_test[i] ? result.test : result.train).rows.push_back(data.rows[i]);
  }
  return result;
}

Dataset undersample_majority(const Dataset& train, double fraction,
                             std::uint64_t seed) {
  if (!(fraction >= 0.0 && fraction < 1.0)) {
    throw Error(ErrorCode::FractionOutOfRange,
                "undersample fraction " + std::to_string(fraction) +
                    " not in [0, 1)");
  }
  const ClassCounts counts = train.class_counts();
  std::size_t majority = 0;
  for (std::size_t c = 1; c < kNumClasses; ++c) {
    if (counts[c] > counts[majority]) majority = c;
  }
  if (counts[majority] == 0) return train;

  std::size_t n_remove = static_cast<std::size_t>(
      std::llround(fraction * static_cast<double>(counts[majority])));
  n_remove = std::min(n_remove, counts[majority] - 1);
  if (n_remove == 0) return train;

  std::vector<std::size_t> majority_rows;
  for (std::size_t i = 0; i < train.rows.size(); ++i) {
    if (static_cast<std::size_t>(*train.rows[i].label) == majority) {
      majority_rows.push_back(i);
    }
  }
  Rng rng(derive_seed(seed, "undersample_majority"));
  const auto picks = rng.sample_without_replacement(majority_rows.size(), n_remove);
  std::vector<bool> drop(train.rows.size(), false);
  for (std::size_t pick : picks) drop[majority_rows[pick]] = true;

  Dataset out;
  out.schema = train.schema;
  out.rows.reserve(train.rows.size() - n_remove);
  for (std::size_t i = 0; i < train.rows.size(); ++i) {
    if (!drop[i]) out.rows.push_back(train.rows[i]);
  }
  return out;
}

}  // namespace weedmap
