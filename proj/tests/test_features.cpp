#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "weedmap/features.hpp"
#include "weedmap/rng.hpp"

using namespace weedmap;

namespace {

TimeSeries gridded(const TimeGrid& grid, const std::vector<double>& values) {
  TimeSeries s;
  s.dates = grid.dates();
  s.values = values;
  return s;
}

PixelFeatureVector pixel_with_values(const std::string& id,
                                     const std::vector<std::string>& schema,
                                     const std::vector<double>& values) {
  PixelFeatureVector p;
  p.pixel_id = id;
  p.schema = schema;
  p.values = values;
  return p;
}

}  // namespace

TEST_CASE("ndvi hand arithmetic") {
  CHECK(ndvi(0.5, 0.5) == 0.0);
  CHECK(ndvi(0.6, 0.2) == doctest::Approx(0.5));
  CHECK(ndvi(0.0, 0.0) == 0.0);
  CHECK_THROWS_AS(ndvi(std::numeric_limits<double>::quiet_NaN(), 0.2), Error);
}

TEST_CASE("ndvi stays inside [-1, 1] and is scale invariant") {
  Rng rng(3);
  for (int i = 0; i < 500; ++i) {
    double nir = rng.uniform(0.0, 2.0);
    double red = rng.uniform(0.0, 2.0);
    double v = ndvi(nir, red);
    CHECK(v >= -1.0);
    CHECK(v <= 1.0);
    double c = rng.uniform(0.1, 10.0);
    CHECK(ndvi(c * nir, c * red) == doctest::Approx(v).epsilon(1e-12));
  }
}

TEST_CASE("first difference examples") {
  TimeGrid grid = build_grid(make_date(2024, 5, 1), make_date(2024, 5, 21), 10);

  TimeSeries constant = gridded(grid, {1.0, 1.0, 1.0});
  TimeSeries d = first_difference(constant);
  REQUIRE(d.size() == 2);
  CHECK(d.values[0] == 0.0);
  CHECK(d.values[1] == 0.0);
  CHECK(d.dates[0] == grid.date_at(1));
  CHECK(d.dates[1] == grid.date_at(2));

  TimeSeries mixed = gridded(grid, {0.2, 0.5, 0.4});
  TimeSeries dm = first_difference(mixed);
  REQUIRE(dm.size() == 2);
  CHECK(dm.values[0] == doctest::Approx(0.3));
  CHECK(dm.values[1] == doctest::Approx(-0.1));

  TimeSeries single;
  single.dates = {make_date(2024, 5, 1)};
  single.values = {0.7};
  CHECK(first_difference(single).empty());
}

TEST_CASE("first difference recovers cumulative-sum increments exactly") {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> increments;
    for (int i = 0; i < 30; ++i) increments.push_back(rng.uniform(-0.25, 0.25));
    TimeSeries cumulative;
    double acc = 0.0;
    Date d = make_date(2024, 5, 1);
    cumulative.dates.push_back(d);
    cumulative.values.push_back(acc);
    for (double inc : increments) {
      acc += inc;
      d = add_days(d, 1 + static_cast<int>(rng.below(5)));
      cumulative.dates.push_back(d);
      cumulative.values.push_back(acc);
    }
    TimeSeries diff = first_difference(cumulative);
    REQUIRE(diff.size() == increments.size());
    for (std::size_t i = 0; i < increments.size(); ++i) {
      // x[i+1] - x[i] where x is a running sum reproduces the increment up
      // to one rounding of the accumulator, which is exact here because the
      // subtraction cancels the shared prefix.
      CHECK(diff.values[i] == doctest::Approx(increments[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("rate of change examples") {
  TimeSeries s;
  s.dates = {add_days(make_date(2024, 1, 1), 100), add_days(make_date(2024, 1, 1), 110)};
  s.values = {0.2, 0.5};
  TimeSeries roc = rate_of_change(s);
  REQUIRE(roc.size() == 1);
  CHECK(roc.values[0] == doctest::Approx(0.03));
  CHECK(roc.dates[0] == s.dates[1]);

  TimeGrid grid = build_grid(make_date(2024, 5, 1), make_date(2024, 6, 10), 10);
  TimeSeries constant = gridded(grid, std::vector<double>(grid.n_steps, 0.42));
  for (double v : rate_of_change(constant).values) CHECK(v == 0.0);
}

TEST_CASE("rate of change equals diff/10 on the default grid") {
  TimeGrid grid = build_grid(make_date(2024, 5, 1), make_date(2024, 8, 31), 10);
  Rng rng(17);
  std::vector<double> values;
  for (std::size_t k = 0; k < grid.n_steps; ++k) values.push_back(rng.uniform());
  TimeSeries s = gridded(grid, values);
  TimeSeries diff = first_difference(s);
  TimeSeries roc = rate_of_change(s);
  REQUIRE(diff.size() == roc.size());
  for (std::size_t i = 0; i < diff.size(); ++i) {
    CHECK(roc.values[i] == diff.values[i] / 10.0);
  }
}

TEST_CASE("rate of change rejects non-ascending dates") {
  TimeSeries s;
  s.dates = {make_date(2024, 5, 1), make_date(2024, 5, 1)};
  s.values = {0.2, 0.5};
  try {
    rate_of_change(s);
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonAscendingDates);
  }
}

TEST_CASE("pixel schema sizes on the default window") {
  TimeGrid grid = build_grid(make_date(2024, 5, 1), make_date(2024, 8, 31), 10);
  CHECK(pixel_feature_schema(Sensor::s2(), grid).size() == 518);
  CHECK(pixel_feature_schema(Sensor::ps8b(), grid).size() == 333);
}

TEST_CASE("pixel schema naming and ordering") {
  TimeGrid grid = build_grid(make_date(2024, 5, 1), make_date(2024, 8, 31), 10);
  auto schema = pixel_feature_schema(Sensor::ps8b(), grid);
  CHECK(schema.front() == "B01@2024-05-01");
  CHECK(schema[12] == "B01@2024-08-29");
  CHECK(schema[13] == "B01_diff@1");
  CHECK(schema[25] == "B01_roc@1");
  CHECK(schema[37] == "B02@2024-05-01");
  CHECK(schema[8 * 37] == "NDVI@2024-05-01");
  CHECK(schema.back() == "NDVI_roc@12");
}

TEST_CASE("assembled features agree with hand computation") {
  TimeGrid grid = build_grid(make_date(2024, 5, 1), make_date(2024, 5, 21), 10);
  const Sensor& sensor = Sensor::ps8b();
  std::vector<TimeSeries> bands;
  for (std::size_t b = 0; b < sensor.band_count(); ++b) {
    std::vector<double> v = {0.1 * static_cast<double>(b + 1), 0.2, 0.3};
    bands.push_back(gridded(grid, v));
  }
  PixelFeatureVector pixel = assemble_pixel_features("px", bands, sensor, grid);
  REQUIRE(pixel.values.size() == pixel.schema.size());
  CHECK(pixel.values.size() == 9 * 7);

  // Band 1 block: raw grid, then diffs, then rocs.
  CHECK(pixel.values[0] == doctest::Approx(0.1));
  CHECK(pixel.values[1] == doctest::Approx(0.2));
  CHECK(pixel.values[2] == doctest::Approx(0.3));
  CHECK(pixel.values[3] == doctest::Approx(0.1));
  CHECK(pixel.values[4] == doctest::Approx(0.1));
  CHECK(pixel.values[5] == doctest::Approx(0.01));
  CHECK(pixel.values[6] == doctest::Approx(0.01));

  // NDVI block uses bands 8 and 6 (indices 7 and 5).
  auto [nir, red] = sensor.ndvi_band_pair();
  double expect0 = ndvi(bands[nir].values[0], bands[red].values[0]);
  CHECK(pixel.values[8 * 7] == doctest::Approx(expect0));
}

TEST_CASE("two pixels of one run share one schema") {
  TimeGrid grid = build_grid(make_date(2024, 5, 1), make_date(2024, 8, 31), 10);
  const Sensor& sensor = Sensor::s2();
  auto make_pixel = [&](double base) {
    std::vector<TimeSeries> bands;
    for (std::size_t b = 0; b < sensor.band_count(); ++b) {
      std::vector<double> v(grid.n_steps, base + 0.01 * static_cast<double>(b));
      bands.push_back(gridded(grid, v));
    }
    return assemble_pixel_features("px" + std::to_string(base), bands, sensor, grid);
  };
  CHECK(make_pixel(0.2).schema == make_pixel(0.5).schema);
}

TEST_CASE("assemble rejects series off the grid") {
  TimeGrid grid = build_grid(make_date(2024, 5, 1), make_date(2024, 5, 21), 10);
  const Sensor& sensor = Sensor::ps8b();
  std::vector<TimeSeries> bands;
  for (std::size_t b = 0; b < sensor.band_count(); ++b) {
    bands.push_back(gridded(grid, {0.1, 0.2, 0.3}));
  }
  bands[3].dates[1] = add_days(bands[3].dates[1], 1);
  try {
    assemble_pixel_features("px", bands, sensor, grid);
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::GridMismatch);
  }
}

TEST_CASE("parcel aggregation hand arithmetic") {
  std::vector<std::string> schema = {"f0", "f1"};
  ParcelRecord parcel{"P1", {"a", "b"}, "Olives", std::nullopt};

  auto out = aggregate_parcel({pixel_with_values("a", schema, {0.2, 1.0}),
                               pixel_with_values("b", schema, {0.6, 1.0})},
                              parcel);
  REQUIRE(out.schema.size() == 6);
  CHECK(out.schema[0] == "f0:mean");
  CHECK(out.schema[1] == "f0:median");
  CHECK(out.schema[2] == "f0:std");
  CHECK(out.values[0] == doctest::Approx(0.4));
  CHECK(out.values[1] == doctest::Approx(0.4));
  CHECK(out.values[2] == doctest::Approx(0.2));
  CHECK(out.values[3] == doctest::Approx(1.0));
  CHECK(out.values[4] == doctest::Approx(1.0));
  CHECK(out.values[5] == 0.0);
}

TEST_CASE("identical pixels collapse to zero spread") {
  std::vector<std::string> schema = {"f0"};
  ParcelRecord parcel{"P1", {"a", "b", "c"}, "Olives", WeedClass::Tillage};
  auto out = aggregate_parcel({pixel_with_values("a", schema, {0.75}),
                               pixel_with_values("b", schema, {0.75}),
                               pixel_with_values("c", schema, {0.75})},
                              parcel);
  CHECK(out.values[0] == 0.75);
  CHECK(out.values[1] == 0.75);
  CHECK(out.values[2] == 0.0);
  CHECK(out.label == WeedClass::Tillage);
}

TEST_CASE("single pixel parcel degenerates cleanly") {
  std::vector<std::string> schema = {"f0"};
  ParcelRecord parcel{"P1", {"a"}, "Olives", std::nullopt};
  auto out = aggregate_parcel({pixel_with_values("a", schema, {0.35})}, parcel);
  CHECK(out.values[0] == 0.35);
  CHECK(out.values[1] == 0.35);
  CHECK(out.values[2] == 0.0);
}

TEST_CASE("aggregation is invariant to pixel order") {
  std::vector<std::string> schema = {"f0", "f1", "f2"};
  ParcelRecord parcel{"P1", {"a", "b", "c", "d"}, "Olives", std::nullopt};
  std::vector<PixelFeatureVector> pixels = {
      pixel_with_values("a", schema, {0.1, 0.9, 0.5}),
      pixel_with_values("b", schema, {0.4, 0.2, 0.5}),
      pixel_with_values("c", schema, {0.3, 0.8, 0.6}),
      pixel_with_values("d", schema, {0.2, 0.1, 0.4}),
  };
  auto reference = aggregate_parcel(pixels, parcel);
  std::sort(pixels.begin(), pixels.end(),
            [](const auto& x, const auto& y) { return x.pixel_id > y.pixel_id; });
  auto permuted = aggregate_parcel(pixels, parcel);
  CHECK(reference.values == permuted.values);
}

TEST_CASE("median stays between the pixel extremes") {
  Rng rng(23);
  std::vector<std::string> schema = {"f0"};
  for (int trial = 0; trial < 40; ++trial) {
    std::size_t n = 1 + rng.below(9);
    std::vector<PixelFeatureVector> pixels;
    double lo = 1e9, hi = -1e9;
    for (std::size_t i = 0; i < n; ++i) {
      double v = rng.uniform(-1.0, 1.0);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      pixels.push_back(pixel_with_values("p" + std::to_string(i), schema, {v}));
    }
    ParcelRecord parcel{"P1", {"p0"}, "Olives", std::nullopt};
    auto out = aggregate_parcel(pixels, parcel);
    CHECK(out.values[1] >= lo);
    CHECK(out.values[1] <= hi);
  }
}

TEST_CASE("aggregation errors") {
  ParcelRecord parcel{"P1", {"a"}, "Olives", std::nullopt};
  try {
    aggregate_parcel({}, parcel);
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyParcel);
  }

  try {
    aggregate_parcel({pixel_with_values("a", {"f0"}, {0.1}),
                      pixel_with_values("b", {"g0"}, {0.1})},
                     parcel);
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SchemaMismatch);
  }
}

TEST_CASE("schema fingerprint is order sensitive and stable") {
  auto fp1 = schema_fingerprint({"a", "b"});
  auto fp2 = schema_fingerprint({"b", "a"});
  CHECK(fp1.size() == 16);
  CHECK(fp1 != fp2);
  CHECK(fp1 == schema_fingerprint({"a", "b"}));
}
