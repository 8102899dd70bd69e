#pragma once

#include <map>
#include <string>
#include <vector>

#include "weedmap/core.hpp"
#include "weedmap/preprocess.hpp"

namespace weedmap {

// Flattened per-pixel feature vector. The schema is identical for every
// pixel of one run (same sensor, same grid):
//   per source (each band in registry order, then NDVI):
//     "<src>@<grid date>" ... raw grid values
//     "<src>_diff@<k>"    ... first-order differences, k = later grid index
//     "<src>_roc@<k>"     ... rates of change in value/day
struct PixelFeatureVector {
  std::string pixel_id;
  std::vector<std::string> schema;
  std::vector<double> values;
};

// Parcel-level aggregation: every pixel feature expands to
// "<feature>:mean", "<feature>:median", "<feature>:std".
struct ParcelFeatureVector {
  std::string parcel_id;
  std::optional<WeedClass> label;
  std::vector<std::string> schema;
  std::vector<double> values;
};

// (nir - red) / (nir + red); returns 0 when the denominator is 0 so dark or
// masked pixels cannot inject NaNs downstream.
double ndvi(double nir, double red);

// Output value k = x[k+1] - x[k]; its date is the later of the pair.
// A length-1 input yields an empty series.
TimeSeries first_difference(const TimeSeries& series);

// Output value k = (x[k+1] - x[k]) / (t[k+1] - t[k]), t in days.
TimeSeries rate_of_change(const TimeSeries& series);

// The full flattened schema for one sensor on one grid; deterministic.
std::vector<std::string> pixel_feature_schema(const Sensor& sensor,
                                              const TimeGrid& grid);

// Gridded band series (registry order) -> flattened features incl. NDVI.
// Throws GridMismatch when a band series does not sit on `grid`.
PixelFeatureVector assemble_pixel_features(const std::string& pixel_id,
                                           const std::vector<TimeSeries>& band_series,
                                           const Sensor& sensor,
                                           const TimeGrid& grid);

std::vector<std::string> parcel_feature_schema(
    const std::vector<std::string>& pixel_schema);

// Mean / median / population standard deviation of each feature over the
// parcel's member pixels. Median averages the two middle values for even
// counts; std divides by n so single-pixel parcels are well defined.
ParcelFeatureVector aggregate_parcel(const std::vector<PixelFeatureVector>& pixels,
                                     const ParcelRecord& parcel);

// 64-bit FNV-1a over the schema strings; models refuse rows whose
// fingerprint differs from the one they were trained with.
std::string schema_fingerprint(const std::vector<std::string>& schema);

}  // namespace weedmap
