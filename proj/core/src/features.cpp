#include "weedmap/features.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "weedmap/rng.hpp"

namespace weedmap {

double ndvi(double nir, double red) {
  if (!std::isfinite(nir) || !std::isfinite(red)) {
    throw Error(ErrorCode::NonFiniteInput, "ndvi inputs must be finite");
  }
  const double denom = nir + red;
  if (denom == 0.0) return 0.0;
  return (nir - red) / denom;
}

TimeSeries first_difference(const TimeSeries& series) {
  validate_time_series(series);
  TimeSeries out;
  if (series.size() < 2) return out;
  out.dates.assign(series.dates.begin() + 1, series.dates.end());
  out.values.reserve(series.size() - 1);
  for (std::size_t i = 0; i + 1 < series.size(); ++i) {
    out.values.push_back(series.values[i + 1] - series.values[i]);
  }
  return out;
}

TimeSeries rate_of_change(const TimeSeries& series) {
  validate_time_series(series);
  TimeSeries out;
  if (series.size() < 2) return out;
  out.dates.assign(series.dates.begin() + 1, series.dates.end());
  out.values.reserve(series.size() - 1);
  for (std::size_t i = 0; i + 1 < series.size(); ++i) {
    const double dt =
        static_cast<double>(days_between(series.dates[i], series.dates[i + 1]));
    out.values.push_back((series.values[i + 1] - series.values[i]) / dt);
  }
  return out;
}

namespace {

void append_source_schema(const std::string& source, const TimeGrid& grid,
                          std::vector<std::string>& schema) {
  for (std::size_t k = 0; k < grid.n_steps; ++k) {
    schema.push_back(source + "@" + format_date(grid.date_at(k)));
  }
  for (std::size_t k = 1; k < grid.n_steps; ++k) {
    schema.push_back(source + "_diff@" + std::to_string(k));
  }
  for (std::size_t k = 1; k < grid.n_steps; ++k) {
    schema.push_back(source + "_roc@" + std::to_string(k));
  }
}

void append_source_values(const TimeSeries& series,
                          std::vector<double>& values) {
  values.insert(values.end(), series.values.begin(), series.values.end());
  const TimeSeries diff = first_difference(series);
  values.insert(values.end(), diff.values.begin(), diff.values.end());
  const TimeSeries roc = rate_of_change(series);
  values.insert(values.end(), roc.values.begin(), roc.values.end());
}

}  // namespace

std::vector<std::string> pixel_feature_schema(const Sensor& sensor,
                                              const TimeGrid& grid) {
  std::vector<std::string> schema;
  schema.reserve((sensor.band_count() + 1) * (3 * grid.n_steps - 2));
  for (const auto& band : sensor.bands()) {
    append_source_schema(band.code, grid, schema);
  }
  append_source_schema("NDVI", grid, schema);
  return schema;
}

PixelFeatureVector assemble_pixel_features(const std::string& pixel_id,
                                           const std::vector<TimeSeries>& band_series,
                                           const Sensor& sensor,
                                           const TimeGrid& grid) {
  if (band_series.size() != sensor.band_count()) {
    throw Error(ErrorCode::GridMismatch,
                "expected " + std::to_string(sensor.band_count()) +
                    " band series, got " + std::to_string(band_series.size()));
  }
  const std::vector<Date> grid_dates = grid.dates();
  for (const auto& series : band_series) {
    if (series.dates != grid_dates) {
      throw Error(ErrorCode::GridMismatch,
                  "band series of pixel " + pixel_id + " is not on the sampling grid");
    }
  }

  PixelFeatureVector out;
  out.pixel_id = pixel_id;
  out.schema = pixel_feature_schema(sensor, grid);
  out.values.reserve(out.schema.size());
  for (const auto& series : band_series) {
    append_source_values(series, out.values);
  }

  const auto [nir_index, red_index] = sensor.ndvi_band_pair();
  TimeSeries ndvi_series;
  ndvi_series.dates = grid_dates;
  ndvi_series.values.reserve(grid.n_steps);
  for (std::size_t k = 0; k < grid.n_steps; ++k) {
    ndvi_series.values.push_back(
        ndvi(band_series[nir_index].values[k], band_series[red_index].values[k]));
  }
  append_source_values(ndvi_series, out.values);
  return out;
}

std::vector<std::string> parcel_feature_schema(
    const std::vector<std::string>& pixel_schema) {
  std::vector<std::string> schema;
  schema.reserve(3 * pixel_schema.size());
  for (const auto& name : pixel_schema) {
    schema.push_back(name + ":mean");
    schema.push_back(name + ":median");
    schema.push_back(name + ":std");
  }
  return schema;
}

ParcelFeatureVector aggregate_parcel(const std::vector<PixelFeatureVector>& pixels,
                                     const ParcelRecord& parcel) {
  if (pixels.empty()) {
    throw Error(ErrorCode::EmptyParcel,
                "parcel " + parcel.parcel_id + " has no pixel features");
  }
  const std::vector<std::string>& pixel_schema = pixels.front().schema;
  for (const auto& pixel : pixels) {
    if (pixel.schema != pixel_schema) {
      throw Error(ErrorCode::SchemaMismatch,
                  "pixel " + pixel.pixel_id + " disagrees with parcel schema");
    }
  }

  const std::size_t n_features = pixel_schema.size();
  const std::size_t n_pixels = pixels.size();

  ParcelFeatureVector out;
  out.parcel_id = parcel.parcel_id;
  out.label = parcel.label;
  out.schema = parcel_feature_schema(pixel_schema);
  out.values.reserve(3 * n_features);

  std::vector<double> column(n_pixels);
  for (std::size_t f = 0; f < n_features; ++f) {
    for (std::size_t p = 0; p < n_pixels; ++p) column[p] = pixels[p].values[f];
    // Summing in sorted order keeps every statistic bit-identical under
    // pixel permutation.
    std::sort(column.begin(), column.end());

    double sum = 0.0;
    for (double v : column) sum += v;
    const double mean = sum / static_cast<double>(n_pixels);

    double median;
    if (n_pixels % 2 == 1) {
      median = column[n_pixels / 2];
    } else {
      median = 0.5 * (column[n_pixels / 2 - 1] + column[n_pixels / 2]);
    }

    double ss = 0.0;
    for (double v : column) {
      const double d = v - mean;
      ss += d * d;
    }
    const double std_dev = std::sqrt(ss / static_cast<double>(n_pixels));

    out.values.push_back(mean);
    out.values.push_back(median);
    out.values.push_back(std_dev);
  }
  return out;
}

std::string schema_fingerprint(const std::vector<std::string>& schema) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  auto feed = [&h](std::string_view bytes) {
    for (unsigned char c : bytes) {
      h ^= c;
      h *= 0x100000001b3ull;
    }
  };
  for (const auto& name : schema) {
    feed(name);
    feed("\n");
  }
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace weedmap
