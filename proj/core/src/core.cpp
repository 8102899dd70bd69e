#include "weedmap/core.hpp"

#include <cmath>
#include <unordered_set>

namespace weedmap {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::BandCountMismatch: return "BandCountMismatch";
    case ErrorCode::NegativeReflectance: return "NegativeReflectance";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::CloudFractionOutOfRange: return "CloudFractionOutOfRange";
    case ErrorCode::UnknownSensor: return "UnknownSensor";
    case ErrorCode::EmptyWindow: return "EmptyWindow";
    case ErrorCode::EmptySeries: return "EmptySeries";
    case ErrorCode::NonAscendingDates: return "NonAscendingDates";
    case ErrorCode::NonFiniteInput: return "NonFiniteInput";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::EmptyParcel: return "EmptyParcel";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::ClassTooSmall: return "ClassTooSmall";
    case ErrorCode::FractionOutOfRange: return "FractionOutOfRange";
    case ErrorCode::EmptyTrainingSet: return "EmptyTrainingSet";
    case ErrorCode::KTooLarge: return "KTooLarge";
    case ErrorCode::ClassSmallerThanFolds: return "ClassSmallerThanFolds";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::ZeroSupport: return "ZeroSupport";
    case ErrorCode::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::UnknownVersion: return "UnknownVersion";
  }
  return "UnknownError";
}

Sensor::Sensor(SensorId id, std::string name, std::vector<BandDescriptor> bands,
               const std::string& nir_code, const std::string& red_code)
    : id_(id), name_(std::move(name)), bands_(std::move(bands)) {
  nir_index_ = *band_index(nir_code);
  red_index_ = *band_index(red_code);
}

namespace {

std::vector<BandDescriptor> make_bands(
    std::initializer_list<std::pair<const char*, const char*>> list) {
  std::vector<BandDescriptor> bands;
  bands.reserve(list.size());
  std::size_t index = 0;
  for (const auto& [code, name] : list) {
    bands.push_back(BandDescriptor{code, name, index++});
  }
  return bands;
}

}  // namespace

const Sensor& Sensor::s2() {
  static const Sensor sensor{
      SensorId::S2,
      "Sentinel-2",
      make_bands({{"B01", "Coastal Aerosol"},
                  {"B02", "Blue"},
                  {"B03", "Green"},
                  {"B04", "Red"},
                  {"B05", "Red Edge 1"},
                  {"B06", "Red Edge 2"},
                  {"B07", "Red Edge 3"},
                  {"B08", "Near-Infrared (NIR)"},
                  {"B8A", "Narrow Near-Infrared (Narrow NIR)"},
                  {"B09", "Water Vapour"},
                  {"B10", "Shortwave Infrared (Cirrus)"},
                  {"B11", "Shortwave Infrared 1 (SWIR1)"},
                  {"B12", "Shortwave Infrared 2 (SWIR2)"}}),
      "B08",
      "B04"};
  return sensor;
}

const Sensor& Sensor::ps8b() {
  static const Sensor sensor{
      SensorId::PS8B,
      "PlanetScope 8-band",
      make_bands({{"B01", "Coastal Blue"},
                  {"B02", "Blue"},
                  {"B03", "Green I"},
                  {"B04", "Green"},
                  {"B05", "Yellow"},
                  {"B06", "Red"},
                  {"B07", "Red Edge"},
                  {"B08", "Near Infrared (NIR)"}}),
      "B08",
      "B06"};
  return sensor;
}

const Sensor& Sensor::get(SensorId id) {
  switch (id) {
    case SensorId::S2: return s2();
    case SensorId::PS8B: return ps8b();
  }
  throw Error(ErrorCode::UnknownSensor, "unregistered sensor id");
}

const BandDescriptor& Sensor::band_at(std::size_t index) const {
  if (index >= bands_.size()) {
    throw Error(ErrorCode::UnknownSensor,
                name_ + " has no band at index " + std::to_string(index));
  }
  return bands_[index];
}

std::optional<std::size_t> Sensor::band_index(const std::string& code) const {
  for (const auto& band : bands_) {
    if (band.code == code) return band.index;
  }
  return std::nullopt;
}

SensorId parse_sensor_id(const std::string& text) {
  if (text == "s2" || text == "S2") return SensorId::S2;
  if (text == "ps8b" || text == "PS8B" || text == "ps" || text == "PS") {
    return SensorId::PS8B;
  }
  throw Error(ErrorCode::UnknownSensor, "unknown sensor '" + text + "'");
}

std::string sensor_id_name(SensorId id) {
  return id == SensorId::S2 ? "s2" : "ps8b";
}

namespace {
const std::array<std::string, kNumClasses> kClassNames = {
    "Mowing", "Tillage", "Chemical-spraying", "No practice"};
const std::array<std::string, kNumClasses> kClassCodes = {"MO", "TL", "CS", "NP"};
}  // namespace

const std::string& weed_class_name(WeedClass cls) {
  return kClassNames[static_cast<std::size_t>(cls)];
}

const std::string& weed_class_code(WeedClass cls) {
  return kClassCodes[static_cast<std::size_t>(cls)];
}

WeedClass parse_weed_class(const std::string& text) {
  for (WeedClass cls : all_weed_classes()) {
    if (text == weed_class_name(cls) || text == weed_class_code(cls)) return cls;
  }
  throw Error(ErrorCode::ParseError, "unknown weed management class '" + text + "'");
}

void validate_time_series(const TimeSeries& series) {
  if (series.dates.size() != series.values.size()) {
    throw Error(ErrorCode::LengthMismatch,
                "time series has " + std::to_string(series.dates.size()) +
                    " dates but " + std::to_string(series.values.size()) +
                    " values");
  }
  for (std::size_t i = 1; i < series.dates.size(); ++i) {
    if (!(series.dates[i - 1] < series.dates[i])) {
      throw Error(ErrorCode::NonAscendingDates,
                  "dates not strictly ascending at position " + std::to_string(i));
    }
  }
}

const SpectralObservation& validate_observation(const SpectralObservation& obs,
                                                const Sensor& sensor) {
  const std::string where =
      " (pixel " + obs.pixel_id + ", date " + format_date(obs.date) + ")";
  if (obs.sensor != sensor.id()) {
    throw Error(ErrorCode::UnknownSensor,
                "observation sensor does not match registry" + where);
  }
  if (obs.reflectances.size() != sensor.band_count()) {
    throw Error(ErrorCode::BandCountMismatch,
                "expected " + std::to_string(sensor.band_count()) +
                    " reflectances, got " + std::to_string(obs.reflectances.size()) +
                    where);
  }
  for (std::size_t i = 0; i < obs.reflectances.size(); ++i) {
    double value = obs.reflectances[i];
    if (!std::isfinite(value)) {
      throw Error(ErrorCode::NonFiniteValue,
                  "band " + sensor.band_at(i).code + " is not finite" + where);
    }
    if (value < 0.0) {
      throw Error(ErrorCode::NegativeReflectance,
                  "band " + sensor.band_at(i).code + " = " + std::to_string(value) +
                      where);
    }
  }
  if (!std::isfinite(obs.cloud_fraction) || obs.cloud_fraction < 0.0 ||
      obs.cloud_fraction > 1.0) {
    throw Error(ErrorCode::CloudFractionOutOfRange,
                "cloud_fraction = " + std::to_string(obs.cloud_fraction) + where);
  }
  return obs;
}

}  // namespace weedmap
