#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "weedmap/date.hpp"
#include "weedmap/errors.hpp"

namespace weedmap {

enum class SensorId { S2, PS8B };

struct BandDescriptor {
  std::string code;   // short identifier, e.g. "B04"
  std::string name;   // human-readable, e.g. "Red"
  std::size_t index;  // 0-based position in the sensor's band order
};

// Immutable band registry for one satellite product.
class Sensor {
 public:
  static const Sensor& s2();
  static const Sensor& ps8b();
  static const Sensor& get(SensorId id);

  SensorId id() const { return id_; }
  const std::string& name() const { return name_; }
  const std::vector<BandDescriptor>& bands() const { return bands_; }
  std::size_t band_count() const { return bands_.size(); }

  const BandDescriptor& band_at(std::size_t index) const;
  std::optional<std::size_t> band_index(const std::string& code) const;

  // (nir index, red index) for the NDVI numerator/denominator pair.
  std::pair<std::size_t, std::size_t> ndvi_band_pair() const {
    return {nir_index_, red_index_};
  }

 private:
  Sensor(SensorId id, std::string name, std::vector<BandDescriptor> bands,
         const std::string& nir_code, const std::string& red_code);

  SensorId id_;
  std::string name_;
  std::vector<BandDescriptor> bands_;
  std::size_t nir_index_;
  std::size_t red_index_;
};

SensorId parse_sensor_id(const std::string& text);
std::string sensor_id_name(SensorId id);

// Ordinal order is the canonical axis order of every confusion matrix,
// report table and tie-break rule in this library.
enum class WeedClass : int {
  Mowing = 0,
  Tillage = 1,
  ChemicalSpraying = 2,
  NoPractice = 3,
};

inline constexpr std::size_t kNumClasses = 4;

inline constexpr std::array<WeedClass, kNumClasses> all_weed_classes() {
  return {WeedClass::Mowing, WeedClass::Tillage, WeedClass::ChemicalSpraying,
          WeedClass::NoPractice};
}

const std::string& weed_class_name(WeedClass cls);    // e.g. "Chemical-spraying"
const std::string& weed_class_code(WeedClass cls);    // e.g. "CS"
WeedClass parse_weed_class(const std::string& text);  // accepts name or code

// One pixel, one date, one sensor.
struct SpectralObservation {
  std::string pixel_id;
  std::string parcel_id;
  Date date{};
  SensorId sensor = SensorId::S2;
  std::vector<double> reflectances;  // fraction of unity, one per band
  double cloud_fraction = 0.0;       // in [0, 1]
};

// Paired (date, value) samples; dates strictly ascending.
struct TimeSeries {
  std::vector<Date> dates;
  std::vector<double> values;

  std::size_t size() const { return dates.size(); }
  bool empty() const { return dates.empty(); }
};

// Throws NonAscendingDates / LengthMismatch when the series is malformed.
void validate_time_series(const TimeSeries& series);

struct ParcelRecord {
  std::string parcel_id;
  std::vector<std::string> pixel_ids;  // nonempty, unique
  std::string orchard_type;            // free-form; "other" when unknown
  std::optional<WeedClass> label;      // absent at prediction time
};

// Returns `obs` untouched iff every invariant holds; otherwise throws an
// Error naming the offending field, pixel and date.
const SpectralObservation& validate_observation(const SpectralObservation& obs,
                                                const Sensor& sensor);

}  // namespace weedmap
