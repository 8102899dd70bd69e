#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "weedmap/core.hpp"

namespace weedmap {

// Observation CSV layout:
//   # scale=10000
//   pixel_id,parcel_id,date,cloud_fraction,<band codes in registry order>
// Reflectances are stored as integer digital numbers and divided by the
// scale on ingestion; a missing scale comment means 10000.
constexpr int kDefaultReflectanceScale = 10000;

std::vector<SpectralObservation> read_observations_csv(const std::string& path,
                                                       SensorId sensor);
void write_observations_csv(const std::string& path,
                            const std::vector<SpectralObservation>& observations,
                            SensorId sensor,
                            int scale = kDefaultReflectanceScale);

// Parcel manifest: parcel_id,orchard_type,label (label may be empty for
// unlabeled parcels). Pixel membership comes from the observation file.
std::vector<ParcelRecord> read_parcels_csv(const std::string& path);
void write_parcels_csv(const std::string& path,
                       const std::vector<ParcelRecord>& parcels);

// Flat key=value config files; '#' starts a comment, blank lines ignored.
std::map<std::string, std::string> read_config_file(const std::string& path);

// Strict value parsers for config entries; every failure is a ConfigError
// naming the offending key.
std::uint64_t parse_config_u64(const std::string& key, const std::string& value);
double parse_config_real(const std::string& key, const std::string& value);
bool parse_config_flag(const std::string& key, const std::string& value);
std::vector<std::string> split_config_list(const std::string& value);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

// FNV-1a over the raw bytes of each path in order; stable id for manifests.
std::uint64_t file_fingerprint(const std::vector<std::string>& paths);

}  // namespace weedmap
