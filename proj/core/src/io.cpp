#include "weedmap/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "weedmap/errors.hpp"
#include "weedmap/rng.hpp"

namespace weedmap {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double parse_double(const std::string& text, const std::string& path, std::size_t line_no) {
  try {
    std::size_t pos = 0;
    double v = std::stod(text, &pos);
    if (pos != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::ParseError, path + ":" + std::to_string(line_no) +
                                           ": bad numeric field '" + text + "'");
  }
}

}  // namespace

std::vector<SpectralObservation> read_observations_csv(const std::string& path,
                                                       SensorId sensor_id) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  const Sensor& sensor = Sensor::get(sensor_id);
  const std::size_t n_bands = sensor.bands().size();

  std::string line;
  std::size_t line_no = 0;
  double scale = kDefaultReflectanceScale;
  bool have_header = false;
  std::vector<SpectralObservation> out;

  while (std::getline(in, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty()) continue;
    if (t[0] == '#') {
      const std::string tag = "scale=";
      std::size_t pos = t.find(tag);
      if (pos != std::string::npos) {
        scale = parse_double(trim(t.substr(pos + tag.size())), path, line_no);
        if (!(scale > 0)) {
          throw Error(ErrorCode::ParseError, path + ": non-positive scale");
        }
      }
      continue;
    }
    auto fields = split_csv_line(t);
    if (!have_header) {
      if (fields.size() != 4 + n_bands) {
        throw Error(ErrorCode::BandCountMismatch,
                    path + ": header has " + std::to_string(fields.size()) +
                        " columns, expected " + std::to_string(4 + n_bands) +
                        " for sensor " + sensor_id_name(sensor_id));
      }
      if (fields[0] != "pixel_id" || fields[1] != "parcel_id" ||
          fields[2] != "date" || fields[3] != "cloud_fraction") {
        throw Error(ErrorCode::ParseError, path + ": unexpected header prefix");
      }
      for (std::size_t b = 0; b < n_bands; ++b) {
        if (fields[4 + b] != sensor.bands()[b].code) {
          throw Error(ErrorCode::BandCountMismatch,
                      path + ": header band '" + fields[4 + b] +
                          "' does not match sensor band '" +
                          sensor.bands()[b].code + "'");
        }
      }
      have_header = true;
      continue;
    }
    if (fields.size() != 4 + n_bands) {
      throw Error(ErrorCode::ParseError, path + ":" + std::to_string(line_no) +
                                             ": wrong column count");
    }
    SpectralObservation obs;
    obs.pixel_id = fields[0];
    obs.parcel_id = fields[1];
    try {
      obs.date = parse_date(fields[2]);
    } catch (const Error& e) {
      throw Error(ErrorCode::ParseError,
                  path + ":" + std::to_string(line_no) + ": " + e.what());
    }
    obs.sensor = sensor_id;
    obs.cloud_fraction = parse_double(fields[3], path, line_no);
    obs.reflectances.resize(n_bands);
    for (std::size_t b = 0; b < n_bands; ++b) {
      obs.reflectances[b] = parse_double(fields[4 + b], path, line_no) / scale;
    }
    validate_observation(obs, sensor);
    out.push_back(std::move(obs));
  }
  if (!have_header) {
    throw Error(ErrorCode::ParseError, path + ": missing header row");
  }
  return out;
}

void write_observations_csv(const std::string& path,
                            const std::vector<SpectralObservation>& observations,
                            SensorId sensor_id, int scale) {
  const Sensor& sensor = Sensor::get(sensor_id);
  std::ostringstream out;
  out << "# scale=" << scale << "\n";
  out << "pixel_id,parcel_id,date,cloud_fraction";
  for (const auto& band : sensor.bands()) out << "," << band.code;
  out << "\n";
  char buf[32];
  for (const auto& obs : observations) {
    validate_observation(obs, sensor);
    out << obs.pixel_id << "," << obs.parcel_id << "," << format_date(obs.date);
    std::snprintf(buf, sizeof(buf), "%.6g", obs.cloud_fraction);
    out << "," << buf;
    for (double v : obs.reflectances) {
      out << "," << static_cast<long>(std::llround(v * scale));
    }
    out << "\n";
  }
  write_text_file(path, out.str());
}

std::vector<ParcelRecord> read_parcels_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  std::vector<ParcelRecord> out;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    auto fields = split_csv_line(t);
    if (!have_header) {
      if (fields.size() != 3 || fields[0] != "parcel_id" ||
          fields[1] != "orchard_type" || fields[2] != "label") {
        throw Error(ErrorCode::ParseError,
                    path + ": expected header parcel_id,orchard_type,label");
      }
      have_header = true;
      continue;
    }
    if (fields.size() != 3) {
      throw Error(ErrorCode::ParseError, path + ":" + std::to_string(line_no) +
                                             ": wrong column count");
    }
    ParcelRecord rec;
    rec.parcel_id = fields[0];
    rec.orchard_type = fields[1];
    if (rec.parcel_id.empty()) {
      throw Error(ErrorCode::ParseError,
                  path + ":" + std::to_string(line_no) + ": empty parcel_id");
    }
    const std::string label = trim(fields[2]);
    if (!label.empty()) {
      try {
        rec.label = parse_weed_class(label);
      } catch (const Error& e) {
        throw Error(ErrorCode::ParseError,
                    path + ":" + std::to_string(line_no) + ": " + e.what());
      }
    }
    out.push_back(std::move(rec));
  }
  if (!have_header) {
    throw Error(ErrorCode::ParseError, path + ": missing header row");
  }
  return out;
}

void write_parcels_csv(const std::string& path,
                       const std::vector<ParcelRecord>& parcels) {
  std::ostringstream out;
  out << "parcel_id,orchard_type,label\n";
  for (const auto& rec : parcels) {
    out << rec.parcel_id << "," << rec.orchard_type << ",";
    if (rec.label) out << weed_class_name(*rec.label);
    out << "\n";
  }
  write_text_file(path, out.str());
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigError, "cannot open config " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::size_t eq = t.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw Error(ErrorCode::ConfigError, path + ":" + std::to_string(line_no) +
                                              ": expected key=value");
    }
    kv[trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
  }
  return kv;
}

std::uint64_t parse_config_u64(const std::string& key, const std::string& value) {
  // stoull wraps negatives around instead of failing, so screen for digits
  // up front.
  if (value.empty() || value.find_first_not_of("0123456789") != std::string::npos) {
    throw Error(ErrorCode::ConfigError, key + ": bad integer '" + value + "'");
  }
  try {
    std::size_t pos = 0;
    unsigned long long v = std::stoull(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::ConfigError, key + ": bad integer '" + value + "'");
  }
}

double parse_config_real(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    double v = std::stod(value, &pos);
    if (pos != value.size() || !std::isfinite(v)) {
      throw std::invalid_argument(value);
    }
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::ConfigError, key + ": bad number '" + value + "'");
  }
}

bool parse_config_flag(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw Error(ErrorCode::ConfigError, key + ": bad boolean '" + value + "'");
}

std::vector<std::string> split_config_list(const std::string& value) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : value) {
    if (c == ',') {
      parts.push_back(cur);
      cur.clear();
    } else if (c != ' ') {
      cur.push_back(c);
    }
  }
  parts.push_back(cur);
  return parts;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  out << content;
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path);
}

std::uint64_t file_fingerprint(const std::vector<std::string>& paths) {
  std::uint64_t h = 14695981039346656037ull;
  for (const auto& path : paths) {
    const std::string bytes = read_text_file(path);
    for (unsigned char c : bytes) {
      h ^= c;
      h *= 1099511628211ull;
    }
  }
  return h;
}

}  // namespace weedmap
