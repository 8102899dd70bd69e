#include "weedmap/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iterator>

#include "weedmap/errors.hpp"
#include "weedmap/io.hpp"
#include "weedmap/rng.hpp"

namespace weedmap {

namespace {

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

double smoothstep(double u) {
  u = clamp01(u);
  return u * u * (3.0 - 2.0 * u);
}

double base_curve(double t, const SignatureParams& p) {
  return p.base_low + (p.base_high - p.base_low) * smoothstep(t / p.base_rise_days);
}

// Per-band response mix: reflectance = veg + soil_fraction * soil_delta,
// with the NDVI pair handled separately. Values loosely track typical
// canopy/soil spectra; only their ordering and soil response matter here.
struct BandResponse {
  double veg;
  double soil_delta;
};

BandResponse band_response(const std::string& code, SensorId sensor) {
  if (sensor == SensorId::S2) {
    if (code == "B01") return {0.04, 0.10};
    if (code == "B02") return {0.05, 0.12};
    if (code == "B03") return {0.08, 0.12};
    if (code == "B05") return {0.12, 0.14};
    if (code == "B06") return {0.30, 0.02};
    if (code == "B07") return {0.38, 0.00};
    if (code == "B8A") return {0.46, -0.04};
    if (code == "B09") return {0.20, 0.05};
    if (code == "B10") return {0.01, 0.01};
    if (code == "B11") return {0.18, 0.20};
    if (code == "B12") return {0.10, 0.22};
  } else {
    if (code == "B01") return {0.04, 0.10};
    if (code == "B02") return {0.05, 0.12};
    if (code == "B03") return {0.07, 0.12};
    if (code == "B04") return {0.08, 0.12};
    if (code == "B05") return {0.10, 0.14};
    if (code == "B07") return {0.24, 0.04};
  }
  return {0.10, 0.10};
}

}  // namespace

Separation parse_separation(const std::string& text) {
  if (text == "high") return Separation::High;
  if (text == "medium") return Separation::Medium;
  if (text == "low") return Separation::Low;
  throw Error(ErrorCode::ConfigError, "unknown separation level: " + text);
}

std::string separation_name(Separation level) {
  switch (level) {
    case Separation::High: return "high";
    case Separation::Medium: return "medium";
    case Separation::Low: return "low";
  }
  return "high";
}

std::array<double, kNumClasses> separation_factors(Separation level) {
  switch (level) {
    case Separation::High: return {1.0, 1.0, 1.0, 1.0};
    case Separation::Medium: return {0.5, 0.55, 0.4, 1.0};
    case Separation::Low: return {0.12, 0.3, 0.06, 1.0};
  }
  return {1.0, 1.0, 1.0, 1.0};
}

double class_signature(WeedClass cls, double event_day, double t,
                       const SignatureParams& params) {
  return class_signature_scaled(cls, event_day, t, 1.0, params);
}

double class_signature_scaled(WeedClass cls, double event_day, double t,
                              double factor, const SignatureParams& p) {
  const double base = base_curve(t, p);
  double deviation = 0.0;
  const double dt = t - event_day;
  switch (cls) {
    case WeedClass::NoPractice:
      break;
    case WeedClass::Mowing:
      if (dt >= 0.0) {
        const double u = std::min(1.0, dt / p.mow_recovery_days);
        deviation = -(p.mow_drop + (p.mow_residual - p.mow_drop) * u);
      }
      break;
    case WeedClass::Tillage:
      if (dt >= 0.0) {
        const double u = std::min(1.0, dt / p.till_recovery_days);
        const double at_event = p.till_soil_ndvi - base;
        deviation = at_event + (-p.till_residual - at_event) * u;
      }
      break;
    case WeedClass::ChemicalSpraying:
      if (dt >= 0.0) {
        if (dt <= p.chem_decline_days) {
          deviation = -p.chem_decline * (dt / p.chem_decline_days);
        } else {
          const double back = p.chem_decline * p.chem_recovery_fraction *
                              std::min(1.0, (dt - p.chem_decline_days) / p.chem_recovery_days);
          deviation = -p.chem_decline + back;
        }
      }
      break;
  }
  return base + factor * deviation;
}

double soil_exposure(WeedClass cls, double event_day, double t,
                     const SignatureParams& p) {
  if (cls != WeedClass::Tillage) return 0.0;
  const double dt = t - event_day;
  if (dt < 0.0 || dt >= p.till_recovery_days) return 0.0;
  return 1.0 - dt / p.till_recovery_days;
}

std::vector<double> synth_reflectances(const Sensor& sensor, double ndvi_target,
                                       double soil_fraction) {
  const auto [nir, red] = sensor.ndvi_band_pair();
  const double total = 0.5 + 0.25 * soil_fraction;
  std::vector<double> out(sensor.bands().size(), 0.0);
  out[nir] = clamp01(total * (1.0 + ndvi_target) / 2.0);
  out[red] = clamp01(total * (1.0 - ndvi_target) / 2.0);
  const double veg_fraction = clamp01((ndvi_target - 0.1) / 0.8);
  for (std::size_t b = 0; b < sensor.bands().size(); ++b) {
    if (b == nir || b == red) continue;
    const auto resp = band_response(sensor.bands()[b].code, sensor.id());
    out[b] = clamp01(resp.veg * (0.3 + 0.7 * veg_fraction) +
                     resp.soil_delta * soil_fraction);
  }
  return out;
}

SynthOutput generate_dataset(const SynthConfig& cfg) {
  if (cfg.window_end < cfg.window_start) {
    throw Error(ErrorCode::EmptyWindow, "synth window end precedes start");
  }
  if (cfg.pixels_per_parcel_min < 1 ||
      cfg.pixels_per_parcel_max < cfg.pixels_per_parcel_min) {
    throw Error(ErrorCode::ConfigError, "invalid pixels-per-parcel range");
  }
  if (!(cfg.noise_sd >= 0.0) || !(cfg.cloud_rate >= 0.0) || cfg.cloud_rate > 1.0) {
    throw Error(ErrorCode::ConfigError, "invalid noise or cloud rate");
  }
  const Sensor& sensor = Sensor::get(cfg.sensor);
  const auto factors = cfg.effective_factors();
  const int revisit = cfg.effective_revisit_days();
  const long span = days_between(cfg.window_start, cfg.window_end);
  const long event_lo = std::lround(0.2 * static_cast<double>(span));
  const long event_hi = std::lround(0.8 * static_cast<double>(span));

  std::vector<Date> dates;
  for (Date d = cfg.window_start; d <= cfg.window_end; d = add_days(d, revisit)) {
    dates.push_back(d);
  }

  static const char* kOrchards[] = {"Apricots", "Peaches",    "Almonds",
                                    "Pears",    "Pistachios", "Olives"};

  SynthOutput out;
  std::size_t parcel_index = 0;
  for (WeedClass cls : all_weed_classes()) {
    const std::size_t count = cfg.class_counts[static_cast<std::size_t>(cls)];
    for (std::size_t j = 0; j < count; ++j, ++parcel_index) {
      Rng rng(derive_seed(cfg.seed, "parcel", parcel_index));
      const double event_day = static_cast<double>(
          event_lo + static_cast<long>(rng.below(
                         static_cast<std::uint64_t>(event_hi - event_lo + 1))));
      const std::size_t n_pixels =
          cfg.pixels_per_parcel_min +
          static_cast<std::size_t>(rng.below(cfg.pixels_per_parcel_max -
                                             cfg.pixels_per_parcel_min + 1));
      const char* orchard = kOrchards[rng.below(std::size(kOrchards))];

      std::vector<double> cloud(dates.size(), 0.0);
      for (std::size_t d = 0; d < dates.size(); ++d) {
        if (rng.uniform() < cfg.cloud_rate) {
          cloud[d] = rng.uniform(0.05, 0.95);
        }
      }

      char parcel_id[16];
      std::snprintf(parcel_id, sizeof(parcel_id), "P%05zu", parcel_index + 1);
      ParcelRecord parcel;
      parcel.parcel_id = parcel_id;
      parcel.orchard_type = orchard;
      parcel.label = cls;

      const double factor = factors[static_cast<std::size_t>(cls)];
      for (std::size_t px = 0; px < n_pixels; ++px) {
        char pixel_id[32];
        std::snprintf(pixel_id, sizeof(pixel_id), "%s_x%03zu", parcel_id, px);
        parcel.pixel_ids.push_back(pixel_id);
        for (std::size_t d = 0; d < dates.size(); ++d) {
          const double t = static_cast<double>(days_between(cfg.window_start, dates[d]));
          const double ndvi =
              class_signature_scaled(cls, event_day, t, factor, cfg.signature);
          const double soil = factor * soil_exposure(cls, event_day, t, cfg.signature);
          std::vector<double> refl = synth_reflectances(sensor, ndvi, soil);
          if (cfg.noise_sd > 0.0) {
            for (double& v : refl) {
              v = clamp01(v + rng.normal(0.0, cfg.noise_sd));
            }
          }
          SpectralObservation obs;
          obs.pixel_id = pixel_id;
          obs.parcel_id = parcel_id;
          obs.date = dates[d];
          obs.sensor = cfg.sensor;
          obs.reflectances = std::move(refl);
          obs.cloud_fraction = cloud[d];
          out.observations.push_back(std::move(obs));
        }
      }
      out.parcels.push_back(std::move(parcel));
    }
  }
  return out;
}

SynthConfig synth_config_from_kv(const std::map<std::string, std::string>& kv) {
  SynthConfig cfg;
  for (const auto& [key, value] : kv) {
    const auto config_date = [&](const std::string& text) {
      try {
        return parse_date(text);
      } catch (const Error& e) {
        throw Error(ErrorCode::ConfigError, key + ": " + e.what());
      }
    };
    if (key == "sensor") {
      cfg.sensor = parse_sensor_id(value);
    } else if (key == "window-start") {
      cfg.window_start = config_date(value);
    } else if (key == "window-end") {
      cfg.window_end = config_date(value);
    } else if (key == "class-counts") {
      const auto parts = split_config_list(value);
      if (parts.size() != kNumClasses) {
        throw Error(ErrorCode::ConfigError,
                    "class-counts needs " + std::to_string(kNumClasses) +
                        " comma-separated values");
      }
      for (std::size_t i = 0; i < kNumClasses; ++i) {
        cfg.class_counts[i] =
            static_cast<std::size_t>(parse_config_u64(key, parts[i]));
      }
    } else if (key == "pixels-min") {
      cfg.pixels_per_parcel_min =
          static_cast<std::size_t>(parse_config_u64(key, value));
    } else if (key == "pixels-max") {
      cfg.pixels_per_parcel_max =
          static_cast<std::size_t>(parse_config_u64(key, value));
    } else if (key == "separation") {
      cfg.separation = parse_separation(value);
    } else if (key == "noise-sd") {
      cfg.noise_sd = parse_config_real(key, value);
    } else if (key == "cloud-rate") {
      cfg.cloud_rate = parse_config_real(key, value);
    } else if (key == "revisit-days") {
      cfg.revisit_days = static_cast<int>(parse_config_u64(key, value));
    } else if (key == "seed") {
      cfg.seed = parse_config_u64(key, value);
    } else {
      throw Error(ErrorCode::ConfigError, "unknown config key '" + key + "'");
    }
  }
  return cfg;
}

}  // namespace weedmap
