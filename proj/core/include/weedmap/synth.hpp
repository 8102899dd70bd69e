#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "weedmap/dataset.hpp"

namespace weedmap {

// Curve constants for the synthetic per-class NDVI signatures. Everything
// is a named knob so tests can tighten or loosen separability.
struct SignatureParams {
  // Undisturbed seasonal curve: rises from base_low to base_high over
  // base_rise_days, then plateaus.
  double base_low = 0.5;
  double base_high = 0.8;
  double base_rise_days = 60.0;
  // Mowing: abrupt drop at the event, linear regrowth that settles a small
  // residual below the undisturbed curve for the rest of the season.
  double mow_drop = 0.35;
  double mow_recovery_days = 30.0;
  double mow_residual = 0.06;
  // Tillage: collapse to bare-soil NDVI, slow recovery toward its own
  // residual, brightening of the red/SWIR-like bands while soil is exposed.
  double till_soil_ndvi = 0.15;
  double till_recovery_days = 75.0;
  double till_residual = 0.13;
  // Chemical spraying: gradual decline after the event, partial recovery.
  double chem_decline = 0.25;
  double chem_decline_days = 21.0;
  double chem_recovery_fraction = 0.4;
  double chem_recovery_days = 40.0;
};

enum class Separation { High, Medium, Low };

Separation parse_separation(const std::string& text);
std::string separation_name(Separation level);

// Per-class multipliers applied to each signature's deviation from the
// undisturbed curve. "Low" nearly flattens the distinguishing events, which
// pushes minority classes into the majority under any classifier.
std::array<double, kNumClasses> separation_factors(Separation level);

struct SynthConfig {
  SensorId sensor = SensorId::PS8B;
  Date window_start = make_date(2024, 5, 1);
  Date window_end = make_date(2024, 8, 31);
  ClassCounts class_counts{141, 33, 31, 27};
  std::size_t pixels_per_parcel_min = 4;
  std::size_t pixels_per_parcel_max = 25;
  Separation separation = Separation::High;
  std::optional<std::array<double, kNumClasses>> separation_override;
  double noise_sd = 0.02;
  double cloud_rate = 0.2;
  int revisit_days = 0;  // 0 = sensor default (S2: 5, PS8B: 1)
  std::uint64_t seed = 0;
  SignatureParams signature;

  std::array<double, kNumClasses> effective_factors() const {
    return separation_override ? *separation_override
                               : separation_factors(separation);
  }
  int effective_revisit_days() const {
    if (revisit_days > 0) return revisit_days;
    return sensor == SensorId::S2 ? 5 : 1;
  }
};

// Canonical (fully separated) NDVI signature of a class, as a function of
// days since window start. event_day is ignored for NoPractice.
double class_signature(WeedClass cls, double event_day, double t,
                       const SignatureParams& params = {});

// Signature with the class deviation scaled by `factor` toward the
// undisturbed curve; factor 1 reproduces class_signature.
double class_signature_scaled(WeedClass cls, double event_day, double t,
                              double factor, const SignatureParams& params = {});

// Fraction of bare soil visible at day t (tillage exposes soil at the
// event and regrows over the recovery window); drives band brightness.
double soil_exposure(WeedClass cls, double event_day, double t,
                     const SignatureParams& params = {});

// Noiseless band reflectances consistent with the NDVI target: the sensor's
// (nir, red) pair is back-solved exactly, the remaining bands follow fixed
// per-band responses to vegetation and soil brightness.
std::vector<double> synth_reflectances(const Sensor& sensor, double ndvi_target,
                                       double soil_fraction);

struct SynthOutput {
  std::vector<SpectralObservation> observations;
  std::vector<ParcelRecord> parcels;
};

// Deterministic given cfg.seed: per-parcel streams are derived from
// (seed, parcel index), so generation order cannot leak between parcels.
SynthOutput generate_dataset(const SynthConfig& cfg);

// Flat key=value form used by config files and the CLI; unknown keys are
// rejected.
SynthConfig synth_config_from_kv(const std::map<std::string, std::string>& kv);

}  // namespace weedmap
