#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "weedmap/eval.hpp"
#include "weedmap/learn.hpp"
#include "weedmap/synth.hpp"

#include "fixtures.hpp"

using namespace weedmap;

namespace {

bool same_observations(const std::vector<SpectralObservation>& a,
                       const std::vector<SpectralObservation>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].pixel_id != b[i].pixel_id) return false;
    if (a[i].parcel_id != b[i].parcel_id) return false;
    if (a[i].date != b[i].date) return false;
    if (a[i].reflectances != b[i].reflectances) return false;
    if (a[i].cloud_fraction != b[i].cloud_fraction) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("no-practice curve moves slower than the mowing event step") {
  SignatureParams params;
  for (double event_day : {30.0, 50.0, 70.0, 90.0}) {
    double max_daily = 0.0;
    for (int t = 1; t <= 122; ++t) {
      max_daily = std::max(max_daily,
                           std::abs(class_signature(WeedClass::NoPractice, event_day,
                                                    static_cast<double>(t), params) -
                                    class_signature(WeedClass::NoPractice, event_day,
                                                    static_cast<double>(t - 1), params)));
    }
    double event_step = class_signature(WeedClass::Mowing, event_day, event_day - 1.0,
                                        params) -
                        class_signature(WeedClass::Mowing, event_day, event_day + 1.0,
                                        params);
    CHECK(max_daily < event_step);
  }
}

TEST_CASE("mowing drops at least 0.3 across the event") {
  double before = class_signature(WeedClass::Mowing, 40.0, 39.0);
  double after = class_signature(WeedClass::Mowing, 40.0, 41.0);
  CHECK(before - after >= 0.3);
}

TEST_CASE("tillage touches bare-soil ndvi below the spraying minimum") {
  SignatureParams params;
  double event_day = 50.0;
  double till_at_event = class_signature(WeedClass::Tillage, event_day, event_day + 0.5,
                                         params);
  CHECK(till_at_event == doctest::Approx(params.till_soil_ndvi).epsilon(0.05));

  double chem_min = 1.0;
  for (int t = 0; t <= 122; ++t) {
    chem_min = std::min(chem_min, class_signature(WeedClass::ChemicalSpraying,
                                                  event_day, static_cast<double>(t),
                                                  params));
  }
  CHECK(till_at_event < chem_min);
}

TEST_CASE("noiseless signatures stay in ndvi range") {
  for (WeedClass cls : all_weed_classes()) {
    for (double event_day : {24.0, 61.0, 98.0}) {
      for (int t = 0; t <= 122; ++t) {
        double v = class_signature(cls, event_day, static_cast<double>(t));
        CHECK(v >= -1.0);
        CHECK(v <= 1.0);
      }
    }
  }
}

TEST_CASE("scaling the signature interpolates toward the undisturbed curve") {
  for (WeedClass cls : {WeedClass::Mowing, WeedClass::Tillage,
                        WeedClass::ChemicalSpraying}) {
    for (int t = 0; t <= 122; t += 7) {
      double td = static_cast<double>(t);
      CHECK(class_signature_scaled(cls, 50.0, td, 1.0) ==
            doctest::Approx(class_signature(cls, 50.0, td)).epsilon(1e-12));
      CHECK(class_signature_scaled(cls, 50.0, td, 0.0) ==
            doctest::Approx(class_signature(WeedClass::NoPractice, 50.0, td))
                .epsilon(1e-12));
    }
  }
}

TEST_CASE("soil exposure is a tillage-only transient") {
  SignatureParams params;
  CHECK(soil_exposure(WeedClass::Tillage, 50.0, 51.0, params) > 0.5);
  CHECK(soil_exposure(WeedClass::Tillage, 50.0, 49.0, params) == 0.0);
  CHECK(soil_exposure(WeedClass::Tillage, 50.0,
                      50.0 + params.till_recovery_days + 1.0, params) == 0.0);
  CHECK(soil_exposure(WeedClass::Mowing, 50.0, 51.0, params) == 0.0);
  CHECK(soil_exposure(WeedClass::NoPractice, 50.0, 51.0, params) == 0.0);
}

TEST_CASE("reflectances back-solve the ndvi target exactly") {
  for (SensorId id : {SensorId::S2, SensorId::PS8B}) {
    const Sensor& sensor = Sensor::get(id);
    auto [nir, red] = sensor.ndvi_band_pair();
    for (double target : {-0.2, 0.0, 0.15, 0.5, 0.8}) {
      for (double soil : {0.0, 0.5, 1.0}) {
        std::vector<double> refl = synth_reflectances(sensor, target, soil);
        REQUIRE(refl.size() == sensor.band_count());
        for (double v : refl) {
          CHECK(v >= 0.0);
          CHECK(v <= 1.0);
        }
        CHECK(ndvi(refl[nir], refl[red]) == doctest::Approx(target).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("default class counts produce 232 parcels") {
  SynthConfig cfg;
  cfg.seed = 12;
  cfg.pixels_per_parcel_min = 1;
  cfg.pixels_per_parcel_max = 2;
  cfg.revisit_days = 20;  // keep this configuration cheap
  SynthOutput out = generate_dataset(cfg);
  CHECK(out.parcels.size() == 232);

  ClassCounts counts{};
  for (const auto& parcel : out.parcels) {
    REQUIRE(parcel.label.has_value());
    counts[static_cast<std::size_t>(*parcel.label)]++;
  }
  CHECK(counts == ClassCounts{141, 33, 31, 27});

  std::set<std::string> parcel_ids;
  for (const auto& parcel : out.parcels) parcel_ids.insert(parcel.parcel_id);
  CHECK(parcel_ids.size() == 232);
}

TEST_CASE("custom class counts are honored exactly") {
  SynthConfig cfg;
  cfg.class_counts = {3, 5, 0, 2};
  cfg.pixels_per_parcel_min = 1;
  cfg.pixels_per_parcel_max = 3;
  cfg.revisit_days = 10;
  cfg.seed = 4;
  SynthOutput out = generate_dataset(cfg);
  REQUIRE(out.parcels.size() == 10);
  ClassCounts counts{};
  for (const auto& parcel : out.parcels) {
    counts[static_cast<std::size_t>(*parcel.label)]++;
  }
  CHECK(counts == ClassCounts{3, 5, 0, 2});
}

TEST_CASE("noiseless single-pixel parcels reproduce the signature exactly") {
  SynthConfig cfg;
  cfg.sensor = SensorId::PS8B;
  cfg.class_counts = {2, 2, 2, 2};
  cfg.pixels_per_parcel_min = 1;
  cfg.pixels_per_parcel_max = 1;
  cfg.noise_sd = 0.0;
  cfg.cloud_rate = 0.0;
  cfg.revisit_days = 1;
  cfg.seed = 99;
  SynthOutput out = generate_dataset(cfg);

  const Sensor& sensor = Sensor::get(cfg.sensor);
  auto [nir, red] = sensor.ndvi_band_pair();
  auto factors = cfg.effective_factors();

  std::map<std::string, std::vector<const SpectralObservation*>> by_parcel;
  for (const auto& obs : out.observations) by_parcel[obs.parcel_id].push_back(&obs);

  int span = days_between(cfg.window_start, cfg.window_end);
  long event_lo = std::lround(0.2 * span);
  long event_hi = std::lround(0.8 * span);

  for (const auto& parcel : out.parcels) {
    const auto& obs_list = by_parcel.at(parcel.parcel_id);
    REQUIRE(!obs_list.empty());
    double factor = factors[static_cast<std::size_t>(*parcel.label)];

    // The event day is parcel-private; exactness means some admissible
    // integer day explains every observation at once.
    bool explained = false;
    for (long event = event_lo; event <= event_hi && !explained; ++event) {
      bool all_match = true;
      for (const auto* obs : obs_list) {
        double t = static_cast<double>(days_between(cfg.window_start, obs->date));
        double expect = class_signature_scaled(*parcel.label,
                                               static_cast<double>(event), t, factor);
        double got = ndvi(obs->reflectances[nir], obs->reflectances[red]);
        if (std::abs(got - expect) > 1e-9) {
          all_match = false;
          break;
        }
      }
      explained = all_match;
    }
    CHECK(explained);
  }
}

TEST_CASE("generated reflectances are valid observations") {
  SynthConfig cfg = testfix::small_scene_config(Separation::Medium, 31);
  cfg.class_counts = {6, 4, 4, 4};
  SynthOutput out = generate_dataset(cfg);
  const Sensor& sensor = Sensor::get(cfg.sensor);
  CHECK(!out.observations.empty());
  for (const auto& obs : out.observations) {
    CHECK_NOTHROW(validate_observation(obs, sensor));
    for (double v : obs.reflectances) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
  }
}

TEST_CASE("observation dates follow the revisit cadence") {
  SynthConfig cfg;
  cfg.sensor = SensorId::S2;
  cfg.class_counts = {2, 2, 2, 2};
  cfg.pixels_per_parcel_min = 1;
  cfg.pixels_per_parcel_max = 2;
  cfg.seed = 8;
  CHECK(cfg.effective_revisit_days() == 5);
  SynthOutput out = generate_dataset(cfg);
  for (const auto& obs : out.observations) {
    CHECK(days_between(cfg.window_start, obs.date) % 5 == 0);
  }

  SynthConfig daily = cfg;
  daily.sensor = SensorId::PS8B;
  CHECK(daily.effective_revisit_days() == 1);
}

TEST_CASE("generation is deterministic in the seed") {
  SynthConfig cfg;
  cfg.class_counts = {4, 3, 3, 3};
  cfg.pixels_per_parcel_min = 2;
  cfg.pixels_per_parcel_max = 5;
  cfg.revisit_days = 7;
  cfg.seed = 21;
  SynthOutput a = generate_dataset(cfg);
  SynthOutput b = generate_dataset(cfg);
  CHECK(same_observations(a.observations, b.observations));
  REQUIRE(a.parcels.size() == b.parcels.size());
  for (std::size_t i = 0; i < a.parcels.size(); ++i) {
    CHECK(a.parcels[i].parcel_id == b.parcels[i].parcel_id);
    CHECK(a.parcels[i].pixel_ids == b.parcels[i].pixel_ids);
    CHECK(a.parcels[i].orchard_type == b.parcels[i].orchard_type);
  }

  SynthConfig other = cfg;
  other.seed = 22;
  CHECK_FALSE(same_observations(generate_dataset(other).observations, a.observations));
}

TEST_CASE("cloud flags appear at roughly the configured rate") {
  SynthConfig cfg;
  cfg.class_counts = {4, 2, 2, 2};
  cfg.pixels_per_parcel_min = 2;
  cfg.pixels_per_parcel_max = 4;
  cfg.cloud_rate = 0.5;
  cfg.revisit_days = 2;
  cfg.seed = 17;
  SynthOutput out = generate_dataset(cfg);
  std::size_t cloudy = 0;
  for (const auto& obs : out.observations) {
    bool flagged = obs.cloud_fraction > 0.0;
    if (flagged) {
      CHECK(obs.cloud_fraction >= 0.05);
      CHECK(obs.cloud_fraction <= 0.95);
      ++cloudy;
    }
  }
  double rate = static_cast<double>(cloudy) / static_cast<double>(out.observations.size());
  CHECK(rate > 0.4);
  CHECK(rate < 0.6);
}

TEST_CASE("separation levels parse and name round-trip") {
  for (Separation s : {Separation::High, Separation::Medium, Separation::Low}) {
    CHECK(parse_separation(separation_name(s)) == s);
  }
  CHECK_THROWS_AS(parse_separation("extreme"), Error);
  auto high = separation_factors(Separation::High);
  for (double f : high) CHECK(f == 1.0);
  auto low = separation_factors(Separation::Low);
  CHECK(low[0] < high[0]);
  CHECK(low[2] < low[1]);
}

TEST_CASE("synth config rejects inverted windows and bad keys") {
  std::map<std::string, std::string> kv = {{"window-start", "2024-08-31"},
                                           {"window-end", "2024-05-01"}};
  SynthConfig cfg = synth_config_from_kv(kv);
  CHECK_THROWS_AS(generate_dataset(cfg), Error);

  CHECK_THROWS_AS(synth_config_from_kv({{"no-such-key", "1"}}), Error);
  CHECK_THROWS_AS(synth_config_from_kv({{"noise-sd", "abc"}}), Error);

  SynthConfig parsed = synth_config_from_kv({{"sensor", "s2"},
                                             {"class-counts", "5,4,3,2"},
                                             {"separation", "medium"},
                                             {"seed", "77"}});
  CHECK(parsed.sensor == SensorId::S2);
  CHECK(parsed.class_counts == ClassCounts{5, 4, 3, 2});
  CHECK(parsed.separation == Separation::Medium);
  CHECK(parsed.seed == 77);
}

TEST_CASE("high separation supports a 1-nn classifier at default noise") {
  SynthConfig cfg = testfix::small_scene_config(Separation::High, 5);
  cfg.class_counts = {48, 24, 24, 24};
  cfg.pixels_per_parcel_min = 4;
  cfg.pixels_per_parcel_max = 25;
  cfg.noise_sd = 0.02;
  Dataset data = testfix::featurized_dataset(cfg);
  SplitSpec spec;
  spec.test_fraction = 0.2;
  spec.seed = 5;
  SplitResult split = stratified_split(data, spec);
  KnnParams params;
  params.k = 1;
  ModelArtifact model = train_knn(split.train, params);
  std::vector<WeedClass> truth;
  for (const auto& r : split.test.rows) truth.push_back(*r.label);
  double wf1 = weighted_f1(
      per_class_metrics(confusion_matrix(truth, predict(model, split.test.rows))));
  CHECK(wf1 >= 0.85);  // 0.921 on this seed
}
