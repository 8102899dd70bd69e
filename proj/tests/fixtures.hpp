#pragma once

#include <unistd.h>

#include <filesystem>
#include <string>
#include <vector>

#include "weedmap/dataset.hpp"
#include "weedmap/pipeline.hpp"
#include "weedmap/synth.hpp"

namespace weedmap::testfix {

// Self-cleaning scratch directory, unique per instance.
struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("weedmap_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter()++));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }

 private:
  static int& counter() {
    static int n = 0;
    return n;
  }
};

// Small synthetic scene shared by the learner tests; generated once.
// High separation, modest noise, coarse revisit to keep test runtime down.
inline SynthConfig small_scene_config(Separation separation = Separation::High,
                                      std::uint64_t seed = 42) {
  SynthConfig cfg;
  cfg.sensor = SensorId::PS8B;
  cfg.class_counts = {24, 12, 12, 12};
  cfg.pixels_per_parcel_min = 3;
  cfg.pixels_per_parcel_max = 6;
  cfg.separation = separation;
  cfg.noise_sd = 0.01;
  cfg.revisit_days = 5;
  cfg.seed = seed;
  return cfg;
}

inline Dataset featurized_dataset(const SynthConfig& cfg) {
  SynthOutput scene = generate_dataset(cfg);
  FeaturizationSpec spec;
  spec.sensor = cfg.sensor;
  spec.window_start = cfg.window_start;
  spec.window_end = cfg.window_end;
  FeaturizeResult feat = featurize(scene.observations, scene.parcels, spec);
  return make_dataset(std::move(feat.parcels));
}

// The default small scene, split 80/20. Built lazily, then reused.
struct SceneSplit {
  Dataset train;
  Dataset test;
};

inline const SceneSplit& shared_scene() {
  static const SceneSplit split = [] {
    Dataset data = featurized_dataset(small_scene_config());
    SplitSpec spec;
    spec.test_fraction = 0.2;
    spec.seed = 42;
    SplitResult parts = stratified_split(data, spec);
    return SceneSplit{std::move(parts.train), std::move(parts.test)};
  }();
  return split;
}

}  // namespace weedmap::testfix
