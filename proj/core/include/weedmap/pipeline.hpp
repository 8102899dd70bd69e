#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "weedmap/dataset.hpp"
#include "weedmap/eval.hpp"
#include "weedmap/learn.hpp"

namespace weedmap {

struct GridOverrides {
  std::vector<std::size_t> rf_n_trees;
  std::vector<std::size_t> rf_max_depth;
  std::vector<std::size_t> gbt_n_rounds;
  std::vector<double> gbt_learning_rate;
  std::vector<std::size_t> gbt_max_depth;
  std::vector<std::size_t> knn_k;
  std::vector<DistanceKind> knn_distance;
};

struct RunConfig {
  std::string observations_path;
  std::string parcels_path;
  std::string out_dir;
  FeaturizationSpec featurization{.sensor = SensorId::S2,
                                  .window_start = make_date(2024, 5, 1),
                                  .window_end = make_date(2024, 8, 31)};
  double test_fraction = 0.2;
  double undersample_fraction = 0.006;
  ModelKind model = ModelKind::RF;
  std::size_t folds = 5;
  std::uint64_t seed = 0;
  bool split_by_parcel_hash = false;
  GridOverrides grid;
};

// Build RunConfig from flat key=value pairs (config file keys and CLI flag
// names coincide); unknown keys are rejected.
RunConfig run_config_from_kv(const std::map<std::string, std::string>& kv);

struct FeaturizeResult {
  std::vector<ParcelFeatureVector> parcels;
  std::vector<std::string> schema;
  std::vector<std::string> orchard_types;    // one-hot universe when enabled
  std::size_t n_observations = 0;
  std::size_t n_removed_cloudy = 0;
  std::vector<std::string> dropped_pixels;   // no clear observations
  std::vector<std::string> dropped_parcels;  // no surviving pixels
  std::vector<std::string> warnings;
};

// Observations + manifest -> aggregated parcel feature vectors on the
// featurization grid. Parcels appear in manifest order.
FeaturizeResult featurize(const std::vector<SpectralObservation>& observations,
                          const std::vector<ParcelRecord>& parcels,
                          const FeaturizationSpec& spec);

struct RunOutput {
  ModelArtifact model;
  CvResult cv;
  EvaluationReport report;
  std::vector<std::string> written_files;
  std::vector<std::string> warnings;
};

// Full training pipeline: ingest, featurize, split, undersample,
// cross-validate, fit the winner, evaluate on the held-out test split, and
// write model/report/manifest files under cfg.out_dir.
RunOutput run_pipeline(const RunConfig& cfg);

struct PredictConfig {
  std::string model_path;
  std::string observations_path;
  std::string parcels_path;
  std::string out_path;
};

struct Prediction {
  std::string parcel_id;
  WeedClass predicted;
};

// Applies a saved model to new observations using the featurization spec
// stored in the model file; writes parcel_id,predicted_class CSV.
std::vector<Prediction> predict_pipeline(const PredictConfig& cfg);

std::vector<Hyperparams> build_grid(ModelKind kind, const GridOverrides& overrides);

}  // namespace weedmap
