#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "weedmap/dataset.hpp"

namespace weedmap {

enum class ModelKind { RF, GBT, KNN };

std::string model_kind_name(ModelKind kind);
ModelKind parse_model_kind(const std::string& text);

enum class DistanceKind { Euclidean, Manhattan };

std::string distance_kind_name(DistanceKind kind);
DistanceKind parse_distance_kind(const std::string& text);

struct RfParams {
  std::size_t n_trees = 300;
  std::size_t max_depth = 0;           // 0 = unlimited
  std::size_t min_leaf = 1;
  std::size_t features_per_split = 0;  // 0 = round(sqrt(n_features))
  bool bootstrap = true;               // test hook; always on in production runs
};

struct GbtParams {
  std::size_t n_rounds = 100;
  double learning_rate = 0.1;
  std::size_t max_depth = 3;
  std::size_t min_leaf = 1;
};

struct KnnParams {
  std::size_t k = 5;
  DistanceKind distance = DistanceKind::Euclidean;
  bool standardize = true;  // z-score features; tree models consume raw values
};

using Hyperparams = std::variant<RfParams, GbtParams, KnnParams>;

// Axis-split decision tree in preorder layout; node 0 is the root.
// Leaves have feature == -1 and carry the prediction in `value`
// (a class ordinal for classification, a residual step for boosting).
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;
};

struct Tree {
  std::vector<TreeNode> nodes;
  double predict(const std::vector<double>& row) const;
};

struct ForestState {
  std::vector<Tree> trees;
};

struct GbtState {
  std::array<double, kNumClasses> init_scores{};  // log class priors
  std::vector<std::array<Tree, kNumClasses>> rounds;
  std::vector<double> training_loss;  // mean cross-entropy after each round
};

struct KnnState {
  std::size_t n_rows = 0;
  std::size_t n_features = 0;
  std::vector<double> matrix;  // row-major, standardized iff `standardized`
  std::vector<WeedClass> labels;
  bool standardized = false;
  std::vector<double> feature_means;
  std::vector<double> feature_sds;
};

// How the training features were produced; carried so prediction runs can
// rebuild the exact same pipeline without re-supplying flags.
struct FeaturizationSpec {
  SensorId sensor = SensorId::S2;
  Date window_start{};
  Date window_end{};
  int grid_step_days = 10;
  double cloud_threshold = 0.005;
  // Band codes excluded from the feature vector. NDVI is computed from the
  // raw reflectances first, so dropping B08/B04 removes those columns but
  // keeps the index.
  std::vector<std::string> drop_bands;
  // Off by default; when on, the parcel's orchard type joins the feature
  // vector as one-hot columns over `orchard_types` (resolved from the
  // training manifest and carried in the model file).
  bool orchard_onehot = false;
  std::vector<std::string> orchard_types;
};

struct ModelArtifact {
  ModelKind kind = ModelKind::RF;
  Hyperparams params;
  std::uint64_t seed = 0;
  std::string fingerprint;  // schema fingerprint of the training features
  std::vector<std::string> schema;
  std::optional<FeaturizationSpec> featurization;
  std::variant<ForestState, GbtState, KnnState> state;
};

ModelArtifact train_random_forest(const Dataset& train, const RfParams& params,
                                  std::uint64_t seed);

ModelArtifact train_gradient_boosting(const Dataset& train, const GbtParams& params,
                                      std::uint64_t seed);

ModelArtifact train_knn(const Dataset& train, const KnnParams& params,
                        std::uint64_t seed = 0);

ModelArtifact train_model(const Dataset& train, const Hyperparams& params,
                          std::uint64_t seed);

// One label per row; refuses rows whose schema fingerprint differs from the
// model's. All vote/argmax ties break toward the lower class ordinal.
std::vector<WeedClass> predict(const ModelArtifact& model,
                               const std::vector<ParcelFeatureVector>& rows);

struct CvCandidateScore {
  Hyperparams params;
  double mean_weighted_f1 = 0.0;
  std::vector<double> fold_scores;
};

struct CvResult {
  std::size_t best_index = 0;
  Hyperparams best;
  std::vector<CvCandidateScore> candidates;
};

// Stratified k-fold search over the grid; best = highest mean weighted F1,
// ties resolved to the earliest grid position.
CvResult cross_validate(const Dataset& train, ModelKind kind,
                        const std::vector<Hyperparams>& grid, std::size_t folds,
                        std::uint64_t seed);

// Conventional desk-scale search grids used when the caller does not
// override them.
std::vector<Hyperparams> default_grid(ModelKind kind);

// Versioned single-file JSON model format; load rejects unknown versions.
void save_model(const ModelArtifact& model, const std::string& path);
ModelArtifact load_model(const std::string& path);
std::string model_to_json_string(const ModelArtifact& model);
ModelArtifact model_from_json_string(const std::string& text);

}  // namespace weedmap
