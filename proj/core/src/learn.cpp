#include "weedmap/learn.hpp"

#include <algorithm>
#include <cmath>

#include "cart.hpp"
#include "weedmap/eval.hpp"

namespace weedmap {

std::string model_kind_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::RF: return "rf";
    case ModelKind::GBT: return "gbt";
    case ModelKind::KNN: return "knn";
  }
  return "?";
}

ModelKind parse_model_kind(const std::string& text) {
  if (text == "rf") return ModelKind::RF;
  if (text == "gbt" || text == "xgb") return ModelKind::GBT;
  if (text == "knn") return ModelKind::KNN;
  throw Error(ErrorCode::ConfigError, "unknown model kind '" + text + "'");
}

std::string distance_kind_name(DistanceKind kind) {
  return kind == DistanceKind::Manhattan ? "manhattan" : "euclidean";
}

DistanceKind parse_distance_kind(const std::string& text) {
  if (text == "euclidean") return DistanceKind::Euclidean;
  if (text == "manhattan") return DistanceKind::Manhattan;
  throw Error(ErrorCode::ConfigError, "unknown distance '" + text + "'");
}

double Tree::predict(const std::vector<double>& row) const {
  int node = 0;
  while (nodes[node].feature >= 0) {
    node = row[nodes[node].feature] <= nodes[node].threshold ? nodes[node].left
                                                             : nodes[node].right;
  }
  return nodes[node].value;
}

ModelArtifact train_model(const Dataset& train, const Hyperparams& params,
                          std::uint64_t seed) {
  return std::visit(
      [&](const auto& p) -> ModelArtifact {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, RfParams>) {
          return train_random_forest(train, p, seed);
        } else if constexpr (std::is_same_v<P, GbtParams>) {
          return train_gradient_boosting(train, p, seed);
        } else {
          return train_knn(train, p, seed);
        }
      },
      params);
}

namespace {

WeedClass predict_row(const ModelArtifact& model, const std::vector<double>& row) {
  if (const auto* forest = std::get_if<ForestState>(&model.state)) {
    double votes[kNumClasses] = {};
    for (const Tree& tree : forest->trees) {
      votes[static_cast<int>(tree.predict(row))] += 1.0;
    }
    return static_cast<WeedClass>(detail::argmax_lower_ordinal(votes, kNumClasses));
  }
  if (const auto* gbt = std::get_if<GbtState>(&model.state)) {
    const auto& params = std::get<GbtParams>(model.params);
    double scores[kNumClasses];
    for (std::size_t c = 0; c < kNumClasses; ++c) scores[c] = gbt->init_scores[c];
    for (const auto& round : gbt->rounds) {
      for (std::size_t c = 0; c < kNumClasses; ++c) {
        scores[c] += params.learning_rate * round[c].predict(row);
      }
    }
    return static_cast<WeedClass>(detail::argmax_lower_ordinal(scores, kNumClasses));
  }
  const auto& knn = std::get<KnnState>(model.state);
  return detail::knn_predict_row(knn, std::get<KnnParams>(model.params), row);
}

}  // namespace

std::vector<WeedClass> predict(const ModelArtifact& model,
                               const std::vector<ParcelFeatureVector>& rows) {
  std::vector<WeedClass> out;
  out.reserve(rows.size());
  for (const auto& row : rows) {
    if (schema_fingerprint(row.schema) != model.fingerprint) {
      throw Error(ErrorCode::SchemaMismatch,
                  "parcel " + row.parcel_id +
                      " was featurized under a different schema than the model");
    }
    out.push_back(predict_row(model, row.values));
  }
  return out;
}

namespace {

// Round-robin assignment of shuffled per-class rows; every fold sees every
// class.
std::vector<std::size_t> fold_assignment(const Dataset& data, std::size_t folds,
                                         std::uint64_t seed) {
  std::vector<std::size_t> assignment(data.rows.size());
  for (WeedClass cls : all_weed_classes()) {
    std::vector<std::size_t> indices;
    for (std::size_t i = 0; i < data.rows.size(); ++i) {
      if (*data.rows[i].label == cls) indices.push_back(i);
    }
    if (indices.empty()) continue;
    if (indices.size() < folds) {
      throw Error(ErrorCode::ClassSmallerThanFolds,
                  weed_class_name(cls) + " has " + std::to_string(indices.size()) +
                      " rows, fewer than " + std::to_string(folds) + " folds");
    }
    Rng rng(derive_seed(seed, "cv_fold", static_cast<std::uint64_t>(cls)));
    rng.shuffle(indices);
    for (std::size_t i = 0; i < indices.size(); ++i) {
      assignment[indices[i]] = i % folds;
    }
  }
  return assignment;
}

}  // namespace

CvResult cross_validate(const Dataset& train, ModelKind kind,
                        const std::vector<Hyperparams>& grid, std::size_t folds,
                        std::uint64_t seed) {
  if (folds < 2) {
    throw Error(ErrorCode::ConfigError, "cross-validation needs at least 2 folds");
  }
  if (grid.empty()) {
    throw Error(ErrorCode::ConfigError, "hyperparameter grid is empty");
  }
  const std::vector<std::size_t> assignment = fold_assignment(train, folds, seed);

  CvResult result;
  result.candidates.reserve(grid.size());
  for (std::size_t g = 0; g < grid.size(); ++g) {
    CvCandidateScore score;
    score.params = grid[g];
    score.fold_scores.reserve(folds);
    for (std::size_t fold = 0; fold < folds; ++fold) {
      Dataset fit;
      fit.schema = train.schema;
      std::vector<ParcelFeatureVector> held_out;
      std::vector<WeedClass> truth;
      for (std::size_t i = 0; i < train.rows.size(); ++i) {
        if (assignment[i] == fold) {
          held_out.push_back(train.rows[i]);
          truth.push_back(*train.rows[i].label);
        } else {
          fit.rows.push_back(train.rows[i]);
        }
      }
      const ModelArtifact model = train_model(
          fit, grid[g], derive_seed(seed, "cv_train", g * folds + fold));
      const std::vector<WeedClass> predicted = predict(model, held_out);
      const ConfusionMatrix cm = confusion_matrix(truth, predicted);
      score.fold_scores.push_back(weighted_f1(per_class_metrics(cm)));
    }
    double sum = 0.0;
    for (double s : score.fold_scores) sum += s;
    score.mean_weighted_f1 = sum / static_cast<double>(folds);
    result.candidates.push_back(std::move(score));
  }

  result.best_index = 0;
  for (std::size_t g = 1; g < grid.size(); ++g) {
    if (result.candidates[g].mean_weighted_f1 >
        result.candidates[result.best_index].mean_weighted_f1) {
      result.best_index = g;
    }
  }
  result.best = grid[result.best_index];
  return result;
}

std::vector<Hyperparams> default_grid(ModelKind kind) {
  std::vector<Hyperparams> grid;
  switch (kind) {
    case ModelKind::RF:
      for (std::size_t n_trees : {100, 300, 500}) {
        for (std::size_t depth : {8, 0}) {
          RfParams p;
          p.n_trees = n_trees;
          p.max_depth = depth;
          grid.emplace_back(p);
        }
      }
      break;
    case ModelKind::GBT:
      for (std::size_t rounds : {100, 300}) {
        for (double lr : {0.05, 0.1}) {
          for (std::size_t depth : {3, 5}) {
            GbtParams p;
            p.n_rounds = rounds;
            p.learning_rate = lr;
            p.max_depth = depth;
            grid.emplace_back(p);
          }
        }
      }
      break;
    case ModelKind::KNN:
      for (std::size_t k : {3, 5, 7, 11}) {
        for (DistanceKind distance :
             {DistanceKind::Euclidean, DistanceKind::Manhattan}) {
          KnnParams p;
          p.k = k;
          p.distance = distance;
          grid.emplace_back(p);
        }
      }
      break;
  }
  return grid;
}

}  // namespace weedmap
