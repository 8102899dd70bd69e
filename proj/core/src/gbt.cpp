#include <algorithm>
#include <cmath>

#include "cart.hpp"
#include "weedmap/learn.hpp"

namespace weedmap {

namespace {

void softmax_row(const double* scores, double* probs) {
  double max_score = scores[0];
  for (std::size_t c = 1; c < kNumClasses; ++c) {
    max_score = std::max(max_score, scores[c]);
  }
  double sum = 0.0;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    probs[c] = std::exp(scores[c] - max_score);
    sum += probs[c];
  }
  for (std::size_t c = 0; c < kNumClasses; ++c) probs[c] /= sum;
}

}  // namespace

// Additive model: one squared-error tree per class per round, fit to the
// softmax cross-entropy residuals y_ic - p_ic, stepped by the learning
// rate. Scores start at the log class priors, so a one-class training set
// is solved before the first round.
ModelArtifact train_gradient_boosting(const Dataset& train, const GbtParams& params,
                                      std::uint64_t seed) {
  if (train.rows.empty()) {
    throw Error(ErrorCode::EmptyTrainingSet, "gradient boosting needs training rows");
  }
  if (!(params.learning_rate > 0.0)) {
    throw Error(ErrorCode::ConfigError, "learning rate must be positive");
  }
  const detail::TrainMatrix matrix = detail::to_matrix(train);
  const std::size_t n = matrix.n_rows;

  detail::CartConfig cart;
  cart.max_depth = params.max_depth;
  cart.min_leaf = std::max<std::size_t>(params.min_leaf, 1);

  GbtState state;
  {
    std::size_t counts[kNumClasses] = {};
    for (int label : matrix.labels) counts[label]++;
    for (std::size_t c = 0; c < kNumClasses; ++c) {
      const double prior =
          std::max(static_cast<double>(counts[c]) / static_cast<double>(n), 1e-12);
      state.init_scores[c] = std::log(prior);
    }
  }

  std::vector<double> scores(n * kNumClasses);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < kNumClasses; ++c) {
      scores[i * kNumClasses + c] = state.init_scores[c];
    }
  }

  std::vector<std::size_t> all_rows(n);
  for (std::size_t i = 0; i < n; ++i) all_rows[i] = i;

  std::vector<double> probs(n * kNumClasses);
  std::vector<double> residuals(n);
  state.rounds.reserve(params.n_rounds);
  state.training_loss.reserve(params.n_rounds);

  for (std::size_t round = 0; round < params.n_rounds; ++round) {
    for (std::size_t i = 0; i < n; ++i) {
      softmax_row(&scores[i * kNumClasses], &probs[i * kNumClasses]);
    }
    std::array<Tree, kNumClasses> round_trees;
    for (std::size_t c = 0; c < kNumClasses; ++c) {
      for (std::size_t i = 0; i < n; ++i) {
        const double y = matrix.labels[i] == static_cast<int>(c) ? 1.0 : 0.0;
        residuals[i] = y - probs[i * kNumClasses + c];
      }
      round_trees[c] =
          detail::build_regression_tree(matrix, residuals, all_rows, cart);
      for (std::size_t i = 0; i < n; ++i) {
        scores[i * kNumClasses + c] +=
            params.learning_rate * round_trees[c].predict(train.rows[i].values);
      }
    }
    state.rounds.push_back(std::move(round_trees));

    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      softmax_row(&scores[i * kNumClasses], &probs[i * kNumClasses]);
      const double p = std::max(probs[i * kNumClasses + matrix.labels[i]], 1e-15);
      loss -= std::log(p);
    }
    state.training_loss.push_back(loss / static_cast<double>(n));
  }

  ModelArtifact model;
  model.kind = ModelKind::GBT;
  model.params = params;
  model.seed = seed;
  model.schema = train.schema;
  model.fingerprint = schema_fingerprint(train.schema);
  model.state = std::move(state);
  return model;
}

}  // namespace weedmap
