#include <algorithm>
#include <cmath>

#include "cart.hpp"
#include "weedmap/learn.hpp"

namespace weedmap {

ModelArtifact train_knn(const Dataset& train, const KnnParams& params,
                        std::uint64_t seed) {
  if (train.rows.empty()) {
    throw Error(ErrorCode::EmptyTrainingSet, "knn needs training rows");
  }
  if (params.k < 1 || params.k > train.rows.size()) {
    throw Error(ErrorCode::KTooLarge,
                "k = " + std::to_string(params.k) + " outside [1, " +
                    std::to_string(train.rows.size()) + "]");
  }

  const std::size_t n = train.rows.size();
  const std::size_t f = train.schema.size();

  KnnState state;
  state.n_rows = n;
  state.n_features = f;
  state.matrix.reserve(n * f);
  state.labels.reserve(n);
  for (const auto& row : train.rows) {
    state.matrix.insert(state.matrix.end(), row.values.begin(), row.values.end());
    state.labels.push_back(*row.label);
  }
  state.standardized = params.standardize;

  if (params.standardize) {
    state.feature_means.assign(f, 0.0);
    state.feature_sds.assign(f, 0.0);
    for (std::size_t j = 0; j < f; ++j) {
      double sum = 0.0;
      for (std::size_t i = 0; i < n; ++i) sum += state.matrix[i * f + j];
      const double mean = sum / static_cast<double>(n);
      double ss = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double d = state.matrix[i * f + j] - mean;
        ss += d * d;
      }
      state.feature_means[j] = mean;
      state.feature_sds[j] = std::sqrt(ss / static_cast<double>(n));
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < f; ++j) {
        double& v = state.matrix[i * f + j];
        v = state.feature_sds[j] > 0.0 ? (v - state.feature_means[j]) /
                                             state.feature_sds[j]
                                       : 0.0;
      }
    }
  }

  ModelArtifact model;
  model.kind = ModelKind::KNN;
  model.params = params;
  model.seed = seed;
  model.schema = train.schema;
  model.fingerprint = schema_fingerprint(train.schema);
  model.state = std::move(state);
  return model;
}

namespace detail {

WeedClass knn_predict_row(const KnnState& state, const KnnParams& params,
                          const std::vector<double>& raw_row) {
  const std::size_t f = state.n_features;
  std::vector<double> row(raw_row);
  if (state.standardized) {
    for (std::size_t j = 0; j < f; ++j) {
      row[j] = state.feature_sds[j] > 0.0
                   ? (row[j] - state.feature_means[j]) / state.feature_sds[j]
                   : 0.0;
    }
  }

  std::vector<std::pair<double, std::size_t>> distances;
  distances.reserve(state.n_rows);
  for (std::size_t i = 0; i < state.n_rows; ++i) {
    const double* train_row = state.matrix.data() + i * f;
    double dist = 0.0;
    if (params.distance == DistanceKind::Euclidean) {
      for (std::size_t j = 0; j < f; ++j) {
        const double d = row[j] - train_row[j];
        dist += d * d;
      }
    } else {
      for (std::size_t j = 0; j < f; ++j) {
        dist += std::abs(row[j] - train_row[j]);
      }
    }
    distances.emplace_back(dist, i);
  }
  // Distance ties resolve to the earlier training row.
  std::sort(distances.begin(), distances.end());

  double votes[kNumClasses] = {};
  for (std::size_t r = 0; r < params.k; ++r) {
    votes[static_cast<int>(state.labels[distances[r].second])] += 1.0;
  }
  return static_cast<WeedClass>(argmax_lower_ordinal(votes, kNumClasses));
}

}  // namespace detail

}  // namespace weedmap
