#pragma once

#include <cstddef>
#include <vector>

#include "weedmap/learn.hpp"
#include "weedmap/rng.hpp"

namespace weedmap::detail {

// Row-major feature matrix plus class ordinals, flattened out of a Dataset.
struct TrainMatrix {
  std::size_t n_rows = 0;
  std::size_t n_features = 0;
  std::vector<double> values;
  std::vector<int> labels;

  const double* row(std::size_t i) const { return values.data() + i * n_features; }
  double at(std::size_t i, std::size_t f) const { return values[i * n_features + f]; }
};

TrainMatrix to_matrix(const Dataset& data);

struct CartConfig {
  std::size_t max_depth = 0;  // 0 = unlimited
  std::size_t min_leaf = 1;
  // Classification only: features examined per node; 0 = all.
  std::size_t features_per_split = 0;
};

// Gini-impurity classification tree over the given sample indices
// (duplicates allowed, e.g. a bootstrap draw). Leaves store the majority
// class ordinal, ties toward the lower ordinal. `rng` drives the per-node
// feature subsets.
Tree build_classification_tree(const TrainMatrix& data,
                               const std::vector<std::size_t>& sample,
                               const CartConfig& config, Rng& rng);

// Squared-error regression tree fit to `targets`; leaves store the mean
// target of their samples.
Tree build_regression_tree(const TrainMatrix& data,
                           const std::vector<double>& targets,
                           const std::vector<std::size_t>& sample,
                           const CartConfig& config);

int argmax_lower_ordinal(const double* scores, std::size_t n);

WeedClass knn_predict_row(const KnnState& state, const KnnParams& params,
                          const std::vector<double>& raw_row);

}  // namespace weedmap::detail
