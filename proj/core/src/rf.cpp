#include <cmath>

#include "cart.hpp"
#include "weedmap/learn.hpp"

namespace weedmap {

ModelArtifact train_random_forest(const Dataset& train, const RfParams& params,
                                  std::uint64_t seed) {
  if (train.rows.empty()) {
    throw Error(ErrorCode::EmptyTrainingSet, "random forest needs training rows");
  }
  const detail::TrainMatrix matrix = detail::to_matrix(train);

  detail::CartConfig cart;
  cart.max_depth = params.max_depth;
  cart.min_leaf = std::max<std::size_t>(params.min_leaf, 1);
  cart.features_per_split =
      params.features_per_split > 0
          ? params.features_per_split
          : static_cast<std::size_t>(std::llround(
                std::sqrt(static_cast<double>(matrix.n_features))));

  ForestState state;
  state.trees.resize(params.n_trees);
  // One derived stream per tree keeps training reproducible no matter how
  // the trees are scheduled.
  for (std::size_t t = 0; t < params.n_trees; ++t) {
    Rng rng(derive_seed(seed, "rf_tree", t));
    std::vector<std::size_t> sample(matrix.n_rows);
    if (params.bootstrap) {
      for (auto& idx : sample) {
        idx = static_cast<std::size_t>(rng.below(matrix.n_rows));
      }
    } else {
      for (std::size_t i = 0; i < matrix.n_rows; ++i) sample[i] = i;
    }
    state.trees[t] = detail::build_classification_tree(matrix, sample, cart, rng);
  }

  ModelArtifact model;
  model.kind = ModelKind::RF;
  model.params = params;
  model.seed = seed;
  model.schema = train.schema;
  model.fingerprint = schema_fingerprint(train.schema);
  model.state = std::move(state);
  return model;
}

}  // namespace weedmap
