#include "cart.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace weedmap::detail {

TrainMatrix to_matrix(const Dataset& data) {
  TrainMatrix m;
  m.n_rows = data.rows.size();
  m.n_features = data.schema.size();
  m.values.reserve(m.n_rows * m.n_features);
  m.labels.reserve(m.n_rows);
  for (const auto& row : data.rows) {
    m.values.insert(m.values.end(), row.values.begin(), row.values.end());
    m.labels.push_back(static_cast<int>(*row.label));
  }
  return m;
}

int argmax_lower_ordinal(const double* scores, std::size_t n) {
  int best = 0;
  for (std::size_t c = 1; c < n; ++c) {
    if (scores[c] > scores[best]) best = static_cast<int>(c);
  }
  return best;
}

namespace {

double gini(const std::size_t* counts, std::size_t total) {
  if (total == 0) return 0.0;
  double sum_sq = 0.0;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    const double p = static_cast<double>(counts[c]) / static_cast<double>(total);
    sum_sq += p * p;
  }
  return 1.0 - sum_sq;
}

struct SplitChoice {
  bool found = false;
  std::size_t feature = 0;
  double threshold = 0.0;
  double score = std::numeric_limits<double>::infinity();
};

// (value, payload) pairs sorted by value; payload is a label or a target index.
struct SortedColumn {
  std::vector<std::pair<double, std::size_t>> entries;
};

void fill_sorted_column(const TrainMatrix& data,
                        const std::vector<std::size_t>& sample, std::size_t feature,
                        SortedColumn& column) {
  column.entries.clear();
  column.entries.reserve(sample.size());
  for (std::size_t idx : sample) {
    column.entries.emplace_back(data.at(idx, feature), idx);
  }
  std::sort(column.entries.begin(), column.entries.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
}

class ClassificationBuilder {
 public:
  ClassificationBuilder(const TrainMatrix& data, const CartConfig& config, Rng& rng)
      : data_(data), config_(config), rng_(rng) {}

  Tree build(const std::vector<std::size_t>& sample) {
    Tree tree;
    grow(tree, sample, 0);
    return tree;
  }

 private:
  int make_leaf(Tree& tree, const std::vector<std::size_t>& sample) {
    std::size_t counts[kNumClasses] = {};
    for (std::size_t idx : sample) counts[data_.labels[idx]]++;
    std::size_t best = 0;
    for (std::size_t c = 1; c < kNumClasses; ++c) {
      if (counts[c] > counts[best]) best = c;
    }
    TreeNode node;
    node.value = static_cast<double>(best);
    tree.nodes.push_back(node);
    return static_cast<int>(tree.nodes.size()) - 1;
  }

  bool is_pure(const std::vector<std::size_t>& sample) const {
    for (std::size_t i = 1; i < sample.size(); ++i) {
      if (data_.labels[sample[i]] != data_.labels[sample[0]]) return false;
    }
    return true;
  }

  SplitChoice best_split(const std::vector<std::size_t>& sample) {
    const std::size_t n = sample.size();
    std::size_t n_candidates = config_.features_per_split;
    if (n_candidates == 0 || n_candidates > data_.n_features) {
      n_candidates = data_.n_features;
    }
    const auto features =
        rng_.sample_without_replacement(data_.n_features, n_candidates);

    SplitChoice choice;
    for (std::size_t feature : features) {
      fill_sorted_column(data_, sample, feature, column_);
      std::size_t left_counts[kNumClasses] = {};
      std::size_t right_counts[kNumClasses] = {};
      for (const auto& [value, idx] : column_.entries) {
        right_counts[data_.labels[idx]]++;
      }
      for (std::size_t i = 0; i + 1 < n; ++i) {
        const auto& [value, idx] = column_.entries[i];
        left_counts[data_.labels[idx]]++;
        right_counts[data_.labels[idx]]--;
        if (column_.entries[i + 1].first == value) continue;  // not a boundary
        const std::size_t n_left = i + 1;
        const std::size_t n_right = n - n_left;
        if (n_left < config_.min_leaf || n_right < config_.min_leaf) continue;
        const double score =
            (static_cast<double>(n_left) * gini(left_counts, n_left) +
             static_cast<double>(n_right) * gini(right_counts, n_right)) /
            static_cast<double>(n);
        if (score < choice.score) {
          choice.found = true;
          choice.feature = feature;
          choice.threshold = 0.5 * (value + column_.entries[i + 1].first);
          choice.score = score;
        }
      }
    }
    return choice;
  }

  int grow(Tree& tree, const std::vector<std::size_t>& sample, std::size_t depth) {
    const bool depth_capped = config_.max_depth > 0 && depth >= config_.max_depth;
    if (sample.size() < 2 * config_.min_leaf || depth_capped || is_pure(sample)) {
      return make_leaf(tree, sample);
    }
    const SplitChoice choice = best_split(sample);
    if (!choice.found) return make_leaf(tree, sample);

    std::vector<std::size_t> left, right;
    left.reserve(sample.size());
    right.reserve(sample.size());
    for (std::size_t idx : sample) {
      (data_.at(idx, choice.feature) <= choice.threshold ? left : right)
          .push_back(idx);
    }

    TreeNode node;
    node.feature = static_cast<int>(choice.feature);
    node.threshold = choice.threshold;
    tree.nodes.push_back(node);
    const int self = static_cast<int>(tree.nodes.size()) - 1;
    tree.nodes[self].left = grow(tree, left, depth + 1);
    tree.nodes[self].right = grow(tree, right, depth + 1);
    return self;
  }

  const TrainMatrix& data_;
  const CartConfig& config_;
  Rng& rng_;
  SortedColumn column_;
};

class RegressionBuilder {
 public:
  RegressionBuilder(const TrainMatrix& data, const std::vector<double>& targets,
                    const CartConfig& config)
      : data_(data), targets_(targets), config_(config) {}

  Tree build(const std::vector<std::size_t>& sample) {
    Tree tree;
    grow(tree, sample, 0);
    return tree;
  }

 private:
  int make_leaf(Tree& tree, const std::vector<std::size_t>& sample) {
    double sum = 0.0;
    for (std::size_t idx : sample) sum += targets_[idx];
    TreeNode node;
    node.value = sample.empty() ? 0.0 : sum / static_cast<double>(sample.size());
    tree.nodes.push_back(node);
    return static_cast<int>(tree.nodes.size()) - 1;
  }

  SplitChoice best_split(const std::vector<std::size_t>& sample) {
    const std::size_t n = sample.size();
    SplitChoice choice;
    for (std::size_t feature = 0; feature < data_.n_features; ++feature) {
      fill_sorted_column(data_, sample, feature, column_);
      double right_sum = 0.0, right_sum_sq = 0.0;
      for (const auto& [value, idx] : column_.entries) {
        right_sum += targets_[idx];
        right_sum_sq += targets_[idx] * targets_[idx];
      }
      double left_sum = 0.0, left_sum_sq = 0.0;
      for (std::size_t i = 0; i + 1 < n; ++i) {
        const auto& [value, idx] = column_.entries[i];
        const double t = targets_[idx];
        left_sum += t;
        left_sum_sq += t * t;
        right_sum -= t;
        right_sum_sq -= t * t;
        if (column_.entries[i + 1].first == value) continue;
        const std::size_t n_left = i + 1;
        const std::size_t n_right = n - n_left;
        if (n_left < config_.min_leaf || n_right < config_.min_leaf) continue;
        const double sse_left =
            left_sum_sq - left_sum * left_sum / static_cast<double>(n_left);
        const double sse_right =
            right_sum_sq - right_sum * right_sum / static_cast<double>(n_right);
        const double score = sse_left + sse_right;
        if (score < choice.score) {
          choice.found = true;
          choice.feature = feature;
          choice.threshold = 0.5 * (value + column_.entries[i + 1].first);
          choice.score = score;
        }
      }
    }
    return choice;
  }

  bool is_constant(const std::vector<std::size_t>& sample) const {
    for (std::size_t i = 1; i < sample.size(); ++i) {
      if (targets_[sample[i]] != targets_[sample[0]]) return false;
    }
    return true;
  }

  int grow(Tree& tree, const std::vector<std::size_t>& sample, std::size_t depth) {
    const bool depth_capped = config_.max_depth > 0 && depth >= config_.max_depth;
    if (sample.size() < 2 * config_.min_leaf || depth_capped ||
        is_constant(sample)) {
      return make_leaf(tree, sample);
    }
    const SplitChoice choice = best_split(sample);
    if (!choice.found) return make_leaf(tree, sample);

    std::vector<std::size_t> left, right;
    left.reserve(sample.size());
    right.reserve(sample.size());
    for (std::size_t idx : sample) {
      (data_.at(idx, choice.feature) <= choice.threshold ? left : right)
          .push_back(idx);
    }

    TreeNode node;
    node.feature = static_cast<int>(choice.feature);
    node.threshold = choice.threshold;
    tree.nodes.push_back(node);
    const int self = static_cast<int>(tree.nodes.size()) - 1;
    tree.nodes[self].left = grow(tree, left, depth + 1);
    tree.nodes[self].right = grow(tree, right, depth + 1);
    return self;
  }

  const TrainMatrix& data_;
  const std::vector<double>& targets_;
  const CartConfig& config_;
  SortedColumn column_;
};

}  // namespace

Tree build_classification_tree(const TrainMatrix& data,
                               const std::vector<std::size_t>& sample,
                               const CartConfig& config, Rng& rng) {
  ClassificationBuilder builder(data, config, rng);
  return builder.build(sample);
}

Tree build_regression_tree(const TrainMatrix& data,
                           const std::vector<double>& targets,
                           const std::vector<std::size_t>& sample,
                           const CartConfig& config) {
  RegressionBuilder builder(data, targets, config);
  return builder.build(sample);
}

}  // namespace weedmap::detail
