#include <fstream>

#include <json.hpp>

#include "weedmap/learn.hpp"
#include "weedmap/version.hpp"

namespace weedmap {

namespace {

using nlohmann::json;

json tree_to_json(const Tree& tree) {
  json nodes = json::array();
  for (const TreeNode& node : tree.nodes) {
    nodes.push_back({node.feature, node.threshold, node.left, node.right, node.value});
  }
  return nodes;
}

Tree tree_from_json(const json& j) {
  Tree tree;
  tree.nodes.reserve(j.size());
  for (const auto& entry : j) {
    TreeNode node;
    node.feature = entry.at(0).get<int>();
    node.threshold = entry.at(1).get<double>();
    node.left = entry.at(2).get<int>();
    node.right = entry.at(3).get<int>();
    node.value = entry.at(4).get<double>();
    tree.nodes.push_back(node);
  }
  return tree;
}

json params_to_json(const Hyperparams& params) {
  return std::visit(
      [](const auto& p) -> json {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, RfParams>) {
          return {{"n_trees", p.n_trees},
                  {"max_depth", p.max_depth},
                  {"min_leaf", p.min_leaf},
                  {"features_per_split", p.features_per_split},
                  {"bootstrap", p.bootstrap}};
        } else if constexpr (std::is_same_v<P, GbtParams>) {
          return {{"n_rounds", p.n_rounds},
                  {"learning_rate", p.learning_rate},
                  {"max_depth", p.max_depth},
                  {"min_leaf", p.min_leaf}};
        } else {
          return {{"k", p.k},
                  {"distance",
                   distance_kind_name(p.distance)},
                  {"standardize", p.standardize}};
        }
      },
      params);
}

Hyperparams params_from_json(ModelKind kind, const json& j) {
  switch (kind) {
    case ModelKind::RF: {
      RfParams p;
      j.at("n_trees").get_to(p.n_trees);
      j.at("max_depth").get_to(p.max_depth);
      j.at("min_leaf").get_to(p.min_leaf);
      j.at("features_per_split").get_to(p.features_per_split);
      j.at("bootstrap").get_to(p.bootstrap);
      return p;
    }
    case ModelKind::GBT: {
      GbtParams p;
      j.at("n_rounds").get_to(p.n_rounds);
      j.at("learning_rate").get_to(p.learning_rate);
      j.at("max_depth").get_to(p.max_depth);
      j.at("min_leaf").get_to(p.min_leaf);
      return p;
    }
    case ModelKind::KNN: {
      KnnParams p;
      j.at("k").get_to(p.k);
      p.distance = parse_distance_kind(j.at("distance").get<std::string>());
      j.at("standardize").get_to(p.standardize);
      return p;
    }
  }
  throw Error(ErrorCode::ParseError, "unknown model kind in file");
}

json state_to_json(const ModelArtifact& model) {
  if (const auto* forest = std::get_if<ForestState>(&model.state)) {
    json trees = json::array();
    for (const Tree& tree : forest->trees) trees.push_back(tree_to_json(tree));
    return {{"trees", trees}};
  }
  if (const auto* gbt = std::get_if<GbtState>(&model.state)) {
    json rounds = json::array();
    for (const auto& round : gbt->rounds) {
      json trees = json::array();
      for (const Tree& tree : round) trees.push_back(tree_to_json(tree));
      rounds.push_back(trees);
    }
    return {{"init_scores", gbt->init_scores},
            {"rounds", rounds},
            {"training_loss", gbt->training_loss}};
  }
  const auto& knn = std::get<KnnState>(model.state);
  json labels = json::array();
  for (WeedClass cls : knn.labels) labels.push_back(static_cast<int>(cls));
  return {{"n_rows", knn.n_rows},
          {"n_features", knn.n_features},
          {"matrix", knn.matrix},
          {"labels", labels},
          {"standardized", knn.standardized},
          {"feature_means", knn.feature_means},
          {"feature_sds", knn.feature_sds}};
}

void state_from_json(ModelKind kind, const json& j, ModelArtifact& model) {
  switch (kind) {
    case ModelKind::RF: {
      ForestState state;
      for (const auto& tree : j.at("trees")) {
        state.trees.push_back(tree_from_json(tree));
      }
      model.state = std::move(state);
      return;
    }
    case ModelKind::GBT: {
      GbtState state;
      j.at("init_scores").get_to(state.init_scores);
      for (const auto& round : j.at("rounds")) {
        std::array<Tree, kNumClasses> trees;
        for (std::size_t c = 0; c < kNumClasses; ++c) {
          trees[c] = tree_from_json(round.at(c));
        }
        state.rounds.push_back(std::move(trees));
      }
      j.at("training_loss").get_to(state.training_loss);
      model.state = std::move(state);
      return;
    }
    case ModelKind::KNN: {
      KnnState state;
      j.at("n_rows").get_to(state.n_rows);
      j.at("n_features").get_to(state.n_features);
      j.at("matrix").get_to(state.matrix);
      for (const auto& label : j.at("labels")) {
        state.labels.push_back(static_cast<WeedClass>(label.get<int>()));
      }
      j.at("standardized").get_to(state.standardized);
      j.at("feature_means").get_to(state.feature_means);
      j.at("feature_sds").get_to(state.feature_sds);
      model.state = std::move(state);
      return;
    }
  }
}

json featurization_to_json(const FeaturizationSpec& spec) {
  json j{{"sensor", sensor_id_name(spec.sensor)},
         {"window_start", format_date(spec.window_start)},
         {"window_end", format_date(spec.window_end)},
         {"grid_step_days", spec.grid_step_days},
         {"cloud_threshold", spec.cloud_threshold}};
  if (!spec.drop_bands.empty()) j["drop_bands"] = spec.drop_bands;
  if (spec.orchard_onehot) {
    j["orchard_onehot"] = true;
    j["orchard_types"] = spec.orchard_types;
  }
  return j;
}

FeaturizationSpec featurization_from_json(const json& j) {
  FeaturizationSpec spec;
  spec.sensor = parse_sensor_id(j.at("sensor").get<std::string>());
  spec.window_start = parse_date(j.at("window_start").get<std::string>());
  spec.window_end = parse_date(j.at("window_end").get<std::string>());
  j.at("grid_step_days").get_to(spec.grid_step_days);
  j.at("cloud_threshold").get_to(spec.cloud_threshold);
  if (j.contains("drop_bands")) j.at("drop_bands").get_to(spec.drop_bands);
  if (j.contains("orchard_onehot")) {
    spec.orchard_onehot = j.at("orchard_onehot").get<bool>();
    j.at("orchard_types").get_to(spec.orchard_types);
  }
  return spec;
}

}  // namespace

std::string model_to_json_string(const ModelArtifact& model) {
  json j;
  j["format_version"] = kModelFormatVersion;
  j["library_version"] = kVersion;
  j["model_kind"] = model_kind_name(model.kind);
  j["hyperparams"] = params_to_json(model.params);
  j["seed"] = model.seed;
  j["schema_fingerprint"] = model.fingerprint;
  j["schema"] = model.schema;
  if (model.featurization) {
    j["featurization"] = featurization_to_json(*model.featurization);
  }
  j["state"] = state_to_json(model);
  return j.dump() + "\n";
}

ModelArtifact model_from_json_string(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("model json: ") + e.what());
  }
  try {
    const int version = j.at("format_version").get<int>();
    if (version != kModelFormatVersion) {
      throw Error(ErrorCode::UnknownVersion,
                  "model format version " + std::to_string(version) +
                      " is not supported (expected " +
                      std::to_string(kModelFormatVersion) + ")");
    }
    ModelArtifact model;
    model.kind = parse_model_kind(j.at("model_kind").get<std::string>());
    model.params = params_from_json(model.kind, j.at("hyperparams"));
    j.at("seed").get_to(model.seed);
    j.at("schema_fingerprint").get_to(model.fingerprint);
    j.at("schema").get_to(model.schema);
    if (j.contains("featurization")) {
      model.featurization = featurization_from_json(j.at("featurization"));
    }
    state_from_json(model.kind, j.at("state"), model);
    return model;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("model json: ") + e.what());
  }
}

void save_model(const ModelArtifact& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorCode::IoError, "cannot open " + path + " for writing");
  }
  out << model_to_json_string(model);
  if (!out) {
    throw Error(ErrorCode::IoError, "failed writing " + path);
  }
}

ModelArtifact load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::IoError, "cannot open " + path);
  }
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return model_from_json_string(text);
}

}  // namespace weedmap
