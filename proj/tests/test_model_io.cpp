#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "weedmap/learn.hpp"
#include "weedmap/rng.hpp"

using namespace weedmap;

namespace {

Dataset tiny_dataset(std::uint64_t seed) {
  Rng rng(seed);
  std::vector<ParcelFeatureVector> rows;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    for (int i = 0; i < 4; ++i) {
      ParcelFeatureVector r;
      r.parcel_id = "P" + std::to_string(c * 10 + i);
      r.label = static_cast<WeedClass>(c);
      r.schema = {"f0", "f1", "f2"};
      r.values = {static_cast<double>(c) + rng.uniform(-0.1, 0.1),
                  rng.uniform(), rng.uniform()};
      rows.push_back(std::move(r));
    }
  }
  return make_dataset(std::move(rows));
}

std::vector<ParcelFeatureVector> probe_rows(const Dataset& data) {
  return {data.rows[1], data.rows[6], data.rows[13]};
}

}  // namespace

TEST_CASE("every model kind round-trips through json") {
  Dataset data = tiny_dataset(3);
  std::vector<ModelArtifact> models;
  models.push_back(train_random_forest(data, RfParams{.n_trees = 9, .max_depth = 4}, 5));
  models.push_back(train_gradient_boosting(data, GbtParams{.n_rounds = 6}, 5));
  models.push_back(train_knn(data, KnnParams{.k = 3}));

  for (const ModelArtifact& model : models) {
    std::string text = model_to_json_string(model);
    ModelArtifact back = model_from_json_string(text);
    CHECK(back.kind == model.kind);
    CHECK(back.seed == model.seed);
    CHECK(back.fingerprint == model.fingerprint);
    CHECK(back.schema == model.schema);
    CHECK(predict(back, probe_rows(data)) == predict(model, probe_rows(data)));
    // Serialization is canonical: a round-trip re-serializes identically.
    CHECK(model_to_json_string(back) == text);
  }
}

TEST_CASE("model file save and load") {
  Dataset data = tiny_dataset(9);
  ModelArtifact model = train_knn(data, KnnParams{.k = 1});
  std::filesystem::path path =
      std::filesystem::temp_directory_path() / "weedmap_model_io_test.json";
  save_model(model, path.string());
  ModelArtifact back = load_model(path.string());
  CHECK(predict(back, probe_rows(data)) == predict(model, probe_rows(data)));
  std::filesystem::remove(path);
}

TEST_CASE("unknown format versions are rejected") {
  Dataset data = tiny_dataset(4);
  ModelArtifact model = train_knn(data, KnnParams{.k = 1});
  auto j = nlohmann::json::parse(model_to_json_string(model));
  j["format_version"] = 999;
  try {
    model_from_json_string(j.dump());
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnknownVersion);
  }
}

TEST_CASE("malformed model json is a parse error") {
  CHECK_THROWS_AS(model_from_json_string("not json at all"), Error);
  CHECK_THROWS_AS(model_from_json_string("{}"), Error);
}

TEST_CASE("hyperparameters survive the round-trip") {
  Dataset data = tiny_dataset(6);
  GbtParams params;
  params.n_rounds = 7;
  params.learning_rate = 0.05;
  params.max_depth = 2;
  params.min_leaf = 2;
  ModelArtifact model = train_gradient_boosting(data, params, 17);
  ModelArtifact back = model_from_json_string(model_to_json_string(model));
  const auto& p = std::get<GbtParams>(back.params);
  CHECK(p.n_rounds == 7);
  CHECK(p.learning_rate == 0.05);
  CHECK(p.max_depth == 2);
  CHECK(p.min_leaf == 2);
}

TEST_CASE("featurization spec is carried in the model file") {
  Dataset data = tiny_dataset(8);
  ModelArtifact model = train_knn(data, KnnParams{.k = 3});
  FeaturizationSpec spec;
  spec.sensor = SensorId::PS8B;
  spec.window_start = make_date(2024, 5, 1);
  spec.window_end = make_date(2024, 8, 31);
  spec.grid_step_days = 10;
  spec.cloud_threshold = 0.004;
  spec.drop_bands = {"B02", "B07"};
  spec.orchard_onehot = true;
  spec.orchard_types = {"Almonds", "Olives"};
  model.featurization = spec;

  ModelArtifact back = model_from_json_string(model_to_json_string(model));
  REQUIRE(back.featurization.has_value());
  CHECK(back.featurization->sensor == SensorId::PS8B);
  CHECK(format_date(back.featurization->window_start) == "2024-05-01");
  CHECK(format_date(back.featurization->window_end) == "2024-08-31");
  CHECK(back.featurization->cloud_threshold == 0.004);
  CHECK(back.featurization->drop_bands == std::vector<std::string>{"B02", "B07"});
  CHECK(back.featurization->orchard_onehot);
  CHECK(back.featurization->orchard_types ==
        std::vector<std::string>{"Almonds", "Olives"});
}

TEST_CASE("loaded model refuses rows from another schema") {
  Dataset data = tiny_dataset(2);
  ModelArtifact model =
      model_from_json_string(model_to_json_string(train_knn(data, KnnParams{.k = 1})));
  ParcelFeatureVector alien;
  alien.parcel_id = "X";
  alien.schema = {"g0", "g1", "g2"};
  alien.values = {0.0, 0.0, 0.0};
  try {
    predict(model, {alien});
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SchemaMismatch);
  }
}
