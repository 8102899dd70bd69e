#include "weedmap/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <set>
#include <sstream>

#include <json.hpp>

#include "weedmap/errors.hpp"
#include "weedmap/io.hpp"
#include "weedmap/preprocess.hpp"
#include "weedmap/rng.hpp"
#include "weedmap/version.hpp"

namespace weedmap {

namespace {

using json = nlohmann::json;

std::string short_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

std::map<std::string, std::string> describe_hyperparams(const Hyperparams& hp) {
  std::map<std::string, std::string> out;
  if (const auto* p = std::get_if<RfParams>(&hp)) {
    out["n_trees"] = std::to_string(p->n_trees);
    out["max_depth"] = std::to_string(p->max_depth);
    out["min_leaf"] = std::to_string(p->min_leaf);
    out["features_per_split"] = std::to_string(p->features_per_split);
  } else if (const auto* p = std::get_if<GbtParams>(&hp)) {
    out["n_rounds"] = std::to_string(p->n_rounds);
    out["learning_rate"] = short_double(p->learning_rate);
    out["max_depth"] = std::to_string(p->max_depth);
    out["min_leaf"] = std::to_string(p->min_leaf);
  } else if (const auto* p = std::get_if<KnnParams>(&hp)) {
    out["k"] = std::to_string(p->k);
    out["distance"] = distance_kind_name(p->distance);
    out["standardize"] = p->standardize ? "true" : "false";
  }
  return out;
}

std::vector<std::size_t> parse_size_list(const std::string& key,
                                         const std::string& value) {
  std::vector<std::size_t> out;
  for (const auto& part : split_config_list(value)) {
    out.push_back(static_cast<std::size_t>(parse_config_u64(key, part)));
  }
  return out;
}

std::vector<double> parse_real_list(const std::string& key,
                                    const std::string& value) {
  std::vector<double> out;
  for (const auto& part : split_config_list(value)) {
    out.push_back(parse_config_real(key, part));
  }
  return out;
}

Date parse_config_date(const std::string& key, const std::string& value) {
  try {
    return parse_date(value);
  } catch (const Error& e) {
    throw Error(ErrorCode::ConfigError, key + ": " + e.what());
  }
}

json hyperparams_json(const Hyperparams& hp) {
  json j = json::object();
  for (const auto& [k, v] : describe_hyperparams(hp)) j[k] = v;
  return j;
}

}  // namespace

RunConfig run_config_from_kv(const std::map<std::string, std::string>& kv) {
  RunConfig cfg;
  for (const auto& [key, value] : kv) {
    if (key == "observations") {
      cfg.observations_path = value;
    } else if (key == "parcels") {
      cfg.parcels_path = value;
    } else if (key == "out-dir") {
      cfg.out_dir = value;
    } else if (key == "sensor") {
      cfg.featurization.sensor = parse_sensor_id(value);
    } else if (key == "window-start") {
      cfg.featurization.window_start = parse_config_date(key, value);
    } else if (key == "window-end") {
      cfg.featurization.window_end = parse_config_date(key, value);
    } else if (key == "grid-step") {
      const auto step = parse_config_u64(key, value);
      if (step < 1) throw Error(ErrorCode::ConfigError, "grid-step must be positive");
      cfg.featurization.grid_step_days = static_cast<int>(step);
    } else if (key == "cloud-threshold") {
      cfg.featurization.cloud_threshold = parse_config_real(key, value);
      if (cfg.featurization.cloud_threshold < 0.0 ||
          cfg.featurization.cloud_threshold > 1.0) {
        throw Error(ErrorCode::ConfigError, "cloud-threshold must be in [0, 1]");
      }
    } else if (key == "test-fraction") {
      cfg.test_fraction = parse_config_real(key, value);
      if (cfg.test_fraction <= 0.0 || cfg.test_fraction >= 1.0) {
        throw Error(ErrorCode::ConfigError, "test-fraction must be in (0, 1)");
      }
    } else if (key == "undersample-fraction") {
      cfg.undersample_fraction = parse_config_real(key, value);
      if (cfg.undersample_fraction < 0.0 || cfg.undersample_fraction >= 1.0) {
        throw Error(ErrorCode::ConfigError,
                    "undersample-fraction must be in [0, 1)");
      }
    } else if (key == "model") {
      cfg.model = parse_model_kind(value);
    } else if (key == "folds") {
      cfg.folds = static_cast<std::size_t>(parse_config_u64(key, value));
      if (cfg.folds < 2) throw Error(ErrorCode::ConfigError, "folds must be >= 2");
    } else if (key == "seed") {
      cfg.seed = parse_config_u64(key, value);
    } else if (key == "split-by-hash") {
      cfg.split_by_parcel_hash = parse_config_flag(key, value);
    } else if (key == "orchard-onehot") {
      cfg.featurization.orchard_onehot = parse_config_flag(key, value);
    } else if (key == "drop-bands") {
      cfg.featurization.drop_bands = split_config_list(value);
    } else if (key == "rf-n-trees") {
      cfg.grid.rf_n_trees = parse_size_list(key, value);
    } else if (key == "rf-max-depth") {
      cfg.grid.rf_max_depth = parse_size_list(key, value);
    } else if (key == "gbt-n-rounds") {
      cfg.grid.gbt_n_rounds = parse_size_list(key, value);
    } else if (key == "gbt-learning-rate") {
      cfg.grid.gbt_learning_rate = parse_real_list(key, value);
    } else if (key == "gbt-max-depth") {
      cfg.grid.gbt_max_depth = parse_size_list(key, value);
    } else if (key == "knn-k") {
      cfg.grid.knn_k = parse_size_list(key, value);
    } else if (key == "knn-distance") {
      cfg.grid.knn_distance.clear();
      for (const auto& part : split_config_list(value)) {
        cfg.grid.knn_distance.push_back(parse_distance_kind(part));
      }
    } else {
      throw Error(ErrorCode::ConfigError, "unknown config key '" + key + "'");
    }
  }
  return cfg;
}

std::vector<Hyperparams> build_grid(ModelKind kind, const GridOverrides& o) {
  std::vector<Hyperparams> grid;
  switch (kind) {
    case ModelKind::RF: {
      const std::vector<std::size_t> trees =
          o.rf_n_trees.empty() ? std::vector<std::size_t>{100, 300, 500}
                               : o.rf_n_trees;
      const std::vector<std::size_t> depths =
          o.rf_max_depth.empty() ? std::vector<std::size_t>{8, 0} : o.rf_max_depth;
      for (std::size_t n_trees : trees) {
        for (std::size_t depth : depths) {
          RfParams p;
          p.n_trees = n_trees;
          p.max_depth = depth;
          grid.emplace_back(p);
        }
      }
      break;
    }
    case ModelKind::GBT: {
      const std::vector<std::size_t> rounds =
          o.gbt_n_rounds.empty() ? std::vector<std::size_t>{100, 300}
                                 : o.gbt_n_rounds;
      const std::vector<double> rates = o.gbt_learning_rate.empty()
                                            ? std::vector<double>{0.05, 0.1}
                                            : o.gbt_learning_rate;
      const std::vector<std::size_t> depths =
          o.gbt_max_depth.empty() ? std::vector<std::size_t>{3, 5} : o.gbt_max_depth;
      for (std::size_t n_rounds : rounds) {
        for (double lr : rates) {
          for (std::size_t depth : depths) {
            GbtParams p;
            p.n_rounds = n_rounds;
            p.learning_rate = lr;
            p.max_depth = depth;
            grid.emplace_back(p);
          }
        }
      }
      break;
    }
    case ModelKind::KNN: {
      const std::vector<std::size_t> ks =
          o.knn_k.empty() ? std::vector<std::size_t>{3, 5, 7, 11} : o.knn_k;
      const std::vector<DistanceKind> dists =
          o.knn_distance.empty()
              ? std::vector<DistanceKind>{DistanceKind::Euclidean,
                                          DistanceKind::Manhattan}
              : o.knn_distance;
      for (std::size_t k : ks) {
        for (DistanceKind distance : dists) {
          KnnParams p;
          p.k = k;
          p.distance = distance;
          grid.emplace_back(p);
        }
      }
      break;
    }
  }
  return grid;
}

namespace {

// True for "<code>@...", "<code>_diff@..." and "<code>_roc@..." columns.
bool feature_from_band(const std::string& name, const std::string& code) {
  if (name.compare(0, code.size(), code) != 0) return false;
  const std::string rest = name.substr(code.size());
  return rest.rfind('@', 0) == 0 || rest.rfind("_diff@", 0) == 0 ||
         rest.rfind("_roc@", 0) == 0;
}

void drop_band_features(PixelFeatureVector& pixel,
                        const std::vector<std::string>& drop_bands) {
  std::size_t keep = 0;
  for (std::size_t i = 0; i < pixel.schema.size(); ++i) {
    bool dropped = false;
    for (const auto& code : drop_bands) {
      if (feature_from_band(pixel.schema[i], code)) {
        dropped = true;
        break;
      }
    }
    if (!dropped) {
      pixel.schema[keep] = std::move(pixel.schema[i]);
      pixel.values[keep] = pixel.values[i];
      ++keep;
    }
  }
  pixel.schema.resize(keep);
  pixel.values.resize(keep);
}

}  // namespace

FeaturizeResult featurize(const std::vector<SpectralObservation>& observations,
                          const std::vector<ParcelRecord>& parcels,
                          const FeaturizationSpec& spec) {
  const Sensor& sensor = Sensor::get(spec.sensor);
  const TimeGrid grid =
      build_grid(spec.window_start, spec.window_end, spec.grid_step_days);
  for (const auto& code : spec.drop_bands) {
    if (!sensor.band_index(code)) {
      throw Error(ErrorCode::ConfigError, "drop-bands: sensor " +
                                              sensor_id_name(spec.sensor) +
                                              " has no band '" + code + "'");
    }
  }

  std::map<std::string, std::size_t> parcel_index;
  for (std::size_t i = 0; i < parcels.size(); ++i) {
    if (!parcel_index.emplace(parcels[i].parcel_id, i).second) {
      throw Error(ErrorCode::ParseError,
                  "duplicate parcel id '" + parcels[i].parcel_id + "' in manifest");
    }
  }

  for (const auto& obs : observations) {
    validate_observation(obs, sensor);
    if (obs.sensor != spec.sensor) {
      throw Error(ErrorCode::SchemaMismatch,
                  "observation for pixel " + obs.pixel_id +
                      " was taken by a different sensor than the featurization");
    }
  }

  FeaturizeResult result;
  result.n_observations = observations.size();

  CloudFilterResult filtered = filter_cloudy(observations, spec.cloud_threshold);
  result.n_removed_cloudy = filtered.removed;
  result.dropped_pixels = filtered.all_cloudy_pixels;
  for (const auto& pixel : filtered.all_cloudy_pixels) {
    result.warnings.push_back("pixel " + pixel +
                              " has no clear observations and was dropped");
  }

  struct PixelBucket {
    std::string parcel_id;
    std::vector<const SpectralObservation*> obs;
  };
  std::vector<std::string> pixel_order;
  std::map<std::string, PixelBucket> by_pixel;
  for (const auto& obs : filtered.kept) {
    auto [it, inserted] = by_pixel.try_emplace(obs.pixel_id);
    if (inserted) {
      it->second.parcel_id = obs.parcel_id;
      pixel_order.push_back(obs.pixel_id);
      if (!parcel_index.count(obs.parcel_id)) {
        throw Error(ErrorCode::ParseError,
                    "observation references parcel '" + obs.parcel_id +
                        "' absent from the manifest");
      }
    } else if (it->second.parcel_id != obs.parcel_id) {
      throw Error(ErrorCode::ParseError,
                  "pixel " + obs.pixel_id + " appears under two parcels");
    }
    it->second.obs.push_back(&obs);
  }

  const std::size_t n_bands = sensor.bands().size();
  std::map<std::string, std::vector<PixelFeatureVector>> by_parcel;
  for (const auto& pixel_id : pixel_order) {
    auto& bucket = by_pixel[pixel_id];
    std::stable_sort(bucket.obs.begin(), bucket.obs.end(),
                     [](const SpectralObservation* a, const SpectralObservation* b) {
                       return a->date < b->date;
                     });
    for (std::size_t i = 1; i < bucket.obs.size(); ++i) {
      if (bucket.obs[i]->date == bucket.obs[i - 1]->date) {
        throw Error(ErrorCode::NonAscendingDates,
                    "pixel " + pixel_id + " has two observations on " +
                        format_date(bucket.obs[i]->date));
      }
    }
    std::vector<TimeSeries> band_series(n_bands);
    for (std::size_t b = 0; b < n_bands; ++b) {
      TimeSeries series;
      series.dates.reserve(bucket.obs.size());
      series.values.reserve(bucket.obs.size());
      for (const auto* obs : bucket.obs) {
        series.dates.push_back(obs->date);
        series.values.push_back(obs->reflectances[b]);
      }
      band_series[b] = interpolate_to_grid(series, grid);
    }
    PixelFeatureVector pixel =
        assemble_pixel_features(pixel_id, band_series, sensor, grid);
    if (!spec.drop_bands.empty()) drop_band_features(pixel, spec.drop_bands);
    by_parcel[bucket.parcel_id].push_back(std::move(pixel));
  }

  std::vector<std::string> onehot_types = spec.orchard_types;
  if (spec.orchard_onehot && onehot_types.empty()) {
    std::set<std::string> types;
    for (const auto& parcel : parcels) types.insert(parcel.orchard_type);
    onehot_types.assign(types.begin(), types.end());
  }
  result.orchard_types = onehot_types;

  for (const auto& parcel : parcels) {
    auto it = by_parcel.find(parcel.parcel_id);
    if (it == by_parcel.end()) {
      result.dropped_parcels.push_back(parcel.parcel_id);
      result.warnings.push_back("parcel " + parcel.parcel_id +
                                " has no usable pixels and was dropped");
      continue;
    }
    ParcelRecord record = parcel;
    record.pixel_ids.clear();
    for (const auto& pixel : it->second) record.pixel_ids.push_back(pixel.pixel_id);
    ParcelFeatureVector fv = aggregate_parcel(it->second, record);
    if (spec.orchard_onehot) {
      for (const auto& type : onehot_types) {
        fv.schema.push_back("orchard=" + type);
        fv.values.push_back(parcel.orchard_type == type ? 1.0 : 0.0);
      }
    }
    result.parcels.push_back(std::move(fv));
  }

  PixelFeatureVector schema_probe;
  schema_probe.schema = pixel_feature_schema(sensor, grid);
  schema_probe.values.resize(schema_probe.schema.size(), 0.0);
  if (!spec.drop_bands.empty()) drop_band_features(schema_probe, spec.drop_bands);
  result.schema = parcel_feature_schema(schema_probe.schema);
  if (spec.orchard_onehot) {
    for (const auto& type : onehot_types) {
      result.schema.push_back("orchard=" + type);
    }
  }
  return result;
}

RunOutput run_pipeline(const RunConfig& cfg) {
  if (cfg.observations_path.empty() || cfg.parcels_path.empty() ||
      cfg.out_dir.empty()) {
    throw Error(ErrorCode::ConfigError,
                "observations, parcels and out-dir are required");
  }

  const auto observations =
      read_observations_csv(cfg.observations_path, cfg.featurization.sensor);
  const auto parcels = read_parcels_csv(cfg.parcels_path);

  FeaturizeResult feat = featurize(observations, parcels, cfg.featurization);

  FeaturizationSpec resolved = cfg.featurization;
  resolved.orchard_types = feat.orchard_types;

  std::vector<ParcelFeatureVector> labeled;
  for (auto& fv : feat.parcels) {
    if (fv.label) {
      labeled.push_back(fv);
    } else {
      feat.warnings.push_back("parcel " + fv.parcel_id +
                              " is unlabeled and was excluded from training");
    }
  }
  if (labeled.empty()) {
    throw Error(ErrorCode::EmptyTrainingSet, "no labeled parcels survive ingestion");
  }
  Dataset dataset = make_dataset(std::move(labeled));

  SplitSpec split_spec;
  split_spec.test_fraction = cfg.test_fraction;
  split_spec.seed = cfg.seed;
  split_spec.by_parcel_hash = cfg.split_by_parcel_hash;
  SplitResult split = stratified_split(dataset, split_spec);

  Dataset train =
      undersample_majority(split.train, cfg.undersample_fraction, cfg.seed);

  const std::vector<Hyperparams> grid = build_grid(cfg.model, cfg.grid);
  CvResult cv = cross_validate(train, cfg.model, grid, cfg.folds, cfg.seed);

  ModelArtifact model =
      train_model(train, cv.best, derive_seed(cfg.seed, "final_train", 0));
  model.featurization = resolved;

  std::vector<WeedClass> truth;
  truth.reserve(split.test.size());
  for (const auto& row : split.test.rows) truth.push_back(*row.label);
  const std::vector<WeedClass> predicted = predict(model, split.test.rows);

  char dataset_id[32];
  std::snprintf(dataset_id, sizeof(dataset_id), "%016llx",
                static_cast<unsigned long long>(file_fingerprint(
                    {cfg.observations_path, cfg.parcels_path})));

  ReportMetadata metadata;
  metadata.model_kind = model_kind_name(cfg.model);
  metadata.hyperparams = describe_hyperparams(cv.best);
  metadata.seed = cfg.seed;
  metadata.dataset_id = dataset_id;

  RunOutput out;
  out.model = std::move(model);
  out.cv = std::move(cv);
  out.report = make_report(confusion_matrix(truth, predicted), metadata);
  out.warnings = feat.warnings;

  std::error_code ec;
  std::filesystem::create_directories(cfg.out_dir, ec);
  if (ec) {
    throw Error(ErrorCode::IoError, "cannot create out-dir " + cfg.out_dir);
  }
  const std::string base = cfg.out_dir + "/";
  save_model(out.model, base + "model.json");
  out.written_files.push_back(base + "model.json");
  for (const char* fmt : {"json", "text", "csv"}) {
    const std::string ext = std::string(fmt) == "text" ? "txt" : fmt;
    write_text_file(base + "report." + ext, render_report(out.report, fmt));
    out.written_files.push_back(base + "report." + ext);
  }
  write_text_file(base + "confusion.csv", confusion_matrix_csv(out.report.confusion));
  out.written_files.push_back(base + "confusion.csv");

  json manifest;
  manifest["config"] = {
      {"observations", cfg.observations_path},
      {"parcels", cfg.parcels_path},
      {"out_dir", cfg.out_dir},
      {"sensor", sensor_id_name(cfg.featurization.sensor)},
      {"window_start", format_date(cfg.featurization.window_start)},
      {"window_end", format_date(cfg.featurization.window_end)},
      {"grid_step_days", cfg.featurization.grid_step_days},
      {"cloud_threshold", cfg.featurization.cloud_threshold},
      {"test_fraction", cfg.test_fraction},
      {"undersample_fraction", cfg.undersample_fraction},
      {"model", model_kind_name(cfg.model)},
      {"folds", cfg.folds},
      {"seed", cfg.seed},
      {"split_by_hash", cfg.split_by_parcel_hash},
      {"orchard_onehot", cfg.featurization.orchard_onehot},
      {"drop_bands", cfg.featurization.drop_bands},
  };
  manifest["dataset_id"] = dataset_id;
  manifest["schema_fingerprint"] = out.model.fingerprint;
  manifest["versions"] = {{"library", kVersion},
                          {"model_format", kModelFormatVersion}};
  const auto class_counts = dataset.class_counts();
  json counts_json = json::object();
  for (WeedClass cls : all_weed_classes()) {
    counts_json[weed_class_name(cls)] =
        class_counts[static_cast<std::size_t>(cls)];
  }
  manifest["class_counts"] = counts_json;
  manifest["counts"] = {
      {"observations", feat.n_observations},
      {"observations_removed_cloudy", feat.n_removed_cloudy},
      {"pixels_dropped", feat.dropped_pixels.size()},
      {"parcels_in_manifest", parcels.size()},
      {"parcels_featurized", feat.parcels.size()},
      {"parcels_dropped", feat.dropped_parcels.size()},
      {"train_rows", train.size()},
      {"test_rows", split.test.size()},
  };
  json candidates = json::array();
  for (const auto& cand : out.cv.candidates) {
    candidates.push_back({{"hyperparams", hyperparams_json(cand.params)},
                          {"mean_weighted_f1", cand.mean_weighted_f1},
                          {"fold_scores", cand.fold_scores}});
  }
  manifest["cv"] = {{"folds", cfg.folds},
                    {"best_index", out.cv.best_index},
                    {"candidates", candidates}};
  manifest["warnings"] = out.warnings;
  write_text_file(base + "manifest.json", manifest.dump(2) + "\n");
  out.written_files.push_back(base + "manifest.json");

  return out;
}

std::vector<Prediction> predict_pipeline(const PredictConfig& cfg) {
  if (cfg.model_path.empty() || cfg.observations_path.empty() ||
      cfg.parcels_path.empty() || cfg.out_path.empty()) {
    throw Error(ErrorCode::ConfigError,
                "model-file, observations, parcels and out are required");
  }
  ModelArtifact model = load_model(cfg.model_path);
  if (!model.featurization) {
    throw Error(ErrorCode::ConfigError,
                "model file carries no featurization spec; cannot ingest "
                "raw observations");
  }
  const auto observations =
      read_observations_csv(cfg.observations_path, model.featurization->sensor);
  const auto parcels = read_parcels_csv(cfg.parcels_path);
  // The manifest defines the query set; observations for parcels it does not
  // list are out of scope here, unlike at training time.
  std::set<std::string> listed;
  for (const auto& parcel : parcels) listed.insert(parcel.parcel_id);
  std::vector<SpectralObservation> scoped;
  scoped.reserve(observations.size());
  for (const auto& obs : observations) {
    if (listed.count(obs.parcel_id) != 0) scoped.push_back(obs);
  }
  FeaturizeResult feat = featurize(scoped, parcels, *model.featurization);

  const std::vector<WeedClass> predicted = predict(model, feat.parcels);

  std::ostringstream csv;
  csv << "parcel_id,predicted_class\n";
  std::vector<Prediction> out;
  out.reserve(predicted.size());
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    out.push_back({feat.parcels[i].parcel_id, predicted[i]});
    csv << feat.parcels[i].parcel_id << "," << weed_class_name(predicted[i])
        << "\n";
  }
  write_text_file(cfg.out_path, csv.str());
  return out;
}

}  // namespace weedmap
