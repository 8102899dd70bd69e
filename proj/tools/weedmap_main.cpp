#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "weedmap/errors.hpp"
#include "weedmap/io.hpp"
#include "weedmap/pipeline.hpp"
#include "weedmap/synth.hpp"
#include "weedmap/version.hpp"

namespace {

// 0 success, 2 config/usage, 3 data validation, 4 training infeasible.
int exit_code_for(weedmap::ErrorCode code) {
  using weedmap::ErrorCode;
  switch (code) {
    case ErrorCode::ConfigError:
    case ErrorCode::UnsupportedFormat:
    case ErrorCode::UnknownSensor:
    case ErrorCode::EmptyWindow:
    case ErrorCode::FractionOutOfRange:
      return 2;
    case ErrorCode::ClassTooSmall:
    case ErrorCode::ClassSmallerThanFolds:
    case ErrorCode::KTooLarge:
    case ErrorCode::EmptyTrainingSet:
    case ErrorCode::ZeroSupport:
      return 4;
    default:
      return 3;
  }
}

struct SubArgs {
  std::string config_path;
  std::map<std::string, std::string> flags;

  std::map<std::string, std::string> merged() const {
    std::map<std::string, std::string> kv;
    if (!config_path.empty()) kv = weedmap::read_config_file(config_path);
    for (const auto& [k, v] : flags) kv[k] = v;
    return kv;
  }
};

void add_kv_option(CLI::App* app, SubArgs& args, const std::string& key,
                   const std::string& desc) {
  app->add_option_function<std::string>(
      "--" + key, [&args, key](const std::string& v) { args.flags[key] = v; },
      desc);
}

void add_kv_flag(CLI::App* app, SubArgs& args, const std::string& key,
                 const std::string& desc) {
  app->add_flag_function(
      "--" + key,
      [&args, key](std::int64_t count) {
        if (count > 0) args.flags[key] = "true";
      },
      desc);
}

void add_common_options(CLI::App* app, SubArgs& args) {
  app->add_option("--config", args.config_path,
                  "key=value config file; flags override its entries");
  add_kv_option(app, args, "sensor", "s2 or ps8b");
  add_kv_option(app, args, "window-start", "observation window start, ISO date");
  add_kv_option(app, args, "window-end", "observation window end, ISO date");
  add_kv_option(app, args, "seed", "master RNG seed");
}

int run_synth(const SubArgs& args, const std::string& out_dir) {
  auto kv = args.merged();
  std::string dir = out_dir;
  if (auto it = kv.find("out-dir"); it != kv.end()) {
    if (dir.empty()) dir = it->second;
    kv.erase(it);
  }
  if (dir.empty()) {
    throw weedmap::Error(weedmap::ErrorCode::ConfigError, "out-dir is required");
  }
  const weedmap::SynthConfig cfg = weedmap::synth_config_from_kv(kv);
  const weedmap::SynthOutput data = weedmap::generate_dataset(cfg);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw weedmap::Error(weedmap::ErrorCode::IoError,
                         "cannot create out-dir " + dir);
  }
  weedmap::write_observations_csv(dir + "/observations.csv", data.observations,
                                  cfg.sensor);
  weedmap::write_parcels_csv(dir + "/parcels.csv", data.parcels);
  std::printf("wrote %zu observations for %zu parcels to %s\n",
              data.observations.size(), data.parcels.size(), dir.c_str());
  return 0;
}

int run_run(const SubArgs& args) {
  const weedmap::RunConfig cfg = weedmap::run_config_from_kv(args.merged());
  const weedmap::RunOutput out = weedmap::run_pipeline(cfg);
  for (const auto& warning : out.warnings) {
    std::fprintf(stderr, "warning: %s\n", warning.c_str());
  }
  std::fputs(weedmap::render_report(out.report, "text").c_str(), stdout);
  for (const auto& path : out.written_files) {
    std::printf("wrote %s\n", path.c_str());
  }
  return 0;
}

int run_predict(const SubArgs& args) {
  auto kv = args.merged();
  weedmap::PredictConfig cfg;
  for (const auto& [key, value] : kv) {
    if (key == "model-file") {
      cfg.model_path = value;
    } else if (key == "observations") {
      cfg.observations_path = value;
    } else if (key == "parcels") {
      cfg.parcels_path = value;
    } else if (key == "out") {
      cfg.out_path = value;
    } else {
      throw weedmap::Error(weedmap::ErrorCode::ConfigError,
                           "unknown config key '" + key + "'");
    }
  }
  const auto predictions = weedmap::predict_pipeline(cfg);
  std::printf("wrote %zu predictions to %s\n", predictions.size(),
              cfg.out_path.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"weed-management mapping from multispectral image time series"};
  app.set_version_flag("--version", weedmap::kVersion);
  app.require_subcommand(1);

  SubArgs synth_args;
  std::string synth_out_dir;
  CLI::App* synth = app.add_subcommand("synth", "generate a synthetic scene");
  add_common_options(synth, synth_args);
  synth->add_option("--out-dir", synth_out_dir, "output directory");
  add_kv_option(synth, synth_args, "class-counts",
                "parcels per class: MO,TL,CS,NP");
  add_kv_option(synth, synth_args, "pixels-min", "minimum pixels per parcel");
  add_kv_option(synth, synth_args, "pixels-max", "maximum pixels per parcel");
  add_kv_option(synth, synth_args, "separation", "high, medium or low");
  add_kv_option(synth, synth_args, "noise-sd", "reflectance noise sigma");
  add_kv_option(synth, synth_args, "cloud-rate", "per-date cloud probability");
  add_kv_option(synth, synth_args, "revisit-days",
                "days between revisits; 0 = sensor default");

  SubArgs run_args;
  CLI::App* run = app.add_subcommand("run", "train and evaluate on a scene");
  add_common_options(run, run_args);
  add_kv_option(run, run_args, "observations", "observation CSV");
  add_kv_option(run, run_args, "parcels", "parcel manifest CSV");
  add_kv_option(run, run_args, "out-dir", "output directory");
  add_kv_option(run, run_args, "grid-step", "interpolation grid step in days");
  add_kv_option(run, run_args, "cloud-threshold", "max usable cloud fraction");
  add_kv_option(run, run_args, "test-fraction", "held-out test share");
  add_kv_option(run, run_args, "undersample-fraction",
                "majority-class removal share");
  add_kv_option(run, run_args, "model", "rf, gbt or knn");
  add_kv_option(run, run_args, "folds", "cross-validation folds");
  add_kv_flag(run, run_args, "split-by-hash",
              "reserve test parcels by hashed parcel id");
  add_kv_flag(run, run_args, "orchard-onehot",
              "add orchard type as one-hot features");
  add_kv_option(run, run_args, "drop-bands",
                "band codes to exclude from features");
  add_kv_option(run, run_args, "rf-n-trees", "RF grid: tree counts");
  add_kv_option(run, run_args, "rf-max-depth", "RF grid: depths, 0 = unlimited");
  add_kv_option(run, run_args, "gbt-n-rounds", "GBT grid: boosting rounds");
  add_kv_option(run, run_args, "gbt-learning-rate", "GBT grid: learning rates");
  add_kv_option(run, run_args, "gbt-max-depth", "GBT grid: tree depths");
  add_kv_option(run, run_args, "knn-k", "KNN grid: neighbor counts");
  add_kv_option(run, run_args, "knn-distance",
                "KNN grid: euclidean and/or manhattan");

  SubArgs predict_args;
  CLI::App* predict =
      app.add_subcommand("predict", "apply a saved model to a scene");
  predict->add_option("--config", predict_args.config_path,
                      "key=value config file; flags override its entries");
  add_kv_option(predict, predict_args, "model-file", "trained model JSON");
  add_kv_option(predict, predict_args, "observations", "observation CSV");
  add_kv_option(predict, predict_args, "parcels", "parcel manifest CSV");
  add_kv_option(predict, predict_args, "out", "predictions CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (synth->parsed()) return run_synth(synth_args, synth_out_dir);
    if (run->parsed()) return run_run(run_args);
    return run_predict(predict_args);
  } catch (const weedmap::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
