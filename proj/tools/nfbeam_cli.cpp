// nfbeam: dataset generation, head training and beam-training experiments.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "nfbeam/beam_training.hpp"
#include "nfbeam/config.hpp"
#include "nfbeam/dataset.hpp"
#include "nfbeam/experiments.hpp"
#include "nfbeam/training.hpp"

namespace fs = std::filesystem;
using namespace nfbeam;

namespace {

struct CommonOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
  bool desk = false;
  bool paper = false;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config, "JSON configuration file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--seed", o.seed, "master seed (overrides the file)");
  cmd->add_option("--out-dir", o.out_dir, "output directory")->capture_default_str();
  auto* desk = cmd->add_flag("--desk-scale", o.desk, "N=64, S=5, T=4, 20k samples");
  auto* paper = cmd->add_flag("--paper-scale", o.paper, "N=512, S=5, T=4, 100k samples");
  desk->excludes(paper);
}

Config resolve(const CommonOptions& o) {
  Config cfg = load_config(o.config);
  if (o.desk) apply_desk_scale(cfg);
  if (o.paper) apply_paper_scale(cfg);
  if (o.seed) cfg.seed = *o.seed;
  cfg.validate();
  fs::create_directories(o.out_dir);
  return cfg;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << text;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Dataset load_dataset_for(const Config& cfg, const fs::path& path) {
  Dataset data = read_dataset(path);
  check_compatible(data.header, cfg);
  return data;
}

struct LoadedHeads {
  nn::NetworkModel direction, distance;
};

LoadedHeads load_heads(const fs::path& dir) {
  return {nn::load_model(dir / "direction.model"), nn::load_model(dir / "distance.model")};
}

int gen_dataset(const CommonOptions& o) {
  const Config cfg = resolve(o);
  const auto t0 = std::chrono::steady_clock::now();
  const Dataset data = generate_dataset(cfg);
  const fs::path out = fs::path(o.out_dir) / "dataset.bin";
  write_dataset(out, data);
  export_labels_csv(fs::path(o.out_dir) / "labels.csv", data);
  std::fprintf(stderr, "wrote %zu samples (train %zu, val %zu, test %zu) to %s in %.1f s\n", data.samples.size(),
               data.header.split.train, data.header.split.val, data.header.split.test, out.c_str(),
               seconds_since(t0));
  return 0;
}

int train(const CommonOptions& o, const std::string& dataset_path) {
  const Config cfg = resolve(o);
  const fs::path in = dataset_path.empty() ? fs::path(o.out_dir) / "dataset.bin" : fs::path(dataset_path);
  const Dataset data = load_dataset_for(cfg, in);
  const auto t0 = std::chrono::steady_clock::now();
  const TrainedHeads heads = train_heads(data, cfg, [&](Head h, const EpochRecord& r) {
    std::fprintf(stderr, "%-9s epoch %2zu  loss %.4f/%.4f  acc %.4f/%.4f  lr %.5f  %.0f s\n", to_string(h).c_str(),
                 r.epoch, r.train_loss, r.val_loss, r.train_accuracy, r.val_accuracy, r.learning_rate,
                 seconds_since(t0));
  });
  nn::save_model(heads.direction.model, fs::path(o.out_dir) / "direction.model");
  nn::save_model(heads.distance.model, fs::path(o.out_dir) / "distance.model");
  write_history_csv(fs::path(o.out_dir) / "history.csv", heads);
  std::fprintf(stderr, "best epochs: direction %zu, distance %zu\n", heads.direction.best_epoch,
               heads.distance.best_epoch);
  return 0;
}

int eval_heads(const CommonOptions& o, const std::string& dataset_path, const std::string& models_dir) {
  const Config cfg = resolve(o);
  const fs::path in = dataset_path.empty() ? fs::path(o.out_dir) / "dataset.bin" : fs::path(dataset_path);
  const Dataset data = load_dataset_for(cfg, in);
  const LoadedHeads heads = load_heads(models_dir.empty() ? fs::path(o.out_dir) : fs::path(models_dir));
  const NetworkPredictor dir(heads.direction), dist(heads.distance);
  const AccuracyReport report = evaluate_heads(dir, dist, data.test());
  write_report_csv(fs::path(o.out_dir) / "head_report.csv", report);
  std::printf("direction top-1 %.4f  top-5 %.4f\n", report.direction.top1(),
              report.direction.topk_accuracy.back());
  std::printf("distance  top-1 %.4f\n", report.distance.top1());
  return 0;
}

int experiment(const CommonOptions& o, const std::string& models_dir, bool baselines_only) {
  Config cfg = resolve(o);
  if (baselines_only) {
    std::erase_if(cfg.experiment.schemes, [](const SchemeSpec& s) { return s.needs_models(); });
    if (cfg.experiment.schemes.empty()) {
      cfg.experiment.schemes = {{SchemeKind::kSweep}, {SchemeKind::kPerfect}, {SchemeKind::kFarField},
                                {SchemeKind::kRandom}};
    }
  }
  std::optional<LoadedHeads> heads;
  std::optional<NetworkPredictor> dir, dist;
  HeadModels models;
  const bool need = std::any_of(cfg.experiment.schemes.begin(), cfg.experiment.schemes.end(),
                                [](const SchemeSpec& s) { return s.needs_models(); });
  if (need && cfg.experiment.models == ModelSource::kTrained) {
    heads = load_heads(models_dir.empty() ? fs::path(o.out_dir) : fs::path(models_dir));
    dir.emplace(heads->direction);
    dist.emplace(heads->distance);
    models = {&*dir, &*dist};
  }
  const auto t0 = std::chrono::steady_clock::now();
  const ExperimentResult result = run_experiment(cfg, models);
  const fs::path out(o.out_dir);
  const std::string stem = baselines_only ? "baseline" : "experiment";
  write_trials_csv(out / (stem + "_trials.csv"), result.trials);
  write_summary_csv(out / (stem + "_summary.csv"), result.summary);
  write_text(out / (stem + "_meta.json"), experiment_metadata_json(cfg));
  std::printf("%-18s %7s %9s %9s %9s %9s\n", "scheme", "snr_db", "beams", "G_N", "rate", "eff_rate");
  for (const SummaryRow& r : result.summary) {
    std::printf("%-18s %7.1f %9.1f %9.4f %9.4f %9.4f\n", r.scheme.c_str(), r.snr_db, r.beams, r.gn_mean,
                r.rate_mean, r.eff_mean);
  }
  std::fprintf(stderr, "%zu trials in %.1f s\n", result.trials.size(), seconds_since(t0));
  return 0;
}

int export_codebook(const CommonOptions& o) {
  const Config cfg = resolve(o);
  const CodebookSet books = build_codebooks(cfg);
  const fs::path out(o.out_dir);
  write_codebook(out / "polar.cbk", to_file(books.polar));
  write_codebook(out / "wide.cbk", to_file(books.wide));
  write_codebook(out / "narrow.cbk", to_file(books.narrow));
  std::fprintf(stderr, "polar %zu, wide %zu, narrow %zu codewords\n", books.polar.size(),
               books.wide.codewords.size(), books.narrow.codewords.size());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Near-field beam training with wide-beam measurements"};
  app.require_subcommand(1);

  CommonOptions gen_o, train_o, eval_o, exp_o, sweep_o, cbk_o;
  std::string train_data, eval_data, eval_models, exp_models;

  auto* gen = app.add_subcommand("gen-dataset", "generate a labelled wide-beam dataset");
  add_common(gen, gen_o);

  auto* tr = app.add_subcommand("train", "train the direction and distance heads");
  add_common(tr, train_o);
  tr->add_option("--dataset", train_data, "dataset file (default <out-dir>/dataset.bin)");

  auto* ev = app.add_subcommand("eval-heads", "top-k accuracy of trained heads on the test split");
  add_common(ev, eval_o);
  ev->add_option("--dataset", eval_data, "dataset file (default <out-dir>/dataset.bin)");
  ev->add_option("--models", eval_models, "directory with direction.model and distance.model");

  auto* ex = app.add_subcommand("run-experiment", "Monte-Carlo comparison of all configured schemes");
  add_common(ex, exp_o);
  ex->add_option("--models", exp_models, "directory with direction.model and distance.model");

  auto* sw = app.add_subcommand("sweep-baseline", "run only the schemes that need no trained model");
  add_common(sw, sweep_o);

  auto* cb = app.add_subcommand("export-codebook", "write the polar, wide and narrow codebooks");
  add_common(cb, cbk_o);

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return gen_dataset(gen_o);
    if (tr->parsed()) return train(train_o, train_data);
    if (ev->parsed()) return eval_heads(eval_o, eval_data, eval_models);
    if (ex->parsed()) return experiment(exp_o, exp_models, false);
    if (sw->parsed()) return experiment(sweep_o, {}, true);
    if (cb->parsed()) return export_codebook(cbk_o);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}
