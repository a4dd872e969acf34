#include "nfbeam/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "nfbeam/beam_training.hpp"
#include "nfbeam/binary_io.hpp"
#include "nfbeam/dataset.hpp"
#include "nfbeam/rng.hpp"

namespace nfbeam {

double normalized_snr(std::span<const cdouble> chosen, std::span<const cdouble> oracle,
                      const ChannelVector& h) {
  const double best = std::norm(inner(oracle, h.entries));
  if (!(best > 0.0)) throw std::domain_error("normalized_snr: oracle beam gain is zero");
  return std::norm(inner(chosen, h.entries)) / best;
}

double effective_rate(std::span<const cdouble> w, const ChannelVector& h, const LinkConfig& link,
                      std::size_t beams_tested, const MetricsConfig& metrics) {
  const double overhead = metrics.slot_time * static_cast<double>(beams_tested);
  if (overhead > metrics.coherence_slots) {
    throw std::domain_error("effective_rate: " + std::to_string(beams_tested) +
                            " beam tests exceed the coherence budget");
  }
  return (1.0 - overhead / metrics.coherence_slots) * achievable_rate(w, h, link);
}

namespace {

std::uint64_t scheme_tag(const SchemeSpec& s) {
  const std::string id = s.id();
  return fnv1a64(reinterpret_cast<const unsigned char*>(id.data()), id.size());
}

constexpr std::uint64_t kChannelTag = 0x43;
constexpr std::uint64_t kWideTag = 0x57;
constexpr std::uint64_t kSchemeTag = 0x53;

}  // namespace

ExperimentResult run_experiment(const Config& cfg, const HeadModels& models) {
  cfg.validate();
  const bool need_models = std::any_of(cfg.experiment.schemes.begin(), cfg.experiment.schemes.end(),
                                       [](const SchemeSpec& s) { return s.needs_models(); });
  if (need_models && cfg.experiment.models == ModelSource::kTrained &&
      (models.direction == nullptr || models.distance == nullptr)) {
    throw std::invalid_argument("run_experiment: learned schemes need trained direction and distance models");
  }
  const CodebookSet books = build_codebooks(cfg);
  const std::uint64_t master = stream_seed(cfg, SeedStream::kExperiment);
  const std::size_t num_angles = books.polar.num_angles();
  const std::size_t num_rings = books.polar.num_rings();
  const UniformPredictor uniform_dir(num_angles), uniform_dist(num_rings);

  const std::size_t points = cfg.experiment.snr_grid_db.size();
  const std::size_t trials = cfg.experiment.trials;
  const std::size_t per_trial = cfg.experiment.schemes.size();
  ExperimentResult result;
  result.trials.resize(points * trials * per_trial);

  auto run_trial = [&](std::size_t p, std::size_t t) {
    const double snr_db = cfg.experiment.snr_grid_db[p];
    const LinkConfig link = LinkConfig::from_snr_db(snr_db);
    const std::uint64_t channel_seed = derive_seed(master, {kChannelTag, p, t});
    Rng channel_rng(channel_seed);
    const ChannelVector h = synth_channel(cfg.array, sample_paths(channel_rng, cfg.scenario));
    const SweepResult truth = sweep_oracle(books.polar, h);
    const CVector& oracle_word = books.polar.codeword(truth.index);

    MeasurementVector y;
    if (need_models) {
      Rng wide_rng(derive_seed(master, {kWideTag, p, t}));
      y = measure_wide(books.wide, h, link, wide_rng);
    }
    const HeadPredictor* dir = models.direction;
    const HeadPredictor* dist = models.distance;
    std::unique_ptr<OneHotPredictor> oracle_dir, oracle_dist;
    if (cfg.experiment.models == ModelSource::kOracle) {
      oracle_dir = std::make_unique<OneHotPredictor>(num_angles, truth.angle);
      oracle_dist = std::make_unique<OneHotPredictor>(num_rings, truth.ring);
      dir = oracle_dir.get();
      dist = oracle_dist.get();
    } else if (cfg.experiment.models == ModelSource::kUniform) {
      dir = &uniform_dir;
      dist = &uniform_dist;
    }

    TrialRecord* out = &result.trials[(p * trials + t) * per_trial];
    for (const SchemeSpec& scheme : cfg.experiment.schemes) {
      Rng rng(derive_seed(master, {kSchemeTag, scheme_tag(scheme), p, t}));
      SchemeResult r;
      switch (scheme.kind) {
        case SchemeKind::kOriginal: r = original_scheme(y, *dir, *dist, books.polar); break;
        case SchemeKind::kImproved:
          r = improved_scheme(y, *dir, *dist, books.polar, h, link, rng, scheme.top_angles,
                              scheme.top_rings);
          break;
        case SchemeKind::kSweep: r = sweep_baseline(books.polar, h, link, rng); break;
        case SchemeKind::kPerfect: r = perfect_sweep(books.polar, h); break;
        case SchemeKind::kRandom: r = random_baseline(books.polar, rng); break;
        case SchemeKind::kFarField: r = far_field_baseline(books.narrow, h, link, rng); break;
      }
      TrialRecord& rec = *out++;
      rec.scheme = scheme.id();
      rec.snr_db = snr_db;
      rec.trial = t;
      rec.normalized_snr = normalized_snr(r.codeword, oracle_word, h);
      rec.rate = achievable_rate(r.codeword, h, link);
      rec.effective_rate = effective_rate(r.codeword, h, link, r.beams_tested, cfg.experiment.metrics);
      rec.beams = r.beams_tested;
      rec.seed = channel_seed;
    }
  };

  const std::size_t jobs = points * trials;
  std::size_t workers = cfg.experiment.workers;
  if (workers == 0) workers = std::max<std::size_t>(1, std::thread::hardware_concurrency());
  workers = std::min(workers, std::max<std::size_t>(jobs, 1));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t j = next++; j < jobs; j = next++) {
      try {
        run_trial(j / trials, j % trials);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = jobs;
      }
    }
  };
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  result.summary = summarize(result.trials);
  return result;
}

std::vector<SummaryRow> summarize(std::span<const TrialRecord> trials) {
  struct Acc {
    std::size_t order = 0;
    std::string scheme;
    double snr = 0.0;
    std::map<std::size_t, const TrialRecord*> by_trial;  // fixed summation order
  };
  std::map<std::pair<std::string, double>, Acc> groups;
  std::size_t next = 0;
  for (const TrialRecord& r : trials) {
    auto [it, inserted] = groups.try_emplace({r.scheme, r.snr_db});
    if (inserted) it->second = {next++, r.scheme, r.snr_db, {}};
    it->second.by_trial[r.trial] = &r;
  }
  std::vector<SummaryRow> rows(groups.size());
  for (const auto& [key, acc] : groups) {
    SummaryRow row;
    row.scheme = acc.scheme;
    row.snr_db = acc.snr;
    row.trials = acc.by_trial.size();
    const double n = static_cast<double>(row.trials);
    auto stats = [&](auto field, double& mean, double& sd, double& ci) {
      double s = 0.0;
      for (const auto& [t, r] : acc.by_trial) s += field(*r);
      mean = s / n;
      double v = 0.0;
      for (const auto& [t, r] : acc.by_trial) v += (field(*r) - mean) * (field(*r) - mean);
      sd = n > 1 ? std::sqrt(v / (n - 1.0)) : 0.0;
      ci = 1.96 * sd / std::sqrt(n);
    };
    stats([](const TrialRecord& r) { return r.normalized_snr; }, row.gn_mean, row.gn_std, row.gn_ci95);
    stats([](const TrialRecord& r) { return r.rate; }, row.rate_mean, row.rate_std, row.rate_ci95);
    stats([](const TrialRecord& r) { return r.effective_rate; }, row.eff_mean, row.eff_std, row.eff_ci95);
    double dummy_sd = 0.0, dummy_ci = 0.0;
    stats([](const TrialRecord& r) { return static_cast<double>(r.beams); }, row.beams, dummy_sd, dummy_ci);
    rows[acc.order] = row;
  }
  return rows;
}

std::string trials_csv(std::span<const TrialRecord> trials) {
  std::string out = "scheme,snr_db,trial,G_N,rate,eff_rate,beams,seed\n";
  char line[512];
  for (const TrialRecord& r : trials) {
    std::snprintf(line, sizeof line, "%s,%.17g,%zu,%.17g,%.17g,%.17g,%zu,%llu\n", r.scheme.c_str(), r.snr_db,
                  r.trial, r.normalized_snr, r.rate, r.effective_rate, r.beams,
                  static_cast<unsigned long long>(r.seed));
    out += line;
  }
  return out;
}

std::string summary_csv(std::span<const SummaryRow> rows) {
  std::string out =
      "scheme,snr_db,trials,beams,G_N_mean,G_N_std,G_N_ci95,rate_mean,rate_std,rate_ci95,"
      "eff_rate_mean,eff_rate_std,eff_rate_ci95\n";
  char line[1024];
  for (const SummaryRow& r : rows) {
    std::snprintf(line, sizeof line,
                  "%s,%.17g,%zu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                  r.scheme.c_str(), r.snr_db, r.trials, r.beams, r.gn_mean, r.gn_std, r.gn_ci95, r.rate_mean,
                  r.rate_std, r.rate_ci95, r.eff_mean, r.eff_std, r.eff_ci95);
    out += line;
  }
  return out;
}

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << text;
}

}  // namespace

void write_trials_csv(const std::filesystem::path& path, std::span<const TrialRecord> trials) {
  write_text(path, trials_csv(trials));
}

void write_summary_csv(const std::filesystem::path& path, std::span<const SummaryRow> rows) {
  write_text(path, summary_csv(rows));
}

std::string experiment_metadata_json(const Config& cfg) {
  nlohmann::ordered_json j;
  j["config"] = nlohmann::ordered_json::parse(to_json(cfg));
  j["experiment_seed"] = stream_seed(cfg, SeedStream::kExperiment);
  j["assumptions"] = {
      {"t_s", cfg.experiment.metrics.slot_time},
      {"T_tot", cfg.experiment.metrics.coherence_slots},
      {"note", "t_s and T_tot are not given numerically in the source; eff_rate = (1 - t_s*beams/T_tot) * rate"}};
  return j.dump(2) + "\n";
}

}  // namespace nfbeam
