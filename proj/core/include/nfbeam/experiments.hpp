#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "nfbeam/config.hpp"
#include "nfbeam/measurement.hpp"
#include "nfbeam/predictor.hpp"

namespace nfbeam {

/// G_N = |w_hat^H h|^2 / |w_star^H h|^2. Throws std::domain_error when the
/// oracle beam gain is zero.
double normalized_snr(std::span<const cdouble> chosen, std::span<const cdouble> oracle,
                      const ChannelVector& h);

/// (1 - t_s * beams / T_tot) * log2(1 + P |w^H h|^2 / sigma^2). Throws
/// std::domain_error when the pilot budget is exceeded.
double effective_rate(std::span<const cdouble> w, const ChannelVector& h, const LinkConfig& link,
                      std::size_t beams_tested, const MetricsConfig& metrics);

struct TrialRecord {
  std::string scheme;
  double snr_db = 0.0;
  std::size_t trial = 0;
  double normalized_snr = 0.0;
  double rate = 0.0;
  double effective_rate = 0.0;
  std::size_t beams = 0;
  std::uint64_t seed = 0;  ///< channel seed of the trial
};

struct SummaryRow {
  std::string scheme;
  double snr_db = 0.0;
  std::size_t trials = 0;
  double beams = 0.0;  ///< mean beams tested
  double gn_mean = 0, gn_std = 0, gn_ci95 = 0;
  double rate_mean = 0, rate_std = 0, rate_ci95 = 0;
  double eff_mean = 0, eff_std = 0, eff_ci95 = 0;
};

struct ExperimentResult {
  std::vector<TrialRecord> trials;
  std::vector<SummaryRow> summary;
};

/// Trained heads for the learned schemes; unused for other model sources.
struct HeadModels {
  const HeadPredictor* direction = nullptr;
  const HeadPredictor* distance = nullptr;
};

/// Runs every configured scheme on the same fresh channels for each SNR point.
/// Channel and wide-beam noise depend on (seed, snr point, trial) only, so the
/// learned schemes see identical inputs; each scheme's extra pilots draw from
/// a stream keyed additionally by the scheme id.
ExperimentResult run_experiment(const Config& cfg, const HeadModels& models = {});

/// Mean/std/95% CI per (scheme, snr) in configuration order.
std::vector<SummaryRow> summarize(std::span<const TrialRecord> trials);

/// Header: scheme,snr_db,trial,G_N,rate,eff_rate,beams,seed
void write_trials_csv(const std::filesystem::path& path, std::span<const TrialRecord> trials);
void write_summary_csv(const std::filesystem::path& path, std::span<const SummaryRow> rows);
std::string trials_csv(std::span<const TrialRecord> trials);
std::string summary_csv(std::span<const SummaryRow> rows);

/// Run description stored next to the CSVs: configuration, derived seeds and
/// the pilot-time assumptions behind eff_rate.
std::string experiment_metadata_json(const Config& cfg);

}  // namespace nfbeam
