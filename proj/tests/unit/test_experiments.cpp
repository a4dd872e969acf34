#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "nfbeam/dataset.hpp"
#include "nfbeam/experiments.hpp"

using namespace nfbeam;

namespace {

Config small_config() {
  Config c = desk_scale();
  c.array = ArrayConfig::half_wavelength(32);
  c.codebook.num_rings = 5;
  c.experiment.snr_grid_db = {0.0, 10.0};
  c.experiment.trials = 40;
  c.experiment.workers = 1;
  c.experiment.models = ModelSource::kOracle;
  c.experiment.schemes = {parse_scheme("original"), parse_scheme("improved_K1_L1"),
                          parse_scheme("improved_K5_L2"), parse_scheme("sweep"),
                          parse_scheme("perfect"),  parse_scheme("far_field"),
                          parse_scheme("random")};
  return c;
}

ChannelVector unit_channel(std::size_t n) {
  ChannelVector h{CVector(n)};
  h[0] = {1.0, 0.0};
  return h;
}

}  // namespace

TEST(NormalizedSnr, Examples) {
  const ChannelVector h{CVector{{1, 0}, {0, 1}}};
  const CVector best{{1 / std::sqrt(2.0), 0}, {0, 1 / std::sqrt(2.0)}};
  const CVector half{{1, 0}, {0, 0}};
  const CVector null{{1 / std::sqrt(2.0), 0}, {0, -1 / std::sqrt(2.0)}};
  EXPECT_NEAR(normalized_snr(best, best, h), 1.0, 1e-15);
  EXPECT_NEAR(normalized_snr(half, best, h), 0.5, 1e-15);
  EXPECT_NEAR(normalized_snr(null, best, h), 0.0, 1e-15);
  EXPECT_THROW(normalized_snr(best, null, h), std::domain_error);
}

TEST(EffectiveRate, Examples) {
  const ChannelVector h = unit_channel(4);
  const CVector w{{1, 0}, {0, 0}, {0, 0}, {0, 0}};
  const LinkConfig link = LinkConfig::from_snr_db(10);
  const MetricsConfig m{};
  const double plain = achievable_rate(w, h, link);
  EXPECT_NEAR(plain, std::log2(11.0), 1e-12);
  EXPECT_DOUBLE_EQ(effective_rate(w, h, link, 0, m), plain);
  EXPECT_DOUBLE_EQ(effective_rate(w, h, link, 25600, m), 0.0);
  EXPECT_THROW(effective_rate(w, h, link, 25601, m), std::domain_error);
  const double sweep = effective_rate(w, h, link, 2560, m);
  const double improved = effective_rate(w, h, link, 148, m);
  EXPECT_NEAR(sweep / plain, 0.9, 1e-15);
  EXPECT_NEAR(improved / plain, 0.99421875, 1e-15);
  EXPECT_NEAR(sweep / improved, 0.9 / 0.99421875, 1e-15);
}

TEST(Experiment, OracleStubsGiveUnitGain) {
  Config c = small_config();
  const auto res = run_experiment(c);
  for (const auto& r : res.trials) {
    if (r.scheme == "original" || r.scheme == "improved_K1_L1" || r.scheme == "perfect") {
      EXPECT_EQ(r.normalized_snr, 1.0) << r.scheme;
    }
    // narrow beams are not polar codewords and can beat the polar oracle
    if (r.scheme != "far_field") EXPECT_LE(r.normalized_snr, 1.0 + 1e-12) << r.scheme;
    EXPECT_GE(r.normalized_snr, 0.0);
    EXPECT_GE(r.effective_rate, 0.0);
    EXPECT_LE(r.effective_rate, r.rate);
  }
}

TEST(Experiment, OracleStubsWithExtraCandidatesAtHighSnr) {
  Config c = small_config();
  c.experiment.snr_grid_db = {60.0};
  c.experiment.schemes = {parse_scheme("improved_K5_L2"), parse_scheme("improved_K32_L5")};
  for (const auto& row : run_experiment(c).summary) EXPECT_GE(row.gn_mean, 0.999) << row.scheme;
}

TEST(Experiment, RowCountsAndBeams) {
  Config c = small_config();
  const auto res = run_experiment(c);
  EXPECT_EQ(res.trials.size(), 7u * 2u * 40u);
  ASSERT_EQ(res.summary.size(), 7u * 2u);
  for (const auto& row : res.summary) {
    EXPECT_EQ(row.trials, 40u);
    const double expect = row.scheme == "original"         ? 8
                          : row.scheme == "improved_K1_L1" ? 9
                          : row.scheme == "improved_K5_L2" ? 18
                          : row.scheme == "sweep"          ? 160
                          : row.scheme == "perfect"        ? 160
                          : row.scheme == "far_field"      ? 32
                                                           : 0;
    EXPECT_EQ(row.beams, expect) << row.scheme;
  }
  EXPECT_EQ(res.summary[0].scheme, "original");
  EXPECT_EQ(res.summary[0].snr_db, 0.0);
  EXPECT_EQ(res.summary[7].snr_db, 10.0);
}

TEST(Experiment, WorkerCountDoesNotChangeBytes) {
  Config c = small_config();
  c.experiment.models = ModelSource::kUniform;
  const auto a = run_experiment(c);
  c.experiment.workers = 4;
  const auto b = run_experiment(c);
  EXPECT_EQ(trials_csv(a.trials), trials_csv(b.trials));
  EXPECT_EQ(summary_csv(a.summary), summary_csv(b.summary));
}

TEST(Experiment, SchemesShareChannels) {
  Config c = small_config();
  c.experiment.schemes = {parse_scheme("sweep")};
  const auto alone = run_experiment(c);
  c.experiment.schemes = {parse_scheme("random"), parse_scheme("sweep")};
  const auto both = run_experiment(c);
  for (std::size_t i = 0; i < alone.trials.size(); ++i) {
    EXPECT_EQ(alone.trials[i].seed, both.trials[2 * i + 1].seed);
    EXPECT_EQ(alone.trials[i].normalized_snr, both.trials[2 * i + 1].normalized_snr);
  }
}

TEST(Experiment, SeedChangesOutput) {
  Config c = small_config();
  const auto a = trials_csv(run_experiment(c).trials);
  c.seed += 1;
  EXPECT_NE(a, trials_csv(run_experiment(c).trials));
}

TEST(Experiment, MissingModelsThrow) {
  Config c = small_config();
  c.experiment.models = ModelSource::kTrained;
  EXPECT_THROW(run_experiment(c), std::invalid_argument);
  c.experiment.schemes = {parse_scheme("sweep")};
  EXPECT_NO_THROW(run_experiment(c));
}

TEST(Experiment, StubModelsThroughInterface) {
  Config c = small_config();
  c.experiment.models = ModelSource::kTrained;
  c.experiment.schemes = {parse_scheme("original")};
  c.experiment.trials = 5;
  const UniformPredictor dir(32), dist(5);
  const auto res = run_experiment(c, {&dir, &dist});
  const Config ref = [&] {
    Config r = c;
    r.experiment.models = ModelSource::kUniform;
    return r;
  }();
  EXPECT_EQ(trials_csv(res.trials), trials_csv(run_experiment(ref).trials));
}

TEST(Summarize, StatisticsAndOrderInvariance) {
  std::vector<TrialRecord> recs;
  const double vals[] = {0.2, 0.4, 0.9, 0.5};
  for (std::size_t t = 0; t < 4; ++t) {
    recs.push_back({"b", 5.0, t, vals[t], 2 * vals[t], vals[t], 10, t});
    recs.push_back({"a", 5.0, t, 1.0, 1.0, 1.0, 0, t});
  }
  const auto rows = summarize(recs);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].scheme, "b");
  EXPECT_NEAR(rows[0].gn_mean, 0.5, 1e-15);
  const double sd = std::sqrt((0.09 + 0.01 + 0.16 + 0.0) / 3.0);
  EXPECT_NEAR(rows[0].gn_std, sd, 1e-15);
  EXPECT_NEAR(rows[0].gn_ci95, 1.96 * sd / 2.0, 1e-15);
  EXPECT_NEAR(rows[0].rate_mean, 1.0, 1e-15);
  EXPECT_EQ(rows[0].beams, 10.0);
  EXPECT_EQ(rows[1].gn_std, 0.0);

  auto shuffled = recs;
  std::reverse(shuffled.begin(), shuffled.end());
  std::stable_partition(shuffled.begin(), shuffled.end(), [](const TrialRecord& r) { return r.scheme == "b"; });
  EXPECT_EQ(summary_csv(summarize(shuffled)), summary_csv(rows));
}

TEST(Csv, HeadersAndFiles) {
  Config c = small_config();
  c.experiment.trials = 3;
  const auto res = run_experiment(c);
  const std::string t = trials_csv(res.trials);
  EXPECT_EQ(t.substr(0, t.find('\n')), "scheme,snr_db,trial,G_N,rate,eff_rate,beams,seed");
  EXPECT_EQ(std::count(t.begin(), t.end(), '\n'), 1 + static_cast<long>(res.trials.size()));
  const std::string s = summary_csv(res.summary);
  EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 1 + static_cast<long>(res.summary.size()));

  const auto dir = std::filesystem::temp_directory_path() / "nfbeam_csv_test";
  std::filesystem::create_directories(dir);
  write_trials_csv(dir / "t.csv", res.trials);
  std::ifstream in(dir / "t.csv", std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_EQ(ss.str(), t);
  std::filesystem::remove_all(dir);
}

TEST(Metadata, RecordsAssumptions) {
  const std::string meta = experiment_metadata_json(small_config());
  EXPECT_NE(meta.find("\"T_tot\""), std::string::npos);
  EXPECT_NE(meta.find("\"t_s\""), std::string::npos);
  EXPECT_NE(meta.find("\"experiment_seed\""), std::string::npos);
}
