#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <iterator>
#include <set>

#include "nfbeam/binary_io.hpp"
#include "nfbeam/dataset.hpp"
#include "nfbeam/nn/optimizer.hpp"
#include "nfbeam/training.hpp"

using namespace nfbeam;
namespace fs = std::filesystem;

namespace {

Config small_config(std::size_t samples) {
  Config cfg = desk_scale();
  cfg.array = ArrayConfig::half_wavelength(16);
  cfg.codebook.num_rings = 3;
  cfg.dataset.num_samples = samples;
  cfg.net.conv_channels = {8, 16};
  cfg.net.hidden = {32, 32, 16};
  cfg.train.batch_size = 32;
  return cfg;
}

std::vector<char> slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

fs::path temp(const std::string& name) { return fs::temp_directory_path() / name; }

}  // namespace

TEST(Split, RoundingRule) {
  const auto s = split_sizes(10, 0.1, 0.1);
  EXPECT_EQ(s.train, 8u);
  EXPECT_EQ(s.val, 1u);
  EXPECT_EQ(s.test, 1u);
  const auto t = split_sizes(19, 0.1, 0.1);
  EXPECT_EQ(t.val, 1u);
  EXPECT_EQ(t.test, 1u);
  EXPECT_EQ(t.train, 17u);
  EXPECT_THROW(split_sizes(10, 0.6, 0.6), ConfigError);
}

TEST(Dataset, SplitsAreDisjointAndCover) {
  const Dataset d = generate_dataset(small_config(57));
  const auto& h = d.header;
  EXPECT_EQ(h.split.train + h.split.val + h.split.test, h.sample_count);
  std::set<const Sample*> seen;
  for (auto span : {d.train(), d.val(), d.test()}) {
    for (const Sample& s : span) EXPECT_TRUE(seen.insert(&s).second);
  }
  EXPECT_EQ(seen.size(), d.samples.size());
}

TEST(Dataset, LabelsInRangeAndMatchOracle) {
  const Config cfg = small_config(200);
  const Dataset d = generate_dataset(cfg);
  for (const Sample& s : d.samples) {
    EXPECT_GE(s.angle_label, 1u);
    EXPECT_LE(s.angle_label, 16u);
    EXPECT_GE(s.ring_label, 1u);
    EXPECT_LE(s.ring_label, 3u);
    EXPECT_EQ(s.measurements.size(), 4u);
    EXPECT_GE(s.snr_db, 0.0);
    EXPECT_LT(s.snr_db, 20.0);
  }
  EXPECT_EQ(audit_labels(d, cfg, 1.0, 5), 0u);
}

TEST(Dataset, AuditDetectsTampering) {
  const Config cfg = small_config(100);
  Dataset d = generate_dataset(cfg);
  for (Sample& s : d.samples) s.angle_label = s.angle_label % 16 + 1;
  EXPECT_EQ(audit_labels(d, cfg, 0.01, 3), 1u);
  EXPECT_EQ(audit_labels(d, cfg, 1.0, 3), 100u);
}

TEST(Dataset, FileRoundTripAndDeterminism) {
  const Config cfg = small_config(40);
  const Dataset d = generate_dataset(cfg);
  const auto a = temp("nfbeam_ds_a.bin"), b = temp("nfbeam_ds_b.bin");
  write_dataset(a, d);
  write_dataset(b, generate_dataset(cfg));
  EXPECT_EQ(slurp(a), slurp(b));
  const Dataset back = read_dataset(a);
  EXPECT_EQ(back.header, d.header);
  EXPECT_EQ(back.samples, d.samples);
  check_compatible(back.header, cfg);
  EXPECT_THROW(check_compatible(back.header, desk_scale()), ConfigError);

  fs::resize_file(a, fs::file_size(a) - 3);
  EXPECT_THROW(read_dataset(a), FormatError);
  Config other = cfg;
  other.seed = cfg.seed + 1;
  write_dataset(b, generate_dataset(other));
  EXPECT_NE(slurp(b), slurp(temp("nfbeam_ds_a.bin")));
  fs::remove(a);
  fs::remove(b);
}

TEST(Dataset, EveryRingAppearsAtDeskScale) {
  const Dataset d = generate_dataset(desk_scale());
  std::vector<std::size_t> counts(5, 0);
  for (const Sample& s : d.samples) ++counts[s.ring_label - 1];
  for (std::size_t c : counts) EXPECT_GT(c, 0u);
}

TEST(Dataset, LabelCsv) {
  const Dataset d = generate_dataset(small_config(10));
  const auto p = temp("nfbeam_labels.csv");
  export_labels_csv(p, d);
  std::ifstream in(p);
  std::string header, first;
  std::getline(in, header);
  std::getline(in, first);
  EXPECT_EQ(header, "split,index,seed,snr_db,angle_label,ring_label,codeword_index");
  EXPECT_EQ(first.rfind("train,0,", 0), 0u);
  fs::remove(p);
}

TEST(Training, LossFallsAndHistoryIsComplete) {
  Config cfg = small_config(600);
  cfg.train.epochs = 5;
  const Dataset d = generate_dataset(cfg);
  const HeadTraining t = train_head(d, Head::kDirection, cfg, 99);
  ASSERT_EQ(t.history.size(), 5u);
  EXPECT_LE(t.history[4].train_loss, t.history[0].train_loss);
  EXPECT_GE(t.best_epoch, 1u);
  EXPECT_NEAR(t.history[1].learning_rate, 0.01 * 0.95, 1e-15);
  const auto v = evaluate_loss(t.model, Head::kDirection, d.val());
  EXPECT_DOUBLE_EQ(v.loss, t.history[t.best_epoch - 1].val_loss);
}

TEST(Training, SeedFixedRunIsReproducible) {
  Config cfg = small_config(200);
  cfg.train.epochs = 2;
  const Dataset d = generate_dataset(cfg);
  const auto a = nn::serialize_model(train_head(d, Head::kDistance, cfg, 4).model);
  const auto b = nn::serialize_model(train_head(d, Head::kDistance, cfg, 4).model);
  EXPECT_EQ(a, b);
}

TEST(Training, SingleRingIsLearnedImmediately) {
  Config cfg = small_config(200);
  cfg.codebook.num_rings = 1;
  cfg.experiment.schemes.clear();
  cfg.train.epochs = 1;
  const Dataset d = generate_dataset(cfg);
  const HeadTraining t = train_head(d, Head::kDistance, cfg, 8);
  EXPECT_EQ(t.history[0].val_accuracy, 1.0);
  EXPECT_EQ(t.history[0].train_accuracy, 1.0);
}

TEST(Training, EarlyStoppingHonoursPatience) {
  Config cfg = small_config(300);
  cfg.train.epochs = 30;
  cfg.train.patience = 2;
  cfg.train.optimizer.learning_rate = 0.05;
  const Dataset d = generate_dataset(cfg);
  const HeadTraining t = train_head(d, Head::kDirection, cfg, 1);
  EXPECT_LE(t.history.size(), t.best_epoch + 2);
}

TEST(Training, DeskModelFitsFixedBatch) {
  Config cfg = desk_scale();
  cfg.dataset.num_samples = 32;
  const Dataset d = generate_dataset(cfg);
  std::vector<nn::Tensor> xs;
  std::vector<std::uint32_t> ys;
  for (const Sample& s : d.samples) {
    xs.push_back(nn::input_encode(s.measurements));
    ys.push_back(head_label(Head::kDirection, s));
  }
  const nn::Tensor batch = nn::stack(xs);
  Rng rng(12);
  nn::NetworkModel model = nn::build_network(cfg.net, 16, 64, rng);
  nn::Optimizer opt(cfg.train.optimizer);
  const double first = nn::compute_gradients(model, batch, ys);
  double last = first;
  for (int step = 0; step < 50; ++step) {
    opt.step(model.parameters());
    last = nn::compute_gradients(model, batch, ys);
  }
  EXPECT_LT(last, 0.5 * first);
}

TEST(EvaluateHeads, OracleUniformAndMonotone) {
  const Config cfg = desk_scale();
  Config small = cfg;
  small.dataset.num_samples = 2000;
  const Dataset d = generate_dataset(small);
  const auto samples = std::span<const Sample>(d.samples);

  // per-sample oracle: wrap in a predictor that looks the label up by measurement
  struct Lookup final : HeadPredictor {
    const Dataset* data;
    bool angle;
    std::size_t n;
    std::vector<double> probabilities(const MeasurementVector& y) const override {
      for (const Sample& s : data->samples) {
        if (s.measurements == y.values) {
          std::vector<double> p(n, 0.0);
          p[(angle ? s.angle_label : s.ring_label) - 1] = 1.0;
          return p;
        }
      }
      return std::vector<double>(n, 1.0 / double(n));
    }
    std::size_t classes() const override { return n; }
  };
  Lookup dir, dist;
  dir.data = dist.data = &d;
  dir.angle = true, dist.angle = false;
  dir.n = 64, dist.n = 5;
  const AccuracyReport oracle = evaluate_heads(dir, dist, samples.first(300));
  EXPECT_EQ(oracle.direction.top1(), 1.0);
  EXPECT_EQ(oracle.distance.top1(), 1.0);
  EXPECT_EQ(oracle.direction.mean_index_error, 0.0);

  const UniformPredictor udir(64), udist(5);
  EvalOptions opts;
  opts.max_k = 64;
  const AccuracyReport uni = evaluate_heads(udir, udist, samples, opts);
  const double p = 1.0 / 64, sd = std::sqrt(p * (1 - p) / 2000);
  EXPECT_NEAR(uni.direction.top1(), p, 3 * sd);
  for (std::size_t k = 1; k < uni.direction.topk_accuracy.size(); ++k) {
    EXPECT_GE(uni.direction.topk_accuracy[k], uni.direction.topk_accuracy[k - 1]);
  }
  EXPECT_EQ(uni.direction.topk_accuracy.size(), 64u);
  EXPECT_EQ(uni.direction.topk_accuracy.back(), 1.0);
  EXPECT_EQ(uni.distance.topk_accuracy.size(), 5u);
  EXPECT_EQ(uni.distance.topk_accuracy.back(), 1.0);
  std::size_t bucketed = 0;
  for (const auto& b : uni.by_snr) bucketed += b.direction.count;
  EXPECT_EQ(bucketed, 2000u);
}
