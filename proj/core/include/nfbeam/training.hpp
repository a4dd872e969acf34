#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "nfbeam/config.hpp"
#include "nfbeam/dataset.hpp"
#include "nfbeam/nn/network.hpp"
#include "nfbeam/predictor.hpp"

namespace nfbeam {

enum class Head { kDirection, kDistance };

std::string to_string(Head head);
std::size_t head_classes(Head head, const DatasetHeader& header);
/// 0-based class of `sample` for `head`.
std::uint32_t head_label(Head head, const Sample& sample);

struct EpochRecord {
  std::size_t epoch = 0;  ///< 1-based
  double train_loss = 0.0;
  double val_loss = 0.0;
  double train_accuracy = 0.0;
  double val_accuracy = 0.0;
  double learning_rate = 0.0;
};

struct HeadTraining {
  nn::NetworkModel model;  ///< best-validation checkpoint
  std::vector<EpochRecord> history;
  std::size_t best_epoch = 0;
};

struct TrainedHeads {
  HeadTraining direction;
  HeadTraining distance;
};

/// Called after every epoch; handy for progress output.
using EpochCallback = std::function<void(Head, const EpochRecord&)>;

/// Trains one head with Adam/SGD on the training split and keeps the
/// parameters of the epoch with the lowest validation loss. Stops after
/// `patience` epochs without improvement.
HeadTraining train_head(const Dataset& data, Head head, const Config& cfg, std::uint64_t seed,
                        const EpochCallback& on_epoch = {});

/// Trains the direction (N-way) and distance (S-way) heads on the same samples.
TrainedHeads train_heads(const Dataset& data, const Config& cfg, const EpochCallback& on_epoch = {});

/// Mean loss and top-1 accuracy of an eval-mode model on a sample span.
struct LossAccuracy {
  double loss = 0.0;
  double accuracy = 0.0;
};
LossAccuracy evaluate_loss(const nn::NetworkModel& model, Head head, std::span<const Sample> samples);

struct HeadReport {
  std::size_t classes = 0;
  std::size_t count = 0;
  /// topk_accuracy[k-1] is the top-k accuracy.
  std::vector<double> topk_accuracy;
  /// confusion[true-1][predicted-1] counts of the top-1 prediction.
  std::vector<std::vector<std::size_t>> confusion;
  /// Mean |predicted - true| of the top-1 class index.
  double mean_index_error = 0.0;

  double top1() const { return topk_accuracy.empty() ? 0.0 : topk_accuracy.front(); }
};

struct SnrBucketReport {
  double snr_lo = 0.0, snr_hi = 0.0;
  HeadReport direction, distance;
};

struct AccuracyReport {
  HeadReport direction, distance;
  std::vector<SnrBucketReport> by_snr;
};

struct EvalOptions {
  std::size_t max_k = 5;
  double snr_bucket_db = 5.0;
};

/// Top-k accuracy (k = 1..max_k, capped at each head's class count), top-1
/// confusion and SNR-stratified breakdown.
AccuracyReport evaluate_heads(const HeadPredictor& direction, const HeadPredictor& distance,
                              std::span<const Sample> samples, const EvalOptions& opts = {});

void write_history_csv(const std::filesystem::path& path, const TrainedHeads& heads);
void write_report_csv(const std::filesystem::path& path, const AccuracyReport& report);

}  // namespace nfbeam
