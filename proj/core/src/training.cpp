#include "nfbeam/training.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>

#include "nfbeam/beam_training.hpp"
#include "nfbeam/nn/optimizer.hpp"
#include "nfbeam/rng.hpp"

namespace nfbeam {

std::string to_string(Head head) { return head == Head::kDirection ? "direction" : "distance"; }

std::size_t head_classes(Head head, const DatasetHeader& header) {
  return head == Head::kDirection ? header.num_angles : header.num_rings;
}

std::uint32_t head_label(Head head, const Sample& sample) {
  return (head == Head::kDirection ? sample.angle_label : sample.ring_label) - 1;
}

namespace {

std::vector<nn::Tensor> encode_all(std::span<const Sample> samples) {
  std::vector<nn::Tensor> out;
  out.reserve(samples.size());
  for (const Sample& s : samples) out.push_back(nn::input_encode(s.measurements));
  return out;
}

nn::Tensor gather(const std::vector<nn::Tensor>& encoded, std::span<const std::size_t> idx) {
  const std::size_t per = encoded.front().size();
  nn::Tensor batch({idx.size(), encoded.front().dim(0), encoded.front().dim(1)});
  for (std::size_t i = 0; i < idx.size(); ++i) {
    std::copy(encoded[idx[i]].values().begin(), encoded[idx[i]].values().end(),
              batch.values().begin() + static_cast<std::ptrdiff_t>(i * per));
  }
  return batch;
}

std::size_t argmax_row(const nn::Tensor& probs, std::size_t row) {
  const std::size_t k = probs.dim(1);
  const double* p = probs.data() + row * k;
  return static_cast<std::size_t>(std::max_element(p, p + k) - p);
}

constexpr std::size_t kEvalBatch = 500;

LossAccuracy evaluate_encoded(const nn::NetworkModel& model, const std::vector<nn::Tensor>& encoded,
                              const std::vector<std::uint32_t>& labels) {
  if (encoded.empty()) return {};
  double loss = 0.0;
  std::size_t correct = 0;
  std::vector<std::size_t> idx;
  for (std::size_t start = 0; start < encoded.size(); start += kEvalBatch) {
    const std::size_t end = std::min(encoded.size(), start + kEvalBatch);
    idx.resize(end - start);
    std::iota(idx.begin(), idx.end(), start);
    const nn::Tensor probs = model.predict(gather(encoded, idx));
    std::span<const std::uint32_t> lab(labels.data() + start, end - start);
    loss += nn::mean_cross_entropy(probs, lab) * static_cast<double>(end - start);
    for (std::size_t i = 0; i < idx.size(); ++i) correct += argmax_row(probs, i) == lab[i];
  }
  const double n = static_cast<double>(encoded.size());
  return {loss / n, static_cast<double>(correct) / n};
}

}  // namespace

LossAccuracy evaluate_loss(const nn::NetworkModel& model, Head head, std::span<const Sample> samples) {
  std::vector<std::uint32_t> labels;
  for (const Sample& s : samples) labels.push_back(head_label(head, s));
  return evaluate_encoded(model, encode_all(samples), labels);
}

HeadTraining train_head(const Dataset& data, Head head, const Config& cfg, std::uint64_t seed,
                        const EpochCallback& on_epoch) {
  const std::size_t classes = head_classes(head, data.header);
  Rng init_rng(derive_seed(seed, {0}));
  HeadTraining result{nn::build_network(cfg.net, data.header.num_wide, classes, init_rng), {}, 0};
  nn::NetworkModel model = result.model;

  const auto train = data.train();
  const auto val = data.val();
  if (train.empty()) throw std::invalid_argument("train_head: empty training split");
  const std::vector<nn::Tensor> train_x = encode_all(train);
  const std::vector<nn::Tensor> val_x = encode_all(val);
  std::vector<std::uint32_t> train_y, val_y;
  for (const Sample& s : train) train_y.push_back(head_label(head, s));
  for (const Sample& s : val) val_y.push_back(head_label(head, s));

  nn::Optimizer optimizer(cfg.train.optimizer);
  double best_val = std::numeric_limits<double>::infinity();
  std::size_t stale = 0;
  std::vector<std::size_t> order(train.size());
  std::vector<std::uint32_t> batch_labels;

  for (std::size_t epoch = 1; epoch <= cfg.train.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng shuffle_rng(derive_seed(seed, {1, epoch}));
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[shuffle_rng.below(i)]);

    EpochRecord rec;
    rec.epoch = epoch;
    rec.learning_rate = optimizer.learning_rate();
    double loss_sum = 0.0;
    std::size_t correct = 0, seen = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.train.batch_size) {
      const std::size_t end = std::min(order.size(), start + cfg.train.batch_size);
      // A single-sample batch has no batch statistics; the leftover sample is skipped.
      if (end - start < 2 && start != 0) break;
      std::span<const std::size_t> idx(order.data() + start, end - start);
      batch_labels.clear();
      for (std::size_t i : idx) batch_labels.push_back(train_y[i]);
      const nn::Tensor batch = gather(train_x, idx);
      model.zero_grad();
      const nn::Tensor probs = model.forward(batch);
      nn::Tensor grad;
      const double loss = nn::mean_cross_entropy(probs, batch_labels, &grad);
      model.backward(grad);
      optimizer.step(model.parameters());
      loss_sum += loss * static_cast<double>(idx.size());
      seen += idx.size();
      for (std::size_t i = 0; i < idx.size(); ++i) correct += argmax_row(probs, i) == batch_labels[i];
    }
    optimizer.end_epoch();
    rec.train_loss = loss_sum / static_cast<double>(seen);
    rec.train_accuracy = static_cast<double>(correct) / static_cast<double>(seen);
    const LossAccuracy v = val.empty() ? LossAccuracy{rec.train_loss, rec.train_accuracy}
                                       : evaluate_encoded(model, val_x, val_y);
    rec.val_loss = v.loss;
    rec.val_accuracy = v.accuracy;
    result.history.push_back(rec);
    if (on_epoch) on_epoch(head, rec);

    if (rec.val_loss < best_val) {
      best_val = rec.val_loss;
      result.model = model;
      result.best_epoch = epoch;
      stale = 0;
    } else if (++stale >= cfg.train.patience) {
      break;
    }
  }
  return result;
}

TrainedHeads train_heads(const Dataset& data, const Config& cfg, const EpochCallback& on_epoch) {
  check_compatible(data.header, cfg);
  const std::uint64_t seed = stream_seed(cfg, SeedStream::kTraining);
  TrainedHeads heads;
  heads.direction = train_head(data, Head::kDirection, cfg, derive_seed(seed, {1}), on_epoch);
  heads.distance = train_head(data, Head::kDistance, cfg, derive_seed(seed, {2}), on_epoch);
  return heads;
}

namespace {

HeadReport empty_report(std::size_t classes, std::size_t max_k) {
  HeadReport r;
  r.classes = classes;
  r.topk_accuracy.assign(std::min(max_k, classes), 0.0);
  r.confusion.assign(classes, std::vector<std::size_t>(classes, 0));
  return r;
}

void accumulate(HeadReport& r, const std::vector<double>& probs, std::size_t truth) {
  const std::vector<std::size_t> ranked = top_k(probs, r.topk_accuracy.size());
  auto hit = std::find(ranked.begin(), ranked.end(), truth);
  if (hit != ranked.end()) {
    for (auto k = static_cast<std::size_t>(hit - ranked.begin()); k < ranked.size(); ++k) {
      r.topk_accuracy[k] += 1.0;
    }
  }
  r.confusion[truth - 1][ranked.front() - 1] += 1;
  r.mean_index_error += std::abs(static_cast<double>(ranked.front()) - static_cast<double>(truth));
  ++r.count;
}

void finalize(HeadReport& r) {
  if (r.count == 0) return;
  for (double& a : r.topk_accuracy) a /= static_cast<double>(r.count);
  r.mean_index_error /= static_cast<double>(r.count);
}

}  // namespace

AccuracyReport evaluate_heads(const HeadPredictor& direction, const HeadPredictor& distance,
                              std::span<const Sample> samples, const EvalOptions& opts) {
  AccuracyReport report;
  report.direction = empty_report(direction.classes(), opts.max_k);
  report.distance = empty_report(distance.classes(), opts.max_k);
  std::map<long, SnrBucketReport> buckets;
  for (const Sample& s : samples) {
    const MeasurementVector y = s.measurement_vector();
    const auto pd = direction.probabilities(y);
    const auto pr = distance.probabilities(y);
    accumulate(report.direction, pd, s.angle_label);
    accumulate(report.distance, pr, s.ring_label);
    const long b = static_cast<long>(std::floor(s.snr_db / opts.snr_bucket_db));
    auto [it, inserted] = buckets.try_emplace(b);
    if (inserted) {
      it->second.snr_lo = static_cast<double>(b) * opts.snr_bucket_db;
      it->second.snr_hi = it->second.snr_lo + opts.snr_bucket_db;
      it->second.direction = empty_report(direction.classes(), opts.max_k);
      it->second.distance = empty_report(distance.classes(), opts.max_k);
    }
    accumulate(it->second.direction, pd, s.angle_label);
    accumulate(it->second.distance, pr, s.ring_label);
  }
  finalize(report.direction);
  finalize(report.distance);
  for (auto& [key, bucket] : buckets) {
    finalize(bucket.direction);
    finalize(bucket.distance);
    report.by_snr.push_back(std::move(bucket));
  }
  return report;
}

void write_history_csv(const std::filesystem::path& path, const TrainedHeads& heads) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << "head,epoch,train_loss,val_loss,train_acc,val_acc,learning_rate,best\n";
  char line[256];
  for (Head h : {Head::kDirection, Head::kDistance}) {
    const HeadTraining& t = h == Head::kDirection ? heads.direction : heads.distance;
    for (const EpochRecord& r : t.history) {
      std::snprintf(line, sizeof line, "%s,%zu,%.17g,%.17g,%.17g,%.17g,%.17g,%d\n", to_string(h).c_str(),
                    r.epoch, r.train_loss, r.val_loss, r.train_accuracy, r.val_accuracy, r.learning_rate,
                    r.epoch == t.best_epoch ? 1 : 0);
      out << line;
    }
  }
}

void write_report_csv(const std::filesystem::path& path, const AccuracyReport& report) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << "head,snr_lo,snr_hi,count,k,topk_accuracy,mean_index_error\n";
  char line[256];
  auto emit = [&](const char* head, double lo, double hi, const HeadReport& r) {
    for (std::size_t k = 0; k < r.topk_accuracy.size(); ++k) {
      std::snprintf(line, sizeof line, "%s,%g,%g,%zu,%zu,%.6f,%.6f\n", head, lo, hi, r.count, k + 1,
                    r.topk_accuracy[k], r.mean_index_error);
      out << line;
    }
  };
  emit("direction", -INFINITY, INFINITY, report.direction);
  emit("distance", -INFINITY, INFINITY, report.distance);
  for (const auto& b : report.by_snr) {
    emit("direction", b.snr_lo, b.snr_hi, b.direction);
    emit("distance", b.snr_lo, b.snr_hi, b.distance);
  }
}

}  // namespace nfbeam
