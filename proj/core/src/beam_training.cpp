#include "nfbeam/beam_training.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

namespace nfbeam {

std::vector<std::size_t> top_k(std::span<const double> probs, std::size_t k) {
  if (k < 1 || k > probs.size()) {
    throw std::out_of_range("top_k: k=" + std::to_string(k) + " outside 1.." + std::to_string(probs.size()));
  }
  std::vector<std::size_t> order(probs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return probs[a] > probs[b]; });
  std::vector<std::size_t> out(k);
  for (std::size_t i = 0; i < k; ++i) out[i] = order[i] + 1;
  return out;
}

std::vector<std::size_t> candidate_indices(std::span<const std::size_t> angles,
                                           std::span<const std::size_t> rings, std::size_t num_angles) {
  std::vector<std::size_t> out;
  out.reserve(angles.size() * rings.size());
  for (std::size_t ring : rings) {
    for (std::size_t angle : angles) out.push_back((ring - 1) * num_angles + angle);
  }
  return out;
}

namespace {

void check_heads(const MeasurementVector& y, const HeadPredictor& direction,
                 const HeadPredictor& distance, const PolarCodebook& book) {
  if (direction.classes() != book.num_angles()) {
    throw std::invalid_argument("direction head has " + std::to_string(direction.classes()) +
                                " classes, codebook has N=" + std::to_string(book.num_angles()));
  }
  if (distance.classes() != book.num_rings()) {
    throw std::invalid_argument("distance head has " + std::to_string(distance.classes()) +
                                " classes, codebook has S=" + std::to_string(book.num_rings()));
  }
  if (y.size() == 0) throw std::invalid_argument("empty wide-beam measurement vector");
}

std::vector<double> checked_probs(const HeadPredictor& head, const MeasurementVector& y) {
  std::vector<double> p = head.probabilities(y);
  if (p.size() != head.classes()) throw std::invalid_argument("predictor returned wrong length");
  return p;
}

}  // namespace

SchemeResult original_scheme(const MeasurementVector& y, const HeadPredictor& direction,
                             const HeadPredictor& distance, const PolarCodebook& book) {
  check_heads(y, direction, distance, book);
  const auto pa = checked_probs(direction, y);
  const auto pr = checked_probs(distance, y);
  const std::size_t angle = top_k(pa, 1).front();
  const std::size_t ring = top_k(pr, 1).front();
  SchemeResult r;
  r.index = codeword_index(ring, angle, book.num_angles(), book.num_rings());
  r.codeword = book.codeword(r.index);
  r.beams_tested = y.size();
  return r;
}

SchemeResult improved_scheme(const MeasurementVector& y, const HeadPredictor& direction,
                             const HeadPredictor& distance, const PolarCodebook& book,
                             const ChannelVector& h, const LinkConfig& link, Rng& rng,
                             std::size_t top_angles, std::size_t top_rings) {
  check_heads(y, direction, distance, book);
  const auto pa = checked_probs(direction, y);
  const auto pr = checked_probs(distance, y);
  const auto angles = top_k(pa, top_angles);
  const auto rings = top_k(pr, top_rings);
  SchemeResult r;
  r.top_angles = top_angles;
  r.top_rings = top_rings;
  r.candidates = candidate_indices(angles, rings, book.num_angles());
  double best = -1.0;
  for (std::size_t b : r.candidates) {
    const double mag = std::abs(measure(book.codeword(b), h, link, rng));
    if (mag > best || (mag == best && b < r.index)) {
      best = mag;
      r.index = b;
    }
  }
  r.codeword = book.codeword(r.index);
  r.beams_tested = y.size() + r.candidates.size();
  return r;
}

SchemeResult random_baseline(const PolarCodebook& book, Rng& rng) {
  SchemeResult r;
  r.index = rng.below(book.size()) + 1;
  r.codeword = book.codeword(r.index);
  r.beams_tested = 0;
  return r;
}

namespace {

SchemeResult noisy_sweep(const std::vector<CVector>& words, const ChannelVector& h,
                         const LinkConfig& link, Rng& rng) {
  SchemeResult r;
  double best = -1.0;
  for (std::size_t i = 0; i < words.size(); ++i) {
    const double mag = std::abs(measure(words[i], h, link, rng));
    if (mag > best) {
      best = mag;
      r.index = i + 1;
    }
  }
  r.codeword = words.at(r.index - 1);
  r.beams_tested = words.size();
  return r;
}

}  // namespace

SchemeResult far_field_baseline(const NarrowCodebook& narrow, const ChannelVector& h,
                                const LinkConfig& link, Rng& rng) {
  return noisy_sweep(narrow.codewords, h, link, rng);
}

SchemeResult sweep_baseline(const PolarCodebook& book, const ChannelVector& h, const LinkConfig& link,
                            Rng& rng) {
  return noisy_sweep(book.codewords(), h, link, rng);
}

SchemeResult perfect_sweep(const PolarCodebook& book, const ChannelVector& h) {
  SchemeResult r;
  r.index = sweep_oracle(book, h).index;
  r.codeword = book.codeword(r.index);
  r.beams_tested = book.size();
  return r;
}

}  // namespace nfbeam
