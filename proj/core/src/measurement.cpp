#include "nfbeam/measurement.hpp"

#include <cmath>
#include <stdexcept>

namespace nfbeam {

LinkConfig LinkConfig::from_snr_db(double snr_db) {
  return {std::pow(10.0, snr_db / 10.0), 1.0, {1.0, 0.0}};
}

void LinkConfig::validate() const {
  if (!(power >= 0.0)) throw std::invalid_argument("link: transmit power must be >= 0");
  if (!(noise_variance >= 0.0)) throw std::invalid_argument("link: noise variance must be >= 0");
  if (std::abs(std::norm(pilot) - 1.0) > 1e-12) {
    throw std::invalid_argument("link: pilot symbol must have unit modulus");
  }
}

cdouble inner(std::span<const cdouble> w, std::span<const cdouble> h) {
  if (w.size() != h.size()) throw std::invalid_argument("inner: length mismatch");
  double re = 0.0;
  double im = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    // conj(w) * h
    re += w[i].real() * h[i].real() + w[i].imag() * h[i].imag();
    im += w[i].real() * h[i].imag() - w[i].imag() * h[i].real();
  }
  return {re, im};
}

cdouble measure(std::span<const cdouble> w, const ChannelVector& h, const LinkConfig& link,
                Rng& rng) {
  if (w.size() != h.size()) {
    throw std::invalid_argument("measure: codeword length " + std::to_string(w.size()) +
                                " != channel length " + std::to_string(h.size()));
  }
  cdouble y = std::sqrt(link.power) * inner(w, h.entries) * link.pilot;
  if (link.noise_variance > 0.0) {
    cdouble noise{};
    for (const cdouble& wi : w) noise += std::conj(wi) * rng.complex_normal(link.noise_variance);
    y += noise;
  }
  return y;
}

MeasurementVector measure_wide(const WideCodebook& wide, const ChannelVector& h,
                               const LinkConfig& link, Rng& rng) {
  MeasurementVector out;
  out.values.reserve(wide.size());
  out.snr_db = link.noise_variance > 0.0 ? 10.0 * std::log10(link.power / link.noise_variance)
                                         : INFINITY;
  for (const CVector& w : wide.codewords) out.values.push_back(measure(w, h, link, rng));
  return out;
}

double rate_from_gain(double beam_gain, const LinkConfig& link) {
  if (!(link.noise_variance > 0.0)) {
    throw std::invalid_argument("achievable_rate: undefined for zero noise variance");
  }
  return std::log2(1.0 + link.power * beam_gain / link.noise_variance);
}

double achievable_rate(std::span<const cdouble> w, const ChannelVector& h, const LinkConfig& link) {
  return rate_from_gain(std::norm(inner(w, h.entries)), link);
}

SweepResult sweep_oracle(const PolarCodebook& book, const ChannelVector& h) {
  std::size_t best = 0;
  double best_gain = -1.0;
  const auto& words = book.codewords();
  for (std::size_t i = 0; i < words.size(); ++i) {
    const double g = std::norm(inner(words[i], h.entries));
    if (g > best_gain) {
      best_gain = g;
      best = i;
    }
  }
  const RingAngle pair = index_to_pair(best + 1, book.num_angles(), book.num_rings());
  return {best + 1, pair.ring, pair.angle};
}

}  // namespace nfbeam
