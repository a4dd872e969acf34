#pragma once

#include <cstddef>
#include <span>

#include "nfbeam/codebook.hpp"
#include "nfbeam/geometry.hpp"
#include "nfbeam/rng.hpp"
#include "nfbeam/types.hpp"

namespace nfbeam {

/// Pilot link parameters, all linear scale.
struct LinkConfig {
  double power = 1.0;
  double noise_variance = 1.0;
  cdouble pilot{1.0, 0.0};

  /// P / sigma^2 = 10^(snr_db/10) with sigma^2 = 1.
  static LinkConfig from_snr_db(double snr_db);
  static LinkConfig noiseless(double power = 1.0) { return {power, 0.0, {1.0, 0.0}}; }
  void validate() const;
};

/// Received pilot values of all wide beams, in beam order.
struct MeasurementVector {
  CVector values;
  double snr_db = 0.0;

  std::size_t size() const { return values.size(); }
};

/// Oracle result: 1-based codeword index and its (ring, angle) pair.
struct SweepResult {
  std::size_t index = 1;
  std::size_t ring = 1;
  std::size_t angle = 1;
};

/// w^H h.
cdouble inner(std::span<const cdouble> w, std::span<const cdouble> h);
inline cdouble inner(const CVector& w, const ChannelVector& h) { return inner(w, h.entries); }

/// y = sqrt(P) w^H h x + w^H n with fresh n ~ CN(0, sigma^2 I).
/// Throws std::invalid_argument on a length mismatch.
cdouble measure(std::span<const cdouble> w, const ChannelVector& h, const LinkConfig& link, Rng& rng);

MeasurementVector measure_wide(const WideCodebook& wide, const ChannelVector& h,
                               const LinkConfig& link, Rng& rng);

/// log2(1 + P |w^H h|^2 / sigma^2); sigma^2 = 0 is rejected.
double achievable_rate(std::span<const cdouble> w, const ChannelVector& h, const LinkConfig& link);
double rate_from_gain(double beam_gain, const LinkConfig& link);

/// Noiseless exhaustive search for argmax |w_i^H h|; ties go to the smallest index.
SweepResult sweep_oracle(const PolarCodebook& book, const ChannelVector& h);

}  // namespace nfbeam
