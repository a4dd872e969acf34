#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "nfbeam/codebook.hpp"
#include "nfbeam/measurement.hpp"
#include "nfbeam/predictor.hpp"
#include "nfbeam/rng.hpp"

namespace nfbeam {

/// Outcome of one beam-selection run.
struct SchemeResult {
  std::size_t index = 1;       ///< chosen codeword, 1-based in its codebook
  CVector codeword;
  std::size_t beams_tested = 0;
  std::size_t top_angles = 0;  ///< K (improved scheme)
  std::size_t top_rings = 0;   ///< L (improved scheme)
  std::vector<std::size_t> candidates;  ///< B (improved scheme)
};

/// 1-based indices of the k largest entries, largest first; equal values
/// keep the smaller index first. Throws std::out_of_range unless 1 <= k <= size.
std::vector<std::size_t> top_k(std::span<const double> probs, std::size_t k);

/// {(gamma-1)N + sigma}: rings outer, angles inner, both in the given order.
std::vector<std::size_t> candidate_indices(std::span<const std::size_t> angles,
                                           std::span<const std::size_t> rings, std::size_t num_angles);

/// Combines the argmax angle and ring of the two heads; tests only the M wide beams.
SchemeResult original_scheme(const MeasurementVector& y, const HeadPredictor& direction,
                             const HeadPredictor& distance, const PolarCodebook& book);

/// Tests the K*L codewords at the intersection of the top-K angles and the
/// top-L rings with fresh pilots and keeps the strongest |y|.
SchemeResult improved_scheme(const MeasurementVector& y, const HeadPredictor& direction,
                             const HeadPredictor& distance, const PolarCodebook& book,
                             const ChannelVector& h, const LinkConfig& link, Rng& rng,
                             std::size_t top_angles, std::size_t top_rings);

/// Uniformly random codeword, no pilots.
SchemeResult random_baseline(const PolarCodebook& book, Rng& rng);

/// Noisy exhaustive sweep of the N far-field narrow beams.
SchemeResult far_field_baseline(const NarrowCodebook& narrow, const ChannelVector& h,
                                const LinkConfig& link, Rng& rng);

/// Noisy exhaustive sweep of all I polar codewords.
SchemeResult sweep_baseline(const PolarCodebook& book, const ChannelVector& h, const LinkConfig& link,
                            Rng& rng);

/// Noiseless sweep (the labelling oracle) packaged as a scheme; tests I beams.
SchemeResult perfect_sweep(const PolarCodebook& book, const ChannelVector& h);

}  // namespace nfbeam
