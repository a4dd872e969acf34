#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "nfbeam/rng.hpp"
#include "nfbeam/types.hpp"

namespace nfbeam {

/// Default carrier: 30 GHz.
inline constexpr double kDefaultWavelength = 0.00999;

/// Uniform linear array at the base station.
struct ArrayConfig {
  std::size_t num_antennas = 64;
  double wavelength = kDefaultWavelength;
  /// Element spacing in meters; half a wavelength unless set.
  double spacing = kDefaultWavelength / 2.0;

  static ArrayConfig half_wavelength(std::size_t n, double wavelength = kDefaultWavelength) {
    return {n, wavelength, wavelength / 2.0};
  }
  /// Throws std::invalid_argument on N = 0 or non-positive lengths.
  void validate() const;
};

/// One propagation path. `angle` is the sine of the physical angle of arrival.
struct PathParams {
  cdouble gain{1.0, 0.0};
  double distance = 1.0;
  double angle = 0.0;
};

/// Length-N complex channel seen by the array.
struct ChannelVector {
  CVector entries;

  std::size_t size() const { return entries.size(); }
  const cdouble& operator[](std::size_t i) const { return entries[i]; }
  cdouble& operator[](std::size_t i) { return entries[i]; }
};

/// Path statistics used when drawing random channels.
struct ScenarioConfig {
  std::size_t num_paths = 3;
  /// One entry per path; path 0 is the line-of-sight path.
  std::vector<double> gain_variances{1.0, 0.01, 0.01};
  double min_distance = 10.0;
  double max_distance = 60.0;
  double min_angle = -1.0;
  double max_angle = 1.0;

  void validate() const;
};

/// delta_n = n - (N-1)/2: element offsets from the array center, in spacings.
RVector antenna_offsets(const ArrayConfig& cfg);

/// Exact distance from antenna `n` to the point at (r, theta) relative to the
/// array center.
double element_distance(const ArrayConfig& cfg, double r, double theta, std::size_t n);

/// Unit-norm spherical-wave steering vector b(theta, r); entry n is
/// exp(-j 2pi/lambda (r_n - r)) / sqrt(N).
CVector near_steering(const ArrayConfig& cfg, double theta, double r);

/// h = sqrt(N/L) sum_l g_l exp(-j 2pi r_l / lambda) b(theta_l, r_l).
/// Throws std::invalid_argument when `paths` is empty.
ChannelVector synth_channel(const ArrayConfig& cfg, std::span<const PathParams> paths);

/// Draws the path list of one channel realization; the first path is LoS.
std::vector<PathParams> sample_paths(Rng& rng, const ScenarioConfig& scenario);

}  // namespace nfbeam
