#include "nfbeam/geometry.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace nfbeam {

void ArrayConfig::validate() const {
  if (num_antennas < 1) throw std::invalid_argument("array: num_antennas must be >= 1");
  if (!(wavelength > 0.0)) throw std::invalid_argument("array: wavelength must be > 0");
  if (!(spacing > 0.0)) throw std::invalid_argument("array: antenna spacing must be > 0");
}

void ScenarioConfig::validate() const {
  if (num_paths < 1) throw std::invalid_argument("scenario: num_paths must be >= 1");
  if (gain_variances.size() != num_paths) {
    throw std::invalid_argument("scenario: gain_variances needs " + std::to_string(num_paths) +
                                " entries");
  }
  for (double v : gain_variances) {
    if (!(v >= 0.0)) throw std::invalid_argument("scenario: gain variances must be >= 0");
  }
  if (!(min_distance > 0.0) || !(max_distance >= min_distance)) {
    throw std::invalid_argument("scenario: need 0 < min_distance <= max_distance");
  }
  if (min_angle < -1.0 || max_angle > 1.0 || !(max_angle >= min_angle)) {
    throw std::invalid_argument("scenario: angle range must lie in [-1, 1]");
  }
}

RVector antenna_offsets(const ArrayConfig& cfg) {
  const std::size_t n = cfg.num_antennas;
  RVector offsets(n);
  const double center = (static_cast<double>(n) - 1.0) / 2.0;
  for (std::size_t i = 0; i < n; ++i) offsets[i] = static_cast<double>(i) - center;
  return offsets;
}

namespace {

double distance_from_offset(double r, double theta, double offset_m) {
  return std::sqrt(r * r + offset_m * offset_m - 2.0 * r * offset_m * theta);
}

}  // namespace

double element_distance(const ArrayConfig& cfg, double r, double theta, std::size_t n) {
  const double center = (static_cast<double>(cfg.num_antennas) - 1.0) / 2.0;
  const double offset_m = (static_cast<double>(n) - center) * cfg.spacing;
  return distance_from_offset(r, theta, offset_m);
}

CVector near_steering(const ArrayConfig& cfg, double theta, double r) {
  const std::size_t n = cfg.num_antennas;
  const double k = 2.0 * std::numbers::pi / cfg.wavelength;
  const double amp = 1.0 / std::sqrt(static_cast<double>(n));
  const double center = (static_cast<double>(n) - 1.0) / 2.0;
  CVector b(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double offset_m = (static_cast<double>(i) - center) * cfg.spacing;
    // r_n - r computed as a difference of nearby large numbers loses digits,
    // so use (r_n^2 - r^2) / (r_n + r).
    const double rn = distance_from_offset(r, theta, offset_m);
    const double diff = (offset_m * offset_m - 2.0 * r * offset_m * theta) / (rn + r);
    b[i] = std::polar(amp, -k * diff);
  }
  return b;
}

ChannelVector synth_channel(const ArrayConfig& cfg, std::span<const PathParams> paths) {
  if (paths.empty()) throw std::invalid_argument("synth_channel: path list is empty");
  const std::size_t n = cfg.num_antennas;
  const double k = 2.0 * std::numbers::pi / cfg.wavelength;
  const double scale = std::sqrt(static_cast<double>(n) / static_cast<double>(paths.size()));
  ChannelVector h{CVector(n, cdouble{})};
  for (const PathParams& p : paths) {
    // exp(-j k r) with r reduced modulo lambda first to keep the phase small.
    const double phase = -k * std::fmod(p.distance, cfg.wavelength);
    const cdouble coeff = scale * p.gain * std::polar(1.0, phase);
    const CVector b = near_steering(cfg, p.angle, p.distance);
    for (std::size_t i = 0; i < n; ++i) h[i] += coeff * b[i];
  }
  return h;
}

std::vector<PathParams> sample_paths(Rng& rng, const ScenarioConfig& scenario) {
  std::vector<PathParams> paths(scenario.num_paths);
  for (std::size_t l = 0; l < scenario.num_paths; ++l) {
    PathParams& p = paths[l];
    p.gain = rng.complex_normal(scenario.gain_variances[l]);
    p.distance = rng.uniform(scenario.min_distance, scenario.max_distance);
    p.angle = rng.uniform(scenario.min_angle, scenario.max_angle);
  }
  return paths;
}

}  // namespace nfbeam
