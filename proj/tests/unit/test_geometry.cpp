#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "nfbeam/codebook.hpp"
#include "nfbeam/geometry.hpp"
#include "nfbeam/rng.hpp"

using namespace nfbeam;

namespace {

double norm2(const CVector& v) {
  double s = 0.0;
  for (auto x : v) s += std::norm(x);
  return std::sqrt(s);
}

cdouble dot(const CVector& w, const CVector& h) {
  cdouble s{};
  for (std::size_t i = 0; i < w.size(); ++i) s += std::conj(w[i]) * h[i];
  return s;
}

}  // namespace

TEST(AntennaOffsets, Examples) {
  EXPECT_EQ(antenna_offsets(ArrayConfig::half_wavelength(1)), (RVector{0.0}));
  EXPECT_EQ(antenna_offsets(ArrayConfig::half_wavelength(4)), (RVector{-1.5, -0.5, 0.5, 1.5}));
  EXPECT_EQ(antenna_offsets(ArrayConfig::half_wavelength(3)), (RVector{-1.0, 0.0, 1.0}));
}

TEST(ElementDistance, CenterAntennaIsReference) {
  const auto cfg = ArrayConfig::half_wavelength(5);
  for (double theta : {-0.9, 0.0, 0.3}) EXPECT_DOUBLE_EQ(element_distance(cfg, 17.5, theta, 2), 17.5);
}

TEST(ElementDistance, BroadsideArithmetic) {
  // offset of antenna 1 in a 2-element array with d = 0.005 is 0.0025 m
  ArrayConfig cfg{2, 0.01, 0.005};
  const double expected = std::sqrt(100.0 + 6.25e-6);
  EXPECT_NEAR(element_distance(cfg, 10.0, 0.0, 1), expected, 1e-13);
  EXPECT_NEAR(element_distance(cfg, 10.0, 0.0, 1), 10.0000003125, 1e-10);
}

TEST(ElementDistance, FarFieldTaylorLimit) {
  const auto cfg = ArrayConfig::half_wavelength(64);
  const RVector off = antenna_offsets(cfg);
  for (double r : {1e3, 1e5, 1e7}) {
    for (std::size_t n : {0u, 17u, 63u}) {
      const double dd = off[n] * cfg.spacing;
      const double theta = 0.37;
      const double err = (element_distance(cfg, r, theta, n) - r) - (-dd * theta);
      EXPECT_LE(std::abs(err), dd * dd / r + 1e-9) << "r=" << r << " n=" << n;
    }
  }
}

TEST(ElementDistance, MirrorSymmetry) {
  const auto cfg = ArrayConfig::half_wavelength(9);
  for (std::size_t n = 0; n < 9; ++n) {
    EXPECT_DOUBLE_EQ(element_distance(cfg, 12.0, 0.4, n), element_distance(cfg, 12.0, -0.4, 8 - n));
  }
}

TEST(NearSteering, SingleAntenna) {
  const auto b = near_steering(ArrayConfig::half_wavelength(1), 0.3, 20.0);
  ASSERT_EQ(b.size(), 1u);
  EXPECT_NEAR(b[0].real(), 1.0, 1e-15);
  EXPECT_NEAR(b[0].imag(), 0.0, 1e-15);
}

TEST(NearSteering, UnitModulusAndNorm) {
  Rng rng(7);
  for (std::size_t n : {2u, 31u, 64u, 512u}) {
    const auto cfg = ArrayConfig::half_wavelength(n);
    for (int trial = 0; trial < 20; ++trial) {
      const auto b = near_steering(cfg, rng.uniform(-1, 1), rng.uniform(1, 100));
      for (auto x : b) EXPECT_NEAR(std::abs(x), 1.0 / std::sqrt(double(n)), 1e-15);
      EXPECT_NEAR(norm2(b), 1.0, 1e-12);
    }
  }
}

TEST(NearSteering, FarFieldLimitMatchesNarrowBeam) {
  const auto cfg = ArrayConfig::half_wavelength(64);
  const RVector grid = angle_grid(64);
  for (std::size_t n : {1u, 10u, 33u, 64u}) {
    const auto b = near_steering(cfg, grid[n - 1], 1e6 * cfg.wavelength);
    EXPECT_GE(std::abs(dot(narrow_codeword(cfg, n), b)), 0.999) << n;
  }
}

TEST(NearSteering, PhaseProfileApproachesLinear) {
  // max deviation of the unwrapped phase from its best linear fit shrinks like 1/r
  const auto cfg = ArrayConfig::half_wavelength(32);
  const double k = 2.0 * std::numbers::pi / cfg.wavelength;
  auto deviation = [&](double r) {
    std::vector<double> ph(32);
    for (std::size_t i = 0; i < 32; ++i) ph[i] = -k * (element_distance(cfg, r, 0.2, i) - r);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < 32; ++i) {
      sx += double(i), sy += ph[i], sxx += double(i * i), sxy += double(i) * ph[i];
    }
    const double slope = (32 * sxy - sx * sy) / (32 * sxx - sx * sx);
    const double icpt = (sy - slope * sx) / 32;
    double worst = 0;
    for (std::size_t i = 0; i < 32; ++i) worst = std::max(worst, std::abs(ph[i] - slope * double(i) - icpt));
    return worst;
  };
  const double d10 = deviation(10.0), d100 = deviation(100.0), d1000 = deviation(1000.0);
  EXPECT_LT(d100, d10);
  EXPECT_LT(d1000, d100);
  EXPECT_NEAR(d10 / d100, 10.0, 1.0);
  EXPECT_NEAR(d100 / d1000, 10.0, 0.5);
}

TEST(SynthChannel, EmptyPathsRejected) {
  EXPECT_THROW(synth_channel(ArrayConfig::half_wavelength(4), std::vector<PathParams>{}),
               std::invalid_argument);
}

TEST(SynthChannel, SinglePathNorm) {
  const auto cfg = ArrayConfig::half_wavelength(64);
  const std::vector<PathParams> p{{{1.0, 0.0}, 23.0, -0.2}};
  const auto h = synth_channel(cfg, p);
  EXPECT_NEAR(norm2(h.entries), 8.0, 1e-12);
}

TEST(SynthChannel, OpposingGainsCancel) {
  const auto cfg = ArrayConfig::half_wavelength(16);
  const std::vector<PathParams> p{{{0.3, -0.4}, 15.0, 0.1}, {{-0.3, 0.4}, 15.0, 0.1}};
  for (auto x : synth_channel(cfg, p).entries) EXPECT_EQ(std::abs(x), 0.0);
}

TEST(SynthChannel, MatchesExtendedPrecisionSum) {
  // independent oracle: long double phase from the plain distance formula
  Rng rng(11);
  const auto cfg = ArrayConfig::half_wavelength(64);
  const ScenarioConfig sc;
  for (int trial = 0; trial < 20; ++trial) {
    const auto paths = sample_paths(rng, sc);
    const auto h = synth_channel(cfg, paths);
    const long double pi = 3.141592653589793238462643383279502884L;
    const long double lam = cfg.wavelength, d = cfg.spacing;
    const long double scale = std::sqrt(64.0L / paths.size());
    double num = 0, den = 0;
    for (std::size_t n = 0; n < 64; ++n) {
      std::complex<long double> acc{};
      const long double off = (static_cast<long double>(n) - 31.5L) * d;
      for (const auto& p : paths) {
        const long double r = p.distance, th = p.angle;
        const long double rn = std::sqrt(r * r + off * off - 2.0L * r * off * th);
        const long double phase = -2.0L * pi / lam * rn;  // exp(-j2pi r/l) * exp(-j2pi(rn-r)/l)
        acc += std::complex<long double>(p.gain.real(), p.gain.imag()) *
               std::polar(1.0L / std::sqrt(64.0L), phase);
      }
      acc *= scale;
      const cdouble ref(static_cast<double>(acc.real()), static_cast<double>(acc.imag()));
      num += std::norm(h[n] - ref);
      den += std::norm(ref);
    }
    EXPECT_LE(std::sqrt(num / den), 1e-12) << "trial " << trial;
  }
}

TEST(SynthChannel, LinearInGain) {
  const auto cfg = ArrayConfig::half_wavelength(32);
  const cdouble alpha(0.7, -1.3);
  const std::vector<PathParams> p{{{0.4, 0.2}, 31.0, 0.55}};
  const std::vector<PathParams> q{{alpha * cdouble(0.4, 0.2), 31.0, 0.55}};
  const auto h = synth_channel(cfg, p), g = synth_channel(cfg, q);
  for (std::size_t i = 0; i < 32; ++i) EXPECT_LE(std::abs(g[i] - alpha * h[i]), 1e-14);
}

TEST(SamplePaths, ZeroVarianceGivesZeroGains) {
  ScenarioConfig sc;
  sc.gain_variances = {0.0, 0.0, 0.0};
  Rng rng(3);
  for (const auto& p : sample_paths(rng, sc)) EXPECT_EQ(p.gain, cdouble(0.0, 0.0));
}

TEST(SamplePaths, MonteCarloStatistics) {
  const ScenarioConfig sc;
  Rng rng(2024);
  const int draws = 100000;
  double g1 = 0, g2 = 0, rsum = 0, rmin = 1e9, rmax = 0;
  for (int i = 0; i < draws; ++i) {
    const auto p = sample_paths(rng, sc);
    ASSERT_EQ(p.size(), 3u);
    g1 += std::norm(p[0].gain);
    g2 += std::norm(p[1].gain);
    for (const auto& q : p) {
      rmin = std::min(rmin, q.distance), rmax = std::max(rmax, q.distance);
      EXPECT_GE(q.angle, -1.0);
      EXPECT_LT(q.angle, 1.0);
    }
    rsum += p[0].distance;
  }
  EXPECT_GE(g1 / draws, 0.98);
  EXPECT_LE(g1 / draws, 1.02);
  EXPECT_GE(g2 / draws, 0.0095);
  EXPECT_LE(g2 / draws, 0.0105);
  EXPECT_GE(rmin, 10.0);
  EXPECT_LE(rmax, 60.0);
  EXPECT_NEAR(rsum / draws, 35.0, 0.2);
}
