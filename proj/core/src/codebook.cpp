#include "nfbeam/codebook.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "nfbeam/binary_io.hpp"

namespace nfbeam {

PolarCodebook::PolarCodebook(ArrayConfig cfg, std::size_t num_rings,
                             std::vector<RVector> ring_distances, std::vector<CVector> codewords)
    : array_(cfg),
      num_rings_(num_rings),
      ring_distances_(std::move(ring_distances)),
      codewords_(std::move(codewords)) {
  if (codewords_.size() != array_.num_antennas * num_rings_) {
    throw std::invalid_argument("PolarCodebook: expected N*S codewords");
  }
}

const CVector& PolarCodebook::codeword(std::size_t index) const {
  if (index < 1 || index > codewords_.size()) {
    throw std::out_of_range("PolarCodebook: codeword index " + std::to_string(index) +
                            " outside 1.." + std::to_string(codewords_.size()));
  }
  return codewords_[index - 1];
}

const CVector& NarrowCodebook::codeword(std::size_t n) const {
  if (n < 1 || n > codewords.size()) throw std::out_of_range("NarrowCodebook: index out of range");
  return codewords[n - 1];
}

const CVector& WideCodebook::codeword(std::size_t m) const {
  if (m < 1 || m > codewords.size()) throw std::out_of_range("WideCodebook: index out of range");
  return codewords[m - 1];
}

RVector angle_grid(std::size_t n) {
  if (n < 1) throw std::invalid_argument("angle_grid: N must be >= 1");
  RVector grid(n);
  const double dn = static_cast<double>(n);
  for (std::size_t i = 1; i <= n; ++i) grid[i - 1] = -1.0 + (2.0 * static_cast<double>(i) - 1.0) / dn;
  return grid;
}

std::vector<RVector> ring_grid(std::size_t num_rings, double r_min, double r_max,
                               const RVector& angles, bool angle_dependent) {
  if (num_rings < 1) throw std::invalid_argument("ring_grid: S must be >= 1");
  if (!(r_min > 0.0) || !(r_max > r_min)) {
    throw std::invalid_argument("ring_grid: need 0 < r_min < r_max");
  }
  std::vector<RVector> rings(num_rings, RVector(angles.size()));
  const double inv_far = 1.0 / r_max;
  const double inv_near = 1.0 / r_min;
  for (std::size_t s = 0; s < num_rings; ++s) {
    double r = r_max;
    if (num_rings > 1) {
      const double frac = static_cast<double>(s) / static_cast<double>(num_rings - 1);
      r = 1.0 / (inv_far + frac * (inv_near - inv_far));
    }
    for (std::size_t n = 0; n < angles.size(); ++n) {
      double rn = r;
      if (angle_dependent) rn = std::max(r * (1.0 - angles[n] * angles[n]), r_min / 100.0);
      rings[s][n] = rn;
    }
  }
  return rings;
}

PolarCodebook build_polar_codebook(const ArrayConfig& cfg, std::size_t num_rings, double r_min,
                                   double r_max, bool angle_dependent) {
  cfg.validate();
  const RVector angles = angle_grid(cfg.num_antennas);
  std::vector<RVector> rings = ring_grid(num_rings, r_min, r_max, angles, angle_dependent);
  std::vector<CVector> words;
  words.reserve(cfg.num_antennas * num_rings);
  for (std::size_t s = 0; s < num_rings; ++s) {
    for (std::size_t n = 0; n < cfg.num_antennas; ++n) {
      words.push_back(near_steering(cfg, angles[n], rings[s][n]));
    }
  }
  return PolarCodebook(cfg, num_rings, std::move(rings), std::move(words));
}

std::size_t codeword_index(std::size_t ring, std::size_t angle, std::size_t num_angles,
                           std::size_t num_rings) {
  if (angle < 1 || angle > num_angles || ring < 1 || ring > num_rings) {
    throw std::out_of_range("codeword_index: (s=" + std::to_string(ring) + ", n=" +
                            std::to_string(angle) + ") outside the " + std::to_string(num_rings) +
                            "x" + std::to_string(num_angles) + " grid");
  }
  return (ring - 1) * num_angles + angle;
}

RingAngle index_to_pair(std::size_t index, std::size_t num_angles, std::size_t num_rings) {
  if (num_angles == 0 || index < 1 || index > num_angles * num_rings) {
    throw std::out_of_range("index_to_pair: index " + std::to_string(index) + " out of range");
  }
  return {(index - 1) / num_angles + 1, (index - 1) % num_angles + 1};
}

namespace {

CVector linear_phase_beam(std::size_t total, std::size_t active, double sine) {
  CVector w(total, cdouble{});
  const double amp = 1.0 / std::sqrt(static_cast<double>(active));
  for (std::size_t k = 0; k < active; ++k) {
    w[k] = std::polar(amp, std::numbers::pi * static_cast<double>(k) * sine);
  }
  return w;
}

}  // namespace

CVector narrow_codeword(const ArrayConfig& cfg, std::size_t n) {
  const std::size_t count = cfg.num_antennas;
  if (n < 1 || n > count) throw std::out_of_range("narrow_codeword: n out of range");
  const double sine = -1.0 + (2.0 * static_cast<double>(n) - 1.0) / static_cast<double>(count);
  return linear_phase_beam(count, count, sine);
}

CVector wide_codeword(const ArrayConfig& cfg, std::size_t m, std::size_t factor) {
  const std::size_t count = cfg.num_antennas;
  if (factor < 1 || count % factor != 0) {
    throw std::invalid_argument("wide_codeword: T=" + std::to_string(factor) +
                                " does not divide N=" + std::to_string(count));
  }
  const std::size_t beams = count / factor;
  if (m < 1 || m > beams) throw std::out_of_range("wide_codeword: m out of range");
  const double sine = -1.0 + (2.0 * static_cast<double>(m) - 1.0) / static_cast<double>(beams);
  return linear_phase_beam(count, beams, sine);
}

NarrowCodebook build_narrow_codebook(const ArrayConfig& cfg) {
  cfg.validate();
  NarrowCodebook book{cfg, {}};
  book.codewords.reserve(cfg.num_antennas);
  for (std::size_t n = 1; n <= cfg.num_antennas; ++n) book.codewords.push_back(narrow_codeword(cfg, n));
  return book;
}

WideCodebook build_wide_codebook(const ArrayConfig& cfg, std::size_t factor) {
  cfg.validate();
  if (factor < 1 || cfg.num_antennas % factor != 0) {
    throw std::invalid_argument("build_wide_codebook: T must divide N");
  }
  WideCodebook book{cfg, factor, {}};
  const std::size_t beams = cfg.num_antennas / factor;
  book.codewords.reserve(beams);
  for (std::size_t m = 1; m <= beams; ++m) book.codewords.push_back(wide_codeword(cfg, m, factor));
  return book;
}

namespace {

constexpr char kCodebookMagic[8] = {'N', 'F', 'B', 'C', 'B', 'K', '0', '1'};
constexpr std::uint32_t kCodebookVersion = 1;

}  // namespace

void write_codebook(const std::filesystem::path& path, const CodebookFile& book) {
  BinaryWriter out;
  out.bytes(kCodebookMagic, sizeof kCodebookMagic);
  out.u32(kCodebookVersion);
  out.u32(static_cast<std::uint32_t>(book.kind));
  out.u64(book.array.num_antennas);
  out.u64(book.parameter);
  out.f64(book.array.wavelength);
  out.f64(book.array.spacing);
  out.u64(book.codewords.size());
  for (const CVector& w : book.codewords) {
    if (w.size() != book.array.num_antennas) {
      throw std::invalid_argument("write_codebook: codeword length differs from N");
    }
    for (const cdouble& z : w) out.c128(z);
  }
  out.save(path);
}

CodebookFile read_codebook(const std::filesystem::path& path) {
  BinaryReader in = BinaryReader::load(path);
  in.expect_magic(kCodebookMagic, sizeof kCodebookMagic, "codebook");
  const std::uint32_t version = in.u32();
  if (version != kCodebookVersion) {
    throw FormatError("codebook: unsupported version " + std::to_string(version));
  }
  CodebookFile book;
  const std::uint32_t kind = in.u32();
  if (kind < 1 || kind > 3) throw FormatError("codebook: unknown kind");
  book.kind = static_cast<CodebookKind>(kind);
  book.array.num_antennas = in.u64();
  book.parameter = in.u64();
  book.array.wavelength = in.f64();
  book.array.spacing = in.f64();
  const std::uint64_t rows = in.u64();
  const std::size_t n = book.array.num_antennas;
  if (n == 0 || rows > in.remaining() / (16 * n)) throw FormatError("codebook: truncated file");
  book.codewords.assign(rows, CVector(n));
  for (CVector& w : book.codewords) {
    for (cdouble& z : w) z = in.c128();
  }
  in.expect_end("codebook");
  return book;
}

CodebookFile to_file(const PolarCodebook& book) {
  return {CodebookKind::kPolar, book.array(), book.num_rings(), book.codewords()};
}
CodebookFile to_file(const WideCodebook& book) {
  return {CodebookKind::kWide, book.array, book.factor, book.codewords};
}
CodebookFile to_file(const NarrowCodebook& book) {
  return {CodebookKind::kNarrow, book.array, 1, book.codewords};
}

}  // namespace nfbeam
