#pragma once

#include <cstddef>
#include <filesystem>
#include <vector>

#include "nfbeam/geometry.hpp"
#include "nfbeam/types.hpp"

namespace nfbeam {

/// 1-based (ring, angle) coordinates of a polar codeword.
struct RingAngle {
  std::size_t ring = 1;
  std::size_t angle = 1;
  bool operator==(const RingAngle&) const = default;
};

/// Near-field codebook sampled on N angles and S distance rings.
/// Codeword i (1-based) sits at ring s and angle n with i = (s-1)N + n.
class PolarCodebook {
 public:
  PolarCodebook(ArrayConfig cfg, std::size_t num_rings, std::vector<RVector> ring_distances,
                std::vector<CVector> codewords);

  const ArrayConfig& array() const { return array_; }
  std::size_t num_angles() const { return array_.num_antennas; }
  std::size_t num_rings() const { return num_rings_; }
  std::size_t size() const { return codewords_.size(); }

  /// 1-based lookup.
  const CVector& codeword(std::size_t index) const;
  const std::vector<CVector>& codewords() const { return codewords_; }
  /// ring_distances()[s-1][n-1] is r_s^n in meters.
  const std::vector<RVector>& ring_distances() const { return ring_distances_; }

 private:
  ArrayConfig array_;
  std::size_t num_rings_;
  std::vector<RVector> ring_distances_;
  std::vector<CVector> codewords_;
};

/// Far-field codebook of N narrow beams on the full aperture.
struct NarrowCodebook {
  ArrayConfig array;
  std::vector<CVector> codewords;

  std::size_t size() const { return codewords.size(); }
  const CVector& codeword(std::size_t n) const;  // 1-based
};

/// Far-field codebook of M = N/T wide beams. Each uses only the first N/T
/// antennas; the remaining entries are exactly zero.
struct WideCodebook {
  ArrayConfig array;
  std::size_t factor = 1;  ///< T, narrow beams covered per wide beam
  std::vector<CVector> codewords;

  std::size_t size() const { return codewords.size(); }
  std::size_t subarray_size() const { return array.num_antennas / factor; }
  const CVector& codeword(std::size_t m) const;  // 1-based
};

/// Sine-domain grid -1 + (2n-1)/N for n = 1..N.
RVector angle_grid(std::size_t n);

/// S x N ring distances, uniform in 1/r from r_max (s = 1) to r_min (s = S).
/// With `angle_dependent` the ring distances are scaled by (1 - theta_n^2),
/// floored at r_min / 100.
std::vector<RVector> ring_grid(std::size_t num_rings, double r_min, double r_max,
                               const RVector& angles, bool angle_dependent = false);

PolarCodebook build_polar_codebook(const ArrayConfig& cfg, std::size_t num_rings, double r_min,
                                   double r_max, bool angle_dependent = false);

/// i = (s-1)N + n, all 1-based. Throws std::out_of_range on bad input.
std::size_t codeword_index(std::size_t ring, std::size_t angle, std::size_t num_angles,
                           std::size_t num_rings);
RingAngle index_to_pair(std::size_t index, std::size_t num_angles, std::size_t num_rings);

/// Entry k = exp(+j pi k sin(theta_n)) / sqrt(N).
CVector narrow_codeword(const ArrayConfig& cfg, std::size_t n);
/// First N/T entries sqrt(T/N) exp(+j pi k sin(theta_m)); rest zero.
CVector wide_codeword(const ArrayConfig& cfg, std::size_t m, std::size_t factor);

NarrowCodebook build_narrow_codebook(const ArrayConfig& cfg);
WideCodebook build_wide_codebook(const ArrayConfig& cfg, std::size_t factor);

// Binary codebook files: little-endian header then row-major interleaved
// (re, im) doubles, one row per codeword.
enum class CodebookKind : std::uint32_t { kPolar = 1, kNarrow = 2, kWide = 3 };

struct CodebookFile {
  CodebookKind kind = CodebookKind::kPolar;
  ArrayConfig array;
  /// S for polar codebooks, T for wide codebooks, 1 for narrow.
  std::size_t parameter = 1;
  std::vector<CVector> codewords;
};

void write_codebook(const std::filesystem::path& path, const CodebookFile& book);
CodebookFile read_codebook(const std::filesystem::path& path);

CodebookFile to_file(const PolarCodebook& book);
CodebookFile to_file(const WideCodebook& book);
CodebookFile to_file(const NarrowCodebook& book);

}  // namespace nfbeam
