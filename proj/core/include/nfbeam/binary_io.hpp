#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "nfbeam/types.hpp"

namespace nfbeam {

/// Raised when a binary file is truncated, corrupt, or of the wrong kind or version.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Builds a little-endian byte image in memory.
class BinaryWriter {
 public:
  void bytes(const void* data, std::size_t size);
  void u32(std::uint32_t v);
  void u64(std::uint64_t v);
  void f64(double v);
  void c128(cdouble v) {
    f64(v.real());
    f64(v.imag());
  }

  const std::vector<unsigned char>& buffer() const { return buf_; }
  void save(const std::filesystem::path& path) const;

 private:
  std::vector<unsigned char> buf_;
};

class BinaryReader {
 public:
  explicit BinaryReader(std::vector<unsigned char> data) : buf_(std::move(data)) {}
  static BinaryReader load(const std::filesystem::path& path);

  void bytes(void* out, std::size_t size);
  std::uint32_t u32();
  std::uint64_t u64();
  double f64();
  cdouble c128() {
    const double re = f64();
    return {re, f64()};
  }

  void expect_magic(const char* magic, std::size_t size, const std::string& what);
  void expect_end(const std::string& what) const;
  std::size_t position() const { return pos_; }
  std::size_t remaining() const { return buf_.size() - pos_; }
  const std::vector<unsigned char>& buffer() const { return buf_; }

 private:
  std::vector<unsigned char> buf_;
  std::size_t pos_ = 0;
};

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(const unsigned char* data, std::size_t size);

}  // namespace nfbeam
