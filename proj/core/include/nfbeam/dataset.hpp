#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "nfbeam/codebook.hpp"
#include "nfbeam/config.hpp"
#include "nfbeam/measurement.hpp"

namespace nfbeam {

/// The three codebooks of one configuration.
struct CodebookSet {
  PolarCodebook polar;
  WideCodebook wide;
  NarrowCodebook narrow;
};

CodebookSet build_codebooks(const Config& cfg);

/// One labelled example. Labels are 1-based.
struct Sample {
  CVector measurements;  ///< y^w, length M
  std::uint32_t angle_label = 1;  ///< n*
  std::uint32_t ring_label = 1;   ///< s*
  double snr_db = 0.0;
  std::uint64_t seed = 0;

  MeasurementVector measurement_vector() const { return {measurements, snr_db}; }
  bool operator==(const Sample&) const = default;
};

struct SplitSizes {
  std::size_t train = 0, val = 0, test = 0;
  bool operator==(const SplitSizes&) const = default;
};

/// Validation and test sizes are floor(fraction * count); training gets the rest.
SplitSizes split_sizes(std::size_t count, double val_fraction, double test_fraction);

struct DatasetHeader {
  std::uint32_t version = 1;
  std::uint32_t num_angles = 0;  ///< N
  std::uint32_t num_rings = 0;   ///< S
  std::uint32_t num_wide = 0;    ///< M
  std::uint32_t wide_factor = 0; ///< T
  double wavelength = 0.0;
  std::uint64_t sample_count = 0;
  SplitSizes split{};
  std::uint64_t base_seed = 0;

  bool operator==(const DatasetHeader&) const = default;
};

/// Samples are stored train, then validation, then test.
struct Dataset {
  DatasetHeader header;
  std::vector<Sample> samples;

  std::span<const Sample> train() const { return {samples.data(), header.split.train}; }
  std::span<const Sample> val() const {
    return {samples.data() + header.split.train, header.split.val};
  }
  std::span<const Sample> test() const {
    return {samples.data() + header.split.train + header.split.val, header.split.test};
  }
};

/// Draws channel, SNR and wide-beam noise from `seed` and labels the sample
/// with the noiseless sweep oracle.
Sample generate_sample(const Config& cfg, const CodebookSet& books, std::uint64_t seed);

/// Sample i uses seed derive_seed(base_seed, {i}).
Dataset generate_dataset(const Config& cfg, std::uint64_t base_seed);
inline Dataset generate_dataset(const Config& cfg) {
  return generate_dataset(cfg, stream_seed(cfg, SeedStream::kDataset));
}

inline constexpr std::uint32_t kDatasetFormatVersion = 1;

void write_dataset(const std::filesystem::path& path, const Dataset& data);
Dataset read_dataset(const std::filesystem::path& path);

/// Checks the file header against the configuration geometry.
void check_compatible(const DatasetHeader& header, const Config& cfg);

/// Regenerates ceil(fraction * count) randomly chosen samples from their seeds
/// and returns how many differ from the stored record.
std::size_t audit_labels(const Dataset& data, const Config& cfg, double fraction, std::uint64_t seed);

/// split,index,seed,snr_db,angle_label,ring_label,codeword_index
void export_labels_csv(const std::filesystem::path& path, const Dataset& data);

}  // namespace nfbeam
