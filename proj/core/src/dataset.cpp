#include "nfbeam/dataset.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "nfbeam/binary_io.hpp"
#include "nfbeam/rng.hpp"

namespace nfbeam {

CodebookSet build_codebooks(const Config& cfg) {
  cfg.validate();
  return {build_polar_codebook(cfg.array, cfg.codebook.num_rings, cfg.codebook.r_min,
                               cfg.codebook.r_max, cfg.codebook.angle_dependent_rings),
          build_wide_codebook(cfg.array, cfg.codebook.wide_factor), build_narrow_codebook(cfg.array)};
}

SplitSizes split_sizes(std::size_t count, double val_fraction, double test_fraction) {
  SplitSizes s;
  s.val = static_cast<std::size_t>(std::floor(val_fraction * static_cast<double>(count)));
  s.test = static_cast<std::size_t>(std::floor(test_fraction * static_cast<double>(count)));
  if (s.val + s.test > count) throw ConfigError("dataset split fractions exceed the sample count");
  s.train = count - s.val - s.test;
  return s;
}

Sample generate_sample(const Config& cfg, const CodebookSet& books, std::uint64_t seed) {
  Rng rng(seed);
  const auto paths = sample_paths(rng, cfg.scenario);
  const ChannelVector h = synth_channel(cfg.array, paths);
  const double snr_db = rng.uniform(cfg.link.snr_db_min, cfg.link.snr_db_max);
  MeasurementVector y = measure_wide(books.wide, h, LinkConfig::from_snr_db(snr_db), rng);
  const SweepResult best = sweep_oracle(books.polar, h);
  Sample s;
  s.measurements = std::move(y.values);
  s.angle_label = static_cast<std::uint32_t>(best.angle);
  s.ring_label = static_cast<std::uint32_t>(best.ring);
  s.snr_db = snr_db;
  s.seed = seed;
  return s;
}

Dataset generate_dataset(const Config& cfg, std::uint64_t base_seed) {
  const CodebookSet books = build_codebooks(cfg);
  Dataset data;
  DatasetHeader& h = data.header;
  h.version = kDatasetFormatVersion;
  h.num_angles = static_cast<std::uint32_t>(cfg.array.num_antennas);
  h.num_rings = static_cast<std::uint32_t>(cfg.codebook.num_rings);
  h.num_wide = static_cast<std::uint32_t>(cfg.num_wide());
  h.wide_factor = static_cast<std::uint32_t>(cfg.codebook.wide_factor);
  h.wavelength = cfg.array.wavelength;
  h.sample_count = cfg.dataset.num_samples;
  h.split = split_sizes(cfg.dataset.num_samples, cfg.dataset.val_fraction, cfg.dataset.test_fraction);
  h.base_seed = base_seed;
  data.samples.reserve(cfg.dataset.num_samples);
  for (std::size_t i = 0; i < cfg.dataset.num_samples; ++i) {
    data.samples.push_back(generate_sample(cfg, books, derive_seed(base_seed, {i})));
  }
  return data;
}

namespace {

constexpr char kDatasetMagic[8] = {'N', 'F', 'B', 'D', 'A', 'T', 'A', '1'};

}  // namespace

void write_dataset(const std::filesystem::path& path, const Dataset& data) {
  const DatasetHeader& h = data.header;
  if (data.samples.size() != h.sample_count ||
      h.split.train + h.split.val + h.split.test != h.sample_count) {
    throw std::invalid_argument("write_dataset: header counts do not match the samples");
  }
  BinaryWriter out;
  out.bytes(kDatasetMagic, sizeof kDatasetMagic);
  out.u32(h.version);
  out.u32(h.num_angles);
  out.u32(h.num_rings);
  out.u32(h.num_wide);
  out.u32(h.wide_factor);
  out.f64(h.wavelength);
  out.u64(h.sample_count);
  out.u64(h.split.train);
  out.u64(h.split.val);
  out.u64(h.split.test);
  out.u64(h.base_seed);
  for (const Sample& s : data.samples) {
    if (s.measurements.size() != h.num_wide) {
      throw std::invalid_argument("write_dataset: sample length differs from M");
    }
    for (const cdouble& z : s.measurements) out.c128(z);
    out.u32(s.angle_label);
    out.u32(s.ring_label);
    out.f64(s.snr_db);
    out.u64(s.seed);
  }
  out.save(path);
}

Dataset read_dataset(const std::filesystem::path& path) {
  BinaryReader in = BinaryReader::load(path);
  in.expect_magic(kDatasetMagic, sizeof kDatasetMagic, "dataset");
  Dataset data;
  DatasetHeader& h = data.header;
  h.version = in.u32();
  if (h.version != kDatasetFormatVersion) {
    throw FormatError("dataset: unsupported version " + std::to_string(h.version));
  }
  h.num_angles = in.u32();
  h.num_rings = in.u32();
  h.num_wide = in.u32();
  h.wide_factor = in.u32();
  h.wavelength = in.f64();
  h.sample_count = in.u64();
  h.split.train = in.u64();
  h.split.val = in.u64();
  h.split.test = in.u64();
  h.base_seed = in.u64();
  if (h.split.train + h.split.val + h.split.test != h.sample_count) {
    throw FormatError("dataset: split sizes do not sum to the sample count");
  }
  const std::size_t record = 16 * std::size_t{h.num_wide} + 4 + 4 + 8 + 8;
  if (in.remaining() != record * h.sample_count) throw FormatError("dataset: truncated or oversized file");
  data.samples.resize(h.sample_count);
  for (Sample& s : data.samples) {
    s.measurements.resize(h.num_wide);
    for (cdouble& z : s.measurements) z = in.c128();
    s.angle_label = in.u32();
    s.ring_label = in.u32();
    s.snr_db = in.f64();
    s.seed = in.u64();
    if (s.angle_label < 1 || s.angle_label > h.num_angles || s.ring_label < 1 ||
        s.ring_label > h.num_rings) {
      throw FormatError("dataset: label out of range");
    }
  }
  return data;
}

void check_compatible(const DatasetHeader& header, const Config& cfg) {
  if (header.num_angles != cfg.array.num_antennas || header.num_rings != cfg.codebook.num_rings ||
      header.num_wide != cfg.num_wide() || header.wide_factor != cfg.codebook.wide_factor ||
      header.wavelength != cfg.array.wavelength) {
    throw ConfigError("dataset geometry (N=" + std::to_string(header.num_angles) +
                      ", S=" + std::to_string(header.num_rings) + ", M=" + std::to_string(header.num_wide) +
                      ") does not match the configuration");
  }
}

std::size_t audit_labels(const Dataset& data, const Config& cfg, double fraction, std::uint64_t seed) {
  check_compatible(data.header, cfg);
  const std::size_t count = data.samples.size();
  if (count == 0) return 0;
  const auto picks = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(count)));
  const CodebookSet books = build_codebooks(cfg);
  Rng rng(seed);
  std::set<std::size_t> chosen;
  while (chosen.size() < std::min(picks, count)) chosen.insert(rng.below(count));
  std::size_t mismatches = 0;
  for (std::size_t i : chosen) {
    if (!(generate_sample(cfg, books, data.samples[i].seed) == data.samples[i])) ++mismatches;
  }
  return mismatches;
}

void export_labels_csv(const std::filesystem::path& path, const Dataset& data) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << "split,index,seed,snr_db,angle_label,ring_label,codeword_index\n";
  const auto& h = data.header;
  char snr[64];
  for (std::size_t i = 0; i < data.samples.size(); ++i) {
    const Sample& s = data.samples[i];
    const char* split = i < h.split.train ? "train" : i < h.split.train + h.split.val ? "val" : "test";
    std::snprintf(snr, sizeof snr, "%.17g", s.snr_db);
    out << split << ',' << i << ',' << s.seed << ',' << snr << ',' << s.angle_label << ','
        << s.ring_label << ',' << (s.ring_label - 1) * std::size_t{h.num_angles} + s.angle_label << '\n';
  }
}

}  // namespace nfbeam
