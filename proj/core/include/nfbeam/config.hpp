#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "nfbeam/geometry.hpp"
#include "nfbeam/nn/network.hpp"
#include "nfbeam/nn/optimizer.hpp"

namespace nfbeam {

/// Raised for malformed configuration; the message names the offending key.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CodebookConfig {
  std::size_t num_rings = 5;
  double r_min = 10.0;
  double r_max = 60.0;
  /// T: narrow beams per wide beam; M = N / T wide beams.
  std::size_t wide_factor = 4;
  bool angle_dependent_rings = false;
};

/// SNR range (dB, P/sigma^2 with sigma^2 = 1) drawn per training sample.
struct TrainingSnr {
  double snr_db_min = 0.0;
  double snr_db_max = 20.0;
};

struct DatasetConfig {
  std::size_t num_samples = 20000;
  double val_fraction = 0.1;
  double test_fraction = 0.1;
};

struct TrainConfig {
  std::size_t epochs = 20;
  std::size_t batch_size = 256;
  nn::OptimizerConfig optimizer{};
  /// Early stop after this many epochs without a validation-loss improvement.
  std::size_t patience = 10;
};

/// Pilot accounting for the effective rate.
struct MetricsConfig {
  double slot_time = 1.0;       ///< t_s, slots per tested beam
  double coherence_slots = 25600.0;  ///< T_tot
};

enum class SchemeKind { kOriginal, kImproved, kSweep, kPerfect, kRandom, kFarField };

struct SchemeSpec {
  SchemeKind kind = SchemeKind::kOriginal;
  std::size_t top_angles = 1;  ///< K, improved scheme only
  std::size_t top_rings = 1;   ///< L, improved scheme only

  /// "original", "improved_K5_L2", "sweep", ...
  std::string id() const;
  bool needs_models() const { return kind == SchemeKind::kOriginal || kind == SchemeKind::kImproved; }
};

/// Where the original/improved schemes get their probability vectors from.
enum class ModelSource { kTrained, kOracle, kUniform };

struct ExperimentConfig {
  std::vector<double> snr_grid_db{0.0, 5.0, 10.0, 15.0, 20.0};
  std::size_t trials = 500;
  std::vector<SchemeSpec> schemes{{SchemeKind::kOriginal},
                                  {SchemeKind::kImproved, 5, 2},
                                  {SchemeKind::kImproved, 10, 2},
                                  {SchemeKind::kSweep},
                                  {SchemeKind::kFarField},
                                  {SchemeKind::kRandom}};
  MetricsConfig metrics{};
  ModelSource models = ModelSource::kTrained;
  /// Worker threads for the trial loop; 0 uses the hardware concurrency.
  std::size_t workers = 0;
};

/// Full run configuration. Every random stream is derived from `seed`.
struct Config {
  std::uint64_t seed = 1;
  ArrayConfig array = ArrayConfig::half_wavelength(64);
  CodebookConfig codebook{};
  ScenarioConfig scenario{};
  TrainingSnr link{};
  DatasetConfig dataset{};
  nn::NetConfig net{};
  TrainConfig train{};
  ExperimentConfig experiment{};

  std::size_t num_wide() const { return array.num_antennas / codebook.wide_factor; }
  std::size_t num_codewords() const { return array.num_antennas * codebook.num_rings; }
  /// Throws ConfigError on inconsistent settings.
  void validate() const;
};

enum class SeedStream : std::uint64_t { kDataset = 1, kTraining = 2, kExperiment = 3 };
std::uint64_t stream_seed(const Config& cfg, SeedStream stream);

/// N=64, T=4 (M=16), S=5, 20k samples, flattening trunk, 8 epochs.
void apply_desk_scale(Config& cfg);
/// N=512, T=4 (M=128), S=5, 100k samples, batch 1000, 50 epochs.
void apply_paper_scale(Config& cfg);
Config desk_scale();
Config paper_scale();

/// Applies the JSON document on top of `base`. Unknown keys are rejected.
Config parse_config(const std::string& json_text, const Config& base = desk_scale());
Config load_config(const std::filesystem::path& path, const Config& base = desk_scale());
std::string to_json(const Config& cfg);

SchemeSpec parse_scheme(const std::string& id);

}  // namespace nfbeam
