#include "nfbeam/config.hpp"

#include <fstream>
#include <json.hpp>
#include <regex>
#include <set>
#include <sstream>

#include "nfbeam/rng.hpp"

namespace nfbeam {

using nlohmann::json;

std::string SchemeSpec::id() const {
  switch (kind) {
    case SchemeKind::kOriginal: return "original";
    case SchemeKind::kImproved:
      return "improved_K" + std::to_string(top_angles) + "_L" + std::to_string(top_rings);
    case SchemeKind::kSweep: return "sweep";
    case SchemeKind::kPerfect: return "perfect";
    case SchemeKind::kRandom: return "random";
    case SchemeKind::kFarField: return "far_field";
  }
  return "unknown";
}

SchemeSpec parse_scheme(const std::string& id) {
  if (id == "original") return {SchemeKind::kOriginal};
  if (id == "sweep") return {SchemeKind::kSweep};
  if (id == "perfect") return {SchemeKind::kPerfect};
  if (id == "random") return {SchemeKind::kRandom};
  if (id == "far_field") return {SchemeKind::kFarField};
  static const std::regex improved(R"(improved_K(\d+)_L(\d+))");
  std::smatch m;
  if (std::regex_match(id, m, improved)) {
    return {SchemeKind::kImproved, std::stoul(m[1].str()), std::stoul(m[2].str())};
  }
  throw ConfigError("unknown scheme '" + id + "'");
}

std::uint64_t stream_seed(const Config& cfg, SeedStream stream) {
  return derive_seed(cfg.seed, {static_cast<std::uint64_t>(stream)});
}

void apply_desk_scale(Config& cfg) {
  cfg.array = ArrayConfig::half_wavelength(64);
  cfg.codebook.num_rings = 5;
  cfg.codebook.wide_factor = 4;
  cfg.dataset.num_samples = 20000;
  cfg.net.pooling = nn::Pooling::kFlatten;
  cfg.train.batch_size = 256;
  cfg.train.epochs = 8;
  cfg.train.patience = 3;
}

void apply_paper_scale(Config& cfg) {
  cfg.array = ArrayConfig::half_wavelength(512);
  cfg.codebook.num_rings = 5;
  cfg.codebook.wide_factor = 4;
  cfg.dataset.num_samples = 100000;
  cfg.net.pooling = nn::Pooling::kAverage;
  cfg.train.batch_size = 1000;
  cfg.train.epochs = 50;
  cfg.train.patience = 10;
  cfg.experiment.schemes = {{SchemeKind::kOriginal},
                            {SchemeKind::kImproved, 10, 2},
                            {SchemeKind::kSweep},
                            {SchemeKind::kFarField},
                            {SchemeKind::kRandom}};
}

Config desk_scale() {
  Config cfg;
  apply_desk_scale(cfg);
  return cfg;
}

Config paper_scale() {
  Config cfg;
  apply_paper_scale(cfg);
  return cfg;
}

void Config::validate() const {
  try {
    array.validate();
    scenario.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (codebook.num_rings < 1) throw ConfigError("codebook.num_rings must be >= 1");
  if (!(codebook.r_min > 0.0) || !(codebook.r_max > codebook.r_min)) {
    throw ConfigError("codebook.r_min/r_max: need 0 < r_min < r_max");
  }
  if (codebook.wide_factor < 1 || array.num_antennas % codebook.wide_factor != 0) {
    throw ConfigError("codebook.wide_factor must divide array.num_antennas");
  }
  if (link.snr_db_max < link.snr_db_min) throw ConfigError("link.snr_db_max < link.snr_db_min");
  if (dataset.val_fraction < 0 || dataset.test_fraction < 0 ||
      dataset.val_fraction + dataset.test_fraction > 1.0) {
    throw ConfigError("dataset.val_fraction/test_fraction must be >= 0 and sum to <= 1");
  }
  if (train.batch_size < 1) throw ConfigError("train.batch_size must be >= 1");
  if (!(train.optimizer.learning_rate > 0.0)) throw ConfigError("train.learning_rate must be > 0");
  if (net.hidden.size() != net.hidden_batchnorm.size()) {
    throw ConfigError("net.hidden_batchnorm must have one entry per net.hidden layer");
  }
  if (!(experiment.metrics.slot_time > 0.0) || !(experiment.metrics.coherence_slots > 0.0)) {
    throw ConfigError("experiment.t_s and experiment.T_tot must be > 0");
  }
  for (const SchemeSpec& s : experiment.schemes) {
    if (s.kind == SchemeKind::kImproved) {
      if (s.top_angles < 1 || s.top_angles > array.num_antennas) {
        throw ConfigError("experiment.schemes: K out of range in " + s.id());
      }
      if (s.top_rings < 1 || s.top_rings > codebook.num_rings) {
        throw ConfigError("experiment.schemes: L out of range in " + s.id());
      }
    }
  }
}

namespace {

// Reads `section` strictly: every key must be consumed by a handler.
class Section {
 public:
  Section(const json& root, std::string name) : name_(std::move(name)) {
    if (!root.contains(name_)) return;
    node_ = &root.at(name_);
    if (!node_->is_object()) throw ConfigError("config section '" + name_ + "' must be an object");
  }

  template <typename T>
  void read(const char* key, T& target) {
    known_.insert(key);
    if (!node_ || !node_->contains(key)) return;
    try {
      target = node_->at(key).get<T>();
    } catch (const json::exception& e) {
      throw ConfigError("config key '" + name_ + "." + key + "': " + e.what());
    }
  }

  bool has(const char* key) const { return node_ && node_->contains(key); }

  void finish() const {
    if (!node_) return;
    for (auto it = node_->begin(); it != node_->end(); ++it) {
      if (!known_.count(it.key())) throw ConfigError("unknown config key '" + name_ + "." + it.key() + "'");
    }
  }

 private:
  std::string name_;
  const json* node_ = nullptr;
  std::set<std::string> known_;
};

}  // namespace

Config parse_config(const std::string& json_text, const Config& base) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config root must be an object");
  static const std::set<std::string> sections{"seed", "array", "codebook", "scenario", "link",
                                              "dataset", "net", "train", "experiment"};
  for (auto it = root.begin(); it != root.end(); ++it) {
    if (!sections.count(it.key())) throw ConfigError("unknown config key '" + it.key() + "'");
  }

  Config cfg = base;
  if (root.contains("seed")) {
    if (!root["seed"].is_number_unsigned()) throw ConfigError("config key 'seed' must be an unsigned integer");
    cfg.seed = root["seed"].get<std::uint64_t>();
  }

  {
    Section s(root, "array");
    s.read("num_antennas", cfg.array.num_antennas);
    const bool new_wavelength = s.has("wavelength");
    s.read("wavelength", cfg.array.wavelength);
    if (new_wavelength) cfg.array.spacing = cfg.array.wavelength / 2.0;
    s.read("spacing", cfg.array.spacing);
    s.finish();
  }
  {
    Section s(root, "codebook");
    s.read("num_rings", cfg.codebook.num_rings);
    s.read("r_min", cfg.codebook.r_min);
    s.read("r_max", cfg.codebook.r_max);
    s.read("wide_factor", cfg.codebook.wide_factor);
    s.read("angle_dependent_rings", cfg.codebook.angle_dependent_rings);
    s.finish();
  }
  {
    Section s(root, "scenario");
    s.read("num_paths", cfg.scenario.num_paths);
    s.read("gain_variances", cfg.scenario.gain_variances);
    s.read("min_distance", cfg.scenario.min_distance);
    s.read("max_distance", cfg.scenario.max_distance);
    s.read("min_angle", cfg.scenario.min_angle);
    s.read("max_angle", cfg.scenario.max_angle);
    s.finish();
  }
  {
    Section s(root, "link");
    s.read("snr_db_min", cfg.link.snr_db_min);
    s.read("snr_db_max", cfg.link.snr_db_max);
    s.finish();
  }
  {
    Section s(root, "dataset");
    s.read("num_samples", cfg.dataset.num_samples);
    s.read("val_fraction", cfg.dataset.val_fraction);
    s.read("test_fraction", cfg.dataset.test_fraction);
    s.finish();
  }
  {
    Section s(root, "net");
    s.read("conv_channels", cfg.net.conv_channels);
    s.read("kernel_size", cfg.net.kernel_size);
    s.read("padding", cfg.net.padding);
    std::string pooling = cfg.net.pooling == nn::Pooling::kAverage ? "average" : "flatten";
    s.read("pooling", pooling);
    if (pooling == "average") {
      cfg.net.pooling = nn::Pooling::kAverage;
    } else if (pooling == "flatten") {
      cfg.net.pooling = nn::Pooling::kFlatten;
    } else {
      throw ConfigError("config key 'net.pooling' must be \"average\" or \"flatten\"");
    }
    s.read("hidden", cfg.net.hidden);
    s.read("hidden_batchnorm", cfg.net.hidden_batchnorm);
    s.read("conv_batchnorm", cfg.net.conv_batchnorm);
    s.finish();
  }
  {
    Section s(root, "train");
    s.read("epochs", cfg.train.epochs);
    s.read("batch_size", cfg.train.batch_size);
    s.read("patience", cfg.train.patience);
    std::string optimizer = cfg.train.optimizer.kind == nn::OptimizerKind::kAdam ? "adam" : "sgd";
    s.read("optimizer", optimizer);
    if (optimizer == "adam") {
      cfg.train.optimizer.kind = nn::OptimizerKind::kAdam;
    } else if (optimizer == "sgd") {
      cfg.train.optimizer.kind = nn::OptimizerKind::kSgd;
    } else {
      throw ConfigError("config key 'train.optimizer' must be \"adam\" or \"sgd\"");
    }
    s.read("learning_rate", cfg.train.optimizer.learning_rate);
    s.read("lr_decay", cfg.train.optimizer.epoch_decay);
    s.read("beta1", cfg.train.optimizer.beta1);
    s.read("beta2", cfg.train.optimizer.beta2);
    s.read("epsilon", cfg.train.optimizer.epsilon);
    s.finish();
  }
  {
    Section s(root, "experiment");
    s.read("snr_grid_db", cfg.experiment.snr_grid_db);
    s.read("trials", cfg.experiment.trials);
    s.read("workers", cfg.experiment.workers);
    s.read("t_s", cfg.experiment.metrics.slot_time);
    s.read("T_tot", cfg.experiment.metrics.coherence_slots);
    if (s.has("schemes")) {
      std::vector<std::string> ids;
      s.read("schemes", ids);
      cfg.experiment.schemes.clear();
      for (const auto& id : ids) cfg.experiment.schemes.push_back(parse_scheme(id));
    } else {
      std::vector<std::string> unused;
      s.read("schemes", unused);
    }
    std::string models = "trained";
    switch (cfg.experiment.models) {
      case ModelSource::kTrained: models = "trained"; break;
      case ModelSource::kOracle: models = "oracle"; break;
      case ModelSource::kUniform: models = "uniform"; break;
    }
    s.read("models", models);
    if (models == "trained") {
      cfg.experiment.models = ModelSource::kTrained;
    } else if (models == "oracle") {
      cfg.experiment.models = ModelSource::kOracle;
    } else if (models == "uniform") {
      cfg.experiment.models = ModelSource::kUniform;
    } else {
      throw ConfigError("config key 'experiment.models' must be trained, oracle or uniform");
    }
    s.finish();
  }
  cfg.validate();
  return cfg;
}

Config load_config(const std::filesystem::path& path, const Config& base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), base);
}

std::string to_json(const Config& cfg) {
  json j;
  j["seed"] = cfg.seed;
  j["array"] = {{"num_antennas", cfg.array.num_antennas},
                {"wavelength", cfg.array.wavelength},
                {"spacing", cfg.array.spacing}};
  j["codebook"] = {{"num_rings", cfg.codebook.num_rings},
                   {"r_min", cfg.codebook.r_min},
                   {"r_max", cfg.codebook.r_max},
                   {"wide_factor", cfg.codebook.wide_factor},
                   {"angle_dependent_rings", cfg.codebook.angle_dependent_rings}};
  j["scenario"] = {{"num_paths", cfg.scenario.num_paths},
                   {"gain_variances", cfg.scenario.gain_variances},
                   {"min_distance", cfg.scenario.min_distance},
                   {"max_distance", cfg.scenario.max_distance},
                   {"min_angle", cfg.scenario.min_angle},
                   {"max_angle", cfg.scenario.max_angle}};
  j["link"] = {{"snr_db_min", cfg.link.snr_db_min}, {"snr_db_max", cfg.link.snr_db_max}};
  j["dataset"] = {{"num_samples", cfg.dataset.num_samples},
                  {"val_fraction", cfg.dataset.val_fraction},
                  {"test_fraction", cfg.dataset.test_fraction}};
  j["net"] = {{"conv_channels", cfg.net.conv_channels},
              {"kernel_size", cfg.net.kernel_size},
              {"padding", cfg.net.padding},
              {"pooling", cfg.net.pooling == nn::Pooling::kAverage ? "average" : "flatten"},
              {"hidden", cfg.net.hidden},
              {"hidden_batchnorm", cfg.net.hidden_batchnorm},
              {"conv_batchnorm", cfg.net.conv_batchnorm}};
  j["train"] = {{"epochs", cfg.train.epochs},
                {"batch_size", cfg.train.batch_size},
                {"patience", cfg.train.patience},
                {"optimizer", cfg.train.optimizer.kind == nn::OptimizerKind::kAdam ? "adam" : "sgd"},
                {"learning_rate", cfg.train.optimizer.learning_rate},
                {"lr_decay", cfg.train.optimizer.epoch_decay},
                {"beta1", cfg.train.optimizer.beta1},
                {"beta2", cfg.train.optimizer.beta2},
                {"epsilon", cfg.train.optimizer.epsilon}};
  std::vector<std::string> schemes;
  for (const auto& s : cfg.experiment.schemes) schemes.push_back(s.id());
  const char* models = cfg.experiment.models == ModelSource::kTrained  ? "trained"
                       : cfg.experiment.models == ModelSource::kOracle ? "oracle"
                                                                       : "uniform";
  j["experiment"] = {{"snr_grid_db", cfg.experiment.snr_grid_db},
                     {"trials", cfg.experiment.trials},
                     {"workers", cfg.experiment.workers},
                     {"t_s", cfg.experiment.metrics.slot_time},
                     {"T_tot", cfg.experiment.metrics.coherence_slots},
                     {"schemes", schemes},
                     {"models", models}};
  return j.dump(2);
}

}  // namespace nfbeam
