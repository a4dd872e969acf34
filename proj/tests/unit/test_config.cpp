#include <gtest/gtest.h>

#include "nfbeam/config.hpp"

using namespace nfbeam;

namespace {

std::string error_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST(Config, Presets) {
  const Config d = desk_scale();
  EXPECT_EQ(d.array.num_antennas, 64u);
  EXPECT_EQ(d.codebook.num_rings, 5u);
  EXPECT_EQ(d.codebook.wide_factor, 4u);
  EXPECT_EQ(d.num_wide(), 16u);
  EXPECT_EQ(d.dataset.num_samples, 20000u);
  const Config p = paper_scale();
  EXPECT_EQ(p.array.num_antennas, 512u);
  EXPECT_EQ(p.num_wide(), 128u);
  EXPECT_EQ(p.num_codewords(), 2560u);
  EXPECT_EQ(p.dataset.num_samples, 100000u);
  EXPECT_EQ(p.train.batch_size, 1000u);
  EXPECT_NO_THROW(d.validate());
  EXPECT_NO_THROW(p.validate());
}

TEST(Config, UnknownKeysNamed) {
  EXPECT_NE(error_of(R"({"array": {"num_antenas": 64}})").find("array.num_antenas"), std::string::npos);
  EXPECT_NE(error_of(R"({"arrays": {}})").find("arrays"), std::string::npos);
  EXPECT_NE(error_of(R"({"train": {"epochs": "many"}})").find("train.epochs"), std::string::npos);
  EXPECT_NE(error_of(R"({"experiment": {"schemes": ["greedy"]}})").find("greedy"), std::string::npos);
  EXPECT_NE(error_of("{").find("JSON"), std::string::npos);
}

TEST(Config, Validation) {
  EXPECT_NE(error_of(R"({"codebook": {"wide_factor": 3}})").find("wide_factor"), std::string::npos);
  EXPECT_NE(error_of(R"({"codebook": {"r_min": 70}})").find("r_min"), std::string::npos);
  EXPECT_NE(error_of(R"({"experiment": {"schemes": ["improved_K65_L1"]}})").find("K out of range"),
            std::string::npos);
  EXPECT_NE(error_of(R"({"experiment": {"schemes": ["improved_K1_L6"]}})").find("L out of range"),
            std::string::npos);
}

TEST(Config, OverridesOnTopOfBase) {
  const Config c = parse_config(R"({"seed": 7, "array": {"num_antennas": 32}, "train": {"epochs": 3}})");
  EXPECT_EQ(c.seed, 7u);
  EXPECT_EQ(c.array.num_antennas, 32u);
  EXPECT_EQ(c.train.epochs, 3u);
  EXPECT_EQ(c.codebook.num_rings, 5u);
  const Config p = parse_config(R"({"dataset": {"num_samples": 10}})", paper_scale());
  EXPECT_EQ(p.array.num_antennas, 512u);
  EXPECT_EQ(p.dataset.num_samples, 10u);
}

TEST(Config, SchemeIds) {
  for (const char* id : {"original", "sweep", "perfect", "random", "far_field", "improved_K10_L2"}) {
    EXPECT_EQ(parse_scheme(id).id(), id);
  }
  const SchemeSpec s = parse_scheme("improved_K5_L3");
  EXPECT_EQ(s.kind, SchemeKind::kImproved);
  EXPECT_EQ(s.top_angles, 5u);
  EXPECT_EQ(s.top_rings, 3u);
  EXPECT_TRUE(s.needs_models());
  EXPECT_FALSE(parse_scheme("sweep").needs_models());
  EXPECT_THROW(parse_scheme("improved_K5"), ConfigError);
}

TEST(Config, JsonRoundTrip) {
  Config c = paper_scale();
  c.seed = 99;
  c.experiment.models = ModelSource::kUniform;
  c.experiment.workers = 3;
  const std::string text = to_json(c);
  const Config back = parse_config(text, desk_scale());
  EXPECT_EQ(to_json(back), text);
  EXPECT_EQ(back.array.num_antennas, 512u);
}

TEST(Config, StreamSeedsDiffer) {
  Config c = desk_scale();
  const auto a = stream_seed(c, SeedStream::kDataset);
  EXPECT_NE(a, stream_seed(c, SeedStream::kTraining));
  EXPECT_NE(a, stream_seed(c, SeedStream::kExperiment));
  c.seed += 1;
  EXPECT_NE(a, stream_seed(c, SeedStream::kDataset));
}
