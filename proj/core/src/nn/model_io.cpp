#include <string>

#include "nfbeam/binary_io.hpp"
#include "nfbeam/nn/network.hpp"

namespace nfbeam::nn {

namespace {

constexpr char kModelMagic[8] = {'N', 'F', 'B', 'M', 'O', 'D', 'E', 'L'};

void write_tensor(BinaryWriter& out, const Tensor& t) {
  out.u64(t.size());
  for (double v : t.values()) out.f64(v);
}

void read_tensor(BinaryReader& in, Tensor& t) {
  const std::uint64_t count = in.u64();
  if (count != t.size()) {
    throw FormatError("model: tensor holds " + std::to_string(count) + " values, architecture expects " +
                      std::to_string(t.size()));
  }
  for (double& v : t.values()) v = in.f64();
}

}  // namespace

std::vector<unsigned char> serialize_model(const NetworkModel& model_in) {
  // parameters()/buffers() are non-const accessors; the copy keeps this const.
  NetworkModel model(model_in);
  BinaryWriter out;
  out.bytes(kModelMagic, sizeof kModelMagic);
  out.u32(kModelFormatVersion);
  out.u64(model.input_length());
  const auto specs = model.specs();
  out.u64(specs.size());
  for (const LayerSpec& s : specs) {
    out.u32(static_cast<std::uint32_t>(s.kind));
    out.u64(s.in);
    out.u64(s.out);
    out.u64(s.kernel);
    out.u64(s.padding);
  }
  for (Parameter* p : model.parameters()) write_tensor(out, p->value);
  for (Tensor* b : model.buffers()) write_tensor(out, *b);
  const auto& buf = out.buffer();
  const std::uint64_t checksum = fnv1a64(buf.data(), buf.size());
  out.u64(checksum);
  return out.buffer();
}

NetworkModel deserialize_model(std::vector<unsigned char> bytes) {
  if (bytes.size() < sizeof kModelMagic + 4 + 8) throw FormatError("model: truncated file");
  BinaryReader in(std::move(bytes));
  in.expect_magic(kModelMagic, sizeof kModelMagic, "model");
  const std::uint32_t version = in.u32();
  if (version != kModelFormatVersion) {
    throw FormatError("model: file format version " + std::to_string(version) +
                      " is not supported (expected " + std::to_string(kModelFormatVersion) + ")");
  }
  const std::size_t input_length = in.u64();
  const std::uint64_t layer_count = in.u64();
  if (layer_count > 4096) throw FormatError("model: implausible layer count");
  std::vector<LayerSpec> specs(layer_count);
  for (LayerSpec& s : specs) {
    const std::uint32_t kind = in.u32();
    if (kind < 1 || kind > 7) throw FormatError("model: unknown layer kind " + std::to_string(kind));
    s.kind = static_cast<LayerKind>(kind);
    s.in = in.u64();
    s.out = in.u64();
    s.kernel = in.u64();
    s.padding = in.u64();
  }
  NetworkModel model;
  try {
    model = NetworkModel(specs, input_length);
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("model: inconsistent architecture header: ") + e.what());
  }
  for (Parameter* p : model.parameters()) read_tensor(in, p->value);
  for (Tensor* b : model.buffers()) read_tensor(in, *b);
  const std::size_t payload = in.position();
  const std::uint64_t expected = fnv1a64(in.buffer().data(), payload);
  if (in.u64() != expected) throw FormatError("model: checksum mismatch");
  in.expect_end("model");
  return model;
}

void save_model(const NetworkModel& model, const std::filesystem::path& path) {
  BinaryWriter out;
  const auto bytes = serialize_model(model);
  out.bytes(bytes.data(), bytes.size());
  out.save(path);
}

NetworkModel load_model(const std::filesystem::path& path) {
  BinaryReader raw = BinaryReader::load(path);
  return deserialize_model(raw.buffer());
}

}  // namespace nfbeam::nn
