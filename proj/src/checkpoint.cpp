#include "noge/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "noge/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "checkpoint format assumes a little-endian host");

namespace noge {

using nlohmann::json;

namespace {

constexpr char kMagic[8] = {'N', 'O', 'G', 'E', 'C', 'K', 'P', '1'};
constexpr uint32_t kVersion = 1;

void write_raw(std::ostream& os, const void* p, size_t n) {
  os.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
}

void read_raw(std::istream& is, void* p, size_t n) {
  is.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
  if (!is) throw IoError("checkpoint: truncated file");
}

void write_tensor_data(std::ostream& os, const Tensor& t) {
  for (const auto& arr : t.c)
    write_raw(os, arr.data(), arr.size() * sizeof(double));
}

void read_tensor_data(std::istream& is, Tensor& t) {
  for (auto& arr : t.c) read_raw(is, arr.data(), arr.size() * sizeof(double));
}

json tensor_shapes(const std::vector<const Tensor*>& ts) {
  json arr = json::array();
  for (const Tensor* t : ts)
    arr.push_back({{"comps", t->comps}, {"rows", t->rows}, {"cols", t->cols}});
  return arr;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const Model& model,
                     const AdamState* adam, const CheckpointMeta& meta,
                     uint64_t digest) {
  json header;
  header["encoder"] = encoder_kind_name(model.encoder.kind);
  header["layers"] = model.encoder.num_layers;
  header["dim"] = model.encoder.dim;
  header["decoder"] = decoder_kind_name(model.decoder);
  header["entity_count"] = model.entity_count;
  header["num_relations"] = model.num_relations;
  header["epoch"] = meta.epoch;
  header["best_valid_mrr"] = meta.best_valid_mrr;
  header["best_epoch"] = meta.best_epoch;
  header["seed"] = meta.seed;
  header["has_adam"] = adam != nullptr;
  header["adam_step"] = adam ? adam->step : meta.adam_step;
  header["tensors"] = tensor_shapes(param_tensors(model.params));
  const std::string hs = header.dump();

  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot write checkpoint " + path.string());
  write_raw(os, kMagic, sizeof(kMagic));
  write_raw(os, &kVersion, sizeof(kVersion));
  write_raw(os, &digest, sizeof(digest));
  const uint64_t hlen = hs.size();
  write_raw(os, &hlen, sizeof(hlen));
  write_raw(os, hs.data(), hs.size());
  for (const Tensor* t : param_tensors(model.params)) write_tensor_data(os, *t);
  if (adam) {
    for (const Tensor& t : adam->m) write_tensor_data(os, t);
    for (const Tensor& t : adam->v) write_tensor_data(os, t);
  }
  if (!os) throw IoError("checkpoint write failed: " + path.string());
}

LoadedCheckpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open checkpoint " + path.string());
  char magic[8];
  read_raw(is, magic, sizeof(magic));
  if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw DataError("not a checkpoint file: " + path.string());
  uint32_t version = 0;
  read_raw(is, &version, sizeof(version));
  if (version != kVersion)
    throw DataError("unsupported checkpoint version " + std::to_string(version));
  LoadedCheckpoint out;
  read_raw(is, &out.digest, sizeof(out.digest));
  uint64_t hlen = 0;
  read_raw(is, &hlen, sizeof(hlen));
  std::string hs(hlen, '\0');
  read_raw(is, hs.data(), hlen);
  json header;
  try {
    header = json::parse(hs);
  } catch (const json::exception& e) {
    throw DataError(std::string("checkpoint header parse error: ") + e.what());
  }

  Model& m = out.model;
  m.encoder.kind = encoder_kind_from(header.at("encoder").get<std::string>());
  m.encoder.num_layers = header.at("layers").get<int>();
  m.encoder.dim = header.at("dim").get<int>();
  m.decoder = decoder_kind_from(header.at("decoder").get<std::string>());
  m.entity_count = header.at("entity_count").get<int64_t>();
  m.num_relations = header.at("num_relations").get<int32_t>();
  out.meta.epoch = header.at("epoch").get<int>();
  out.meta.best_valid_mrr = header.at("best_valid_mrr").get<double>();
  out.meta.best_epoch = header.at("best_epoch").get<int>();
  out.meta.seed = header.at("seed").get<uint64_t>();
  out.meta.adam_step = header.at("adam_step").get<int64_t>();

  m.params.config = m.encoder;
  m.params.node_count = m.node_count();
  const json& shapes = header.at("tensors");
  if (shapes.size() != static_cast<size_t>(m.encoder.num_layers) + 1)
    throw DataError("checkpoint tensor count mismatch");
  auto make_tensor = [](const json& s) {
    return Tensor(s.at("comps").get<int>(), s.at("rows").get<int64_t>(),
                  s.at("cols").get<int64_t>());
  };
  m.params.embeddings = make_tensor(shapes[0]);
  for (size_t i = 1; i < shapes.size(); ++i)
    m.params.layer_weights.push_back(make_tensor(shapes[i]));
  for (Tensor* t : param_tensors(m.params)) read_tensor_data(is, *t);

  if (header.at("has_adam").get<bool>()) {
    AdamState adam;
    adam.step = out.meta.adam_step;
    for (const Tensor* t : param_tensors(m.params)) {
      adam.m.push_back(zeros_like(*t));
      adam.v.push_back(zeros_like(*t));
    }
    for (Tensor& t : adam.m) read_tensor_data(is, t);
    for (Tensor& t : adam.v) read_tensor_data(is, t);
    out.adam = std::move(adam);
  }
  return out;
}

}  // namespace noge
