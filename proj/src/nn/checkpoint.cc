#include "structrtl/nn/checkpoint.h"

#include <bit>
#include <cstring>
#include <fstream>

#include "structrtl/util/error.h"

namespace structrtl::nn {

static_assert(std::endian::native == std::endian::little,
              "checkpoint payloads are written as host-order doubles");

namespace {

constexpr char kMagic[8] = {'S', 'R', 'T', 'L', 'C', 'K', 'P', 'T'};

template <typename T>
void WritePod(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T ReadPod(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  return v;
}

}  // namespace

const Matrix* Checkpoint::Find(const std::string& name) const {
  for (const auto& [n, m] : tensors) {
    if (n == name) return &m;
  }
  return nullptr;
}

void Checkpoint::Put(const std::string& name, const Matrix& value) {
  for (auto& [n, m] : tensors) {
    if (n == name) {
      m = value;
      return;
    }
  }
  tensors.emplace_back(name, value);
}

void SaveCheckpoint(const Checkpoint& ckpt, const std::string& path) {
  nlohmann::json header;
  header["version"] = kCheckpointVersion;
  header["kind"] = ckpt.kind;
  header["meta"] = ckpt.meta;
  header["tensors"] = nlohmann::json::array();
  uint64_t offset = 0;
  for (const auto& [name, m] : ckpt.tensors) {
    header["tensors"].push_back({{"name", name}, {"rows", m.rows()}, {"cols", m.cols()}, {"offset", offset}});
    offset += static_cast<uint64_t>(m.size()) * sizeof(double);
  }
  const std::string text = header.dump();

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write checkpoint " + path);
  out.write(kMagic, sizeof(kMagic));
  WritePod<uint32_t>(out, kCheckpointVersion);
  WritePod<uint64_t>(out, text.size());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  for (const auto& [name, m] : ckpt.tensors) {
    out.write(reinterpret_cast<const char*>(m.data()), static_cast<std::streamsize>(m.size() * sizeof(double)));
  }
  if (!out) throw Error("failed writing checkpoint " + path);
}

Checkpoint LoadCheckpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open checkpoint " + path);
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(magic)) != 0) {
    throw SchemaError("", path + " is not a checkpoint file");
  }
  const uint32_t version = ReadPod<uint32_t>(in);
  if (version != kCheckpointVersion) {
    throw SchemaError("/version", "unsupported checkpoint version " + std::to_string(version));
  }
  const uint64_t header_len = ReadPod<uint64_t>(in);
  std::string text(header_len, '\0');
  in.read(text.data(), static_cast<std::streamsize>(header_len));
  if (!in) throw SchemaError("", "truncated checkpoint header in " + path);
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError("", std::string("bad checkpoint header: ") + e.what());
  }

  Checkpoint ckpt;
  ckpt.kind = header.value("kind", "");
  ckpt.meta = header.value("meta", nlohmann::json::object());
  const auto payload_start = in.tellg();
  for (const auto& t : header.at("tensors")) {
    const int64_t rows = t.at("rows").get<int64_t>();
    const int64_t cols = t.at("cols").get<int64_t>();
    Matrix m(rows, cols);
    in.seekg(payload_start + static_cast<std::streamoff>(t.at("offset").get<uint64_t>()));
    in.read(reinterpret_cast<char*>(m.data()), static_cast<std::streamsize>(m.size() * sizeof(double)));
    if (!in) throw SchemaError("/tensors", "truncated payload for " + t.at("name").get<std::string>());
    ckpt.tensors.emplace_back(t.at("name").get<std::string>(), std::move(m));
  }
  return ckpt;
}

void StoreParameters(const ParameterList& params, Checkpoint& ckpt, const std::string& prefix) {
  for (const NamedParameter& p : params) ckpt.Put(prefix + p.name, p.tensor.value());
}

void RestoreParameters(const Checkpoint& ckpt, const ParameterList& params, const std::string& prefix,
                       bool allow_missing) {
  for (const NamedParameter& p : params) {
    const Matrix* m = ckpt.Find(prefix + p.name);
    if (!m) {
      if (allow_missing) continue;
      throw SchemaError("/tensors", "checkpoint has no parameter " + prefix + p.name);
    }
    if (m->rows() != p.tensor.rows() || m->cols() != p.tensor.cols()) {
      throw SchemaError("/tensors", "shape mismatch for " + prefix + p.name);
    }
    Tensor t = p.tensor;
    t.mutable_value() = *m;
  }
}

uint64_t ParameterChecksum(const ParameterList& params) {
  uint64_t h = 1469598103934665603ULL;
  for (const NamedParameter& p : params) {
    const auto* bytes = reinterpret_cast<const unsigned char*>(p.tensor.value().data());
    for (size_t i = 0; i < p.tensor.value().size() * sizeof(double); ++i) {
      h ^= bytes[i];
      h *= 1099511628211ULL;
    }
  }
  return h;
}

}  // namespace structrtl::nn
