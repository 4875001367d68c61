#ifndef STRUCTRTL_NN_CHECKPOINT_H_
#define STRUCTRTL_NN_CHECKPOINT_H_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "structrtl/nn/layers.h"

namespace structrtl::nn {

inline constexpr uint32_t kCheckpointVersion = 1;

// On disk: "SRTLCKPT", u32 version, u64 header length, a JSON header
// {"version", "kind", "meta", "tensors": [{"name", "rows", "cols",
// "offset"}]}, then the tensors as little-endian float64, row-major.
struct Checkpoint {
  std::string kind;
  nlohmann::json meta = nlohmann::json::object();
  std::vector<std::pair<std::string, Matrix>> tensors;

  const Matrix* Find(const std::string& name) const;
  void Put(const std::string& name, const Matrix& value);
};

void SaveCheckpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint LoadCheckpoint(const std::string& path);

void StoreParameters(const ParameterList& params, Checkpoint& ckpt, const std::string& prefix = "");
// Copies values into existing parameter tensors by name. Missing names or
// shape mismatches throw SchemaError unless `allow_missing` is set, in which
// case missing names keep their current values.
void RestoreParameters(const Checkpoint& ckpt, const ParameterList& params,
                       const std::string& prefix = "", bool allow_missing = false);

// FNV-1a over the raw parameter bytes; detects any change to frozen weights.
uint64_t ParameterChecksum(const ParameterList& params);

}  // namespace structrtl::nn

#endif  // STRUCTRTL_NN_CHECKPOINT_H_
