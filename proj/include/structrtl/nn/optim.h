#ifndef STRUCTRTL_NN_OPTIM_H_
#define STRUCTRTL_NN_OPTIM_H_

#include <cstdint>
#include <string>
#include <vector>

#include "structrtl/nn/tensor.h"

namespace structrtl::nn {

struct Checkpoint;

struct ParamGroup {
  std::vector<Tensor> params;
  double lr = 1e-3;
  double weight_decay = 0.0;
};

enum class WeightDecayMode {
  kCoupled,    // Adam: grad += wd * param
  kDecoupled,  // AdamW: param -= lr * wd * param before the moment update
};

struct AdamOptions {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  WeightDecayMode mode = WeightDecayMode::kCoupled;
};

// Adam / AdamW with bias correction. Parameters that received no gradient
// in a step are treated as having a zero gradient.
class Adam {
 public:
  Adam(std::vector<ParamGroup> groups, AdamOptions options);

  void Step();
  void ZeroGrad();

  int64_t step_count() const { return step_; }
  const std::vector<ParamGroup>& groups() const { return groups_; }

  // Moments are stored as "<prefix>m.<i>" / "<prefix>v.<i>" in parameter
  // order, the step count in meta["<prefix>step"].
  void SaveState(Checkpoint& ckpt, const std::string& prefix = "optimizer.") const;
  void LoadState(const Checkpoint& ckpt, const std::string& prefix = "optimizer.");

 private:
  std::vector<ParamGroup> groups_;
  AdamOptions options_;
  std::vector<Matrix> m_;
  std::vector<Matrix> v_;
  int64_t step_ = 0;
};

}  // namespace structrtl::nn

#endif  // STRUCTRTL_NN_OPTIM_H_
