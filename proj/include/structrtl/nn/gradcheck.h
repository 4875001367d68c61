#ifndef STRUCTRTL_NN_GRADCHECK_H_
#define STRUCTRTL_NN_GRADCHECK_H_

#include <functional>
#include <string>
#include <vector>

#include "structrtl/nn/tensor.h"

namespace structrtl::nn {

struct GradCheckResult {
  double max_relative_error = 0.0;
  int entries_checked = 0;
  std::string worst;  // "input <i> (<r>, <c>): analytic <a> numeric <n>"
};

// Compares Backward() against central differences of `loss_fn` for every
// entry of every tensor in `inputs` (which must require grad). The error
// per entry is |a - n| / max(|a|, |n|, 1e-4), so gradients far below 1e-4
// are compared in absolute terms.
GradCheckResult CheckGradients(const std::function<Tensor()>& loss_fn,
                               const std::vector<Tensor>& inputs, double step = 1e-6);

}  // namespace structrtl::nn

#endif  // STRUCTRTL_NN_GRADCHECK_H_
