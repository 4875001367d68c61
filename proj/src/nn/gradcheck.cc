#include "structrtl/nn/gradcheck.h"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace structrtl::nn {

GradCheckResult CheckGradients(const std::function<Tensor()>& loss_fn,
                               const std::vector<Tensor>& inputs, double step) {
  for (Tensor t : inputs) t.ZeroGrad();
  loss_fn().Backward();
  std::vector<Matrix> analytic;
  for (const Tensor& t : inputs) analytic.push_back(t.grad());

  GradCheckResult result;
  for (size_t i = 0; i < inputs.size(); ++i) {
    Tensor t = inputs[i];
    Matrix& v = t.mutable_value();
    for (int r = 0; r < v.rows(); ++r) {
      for (int c = 0; c < v.cols(); ++c) {
        const double saved = v(r, c);
        v(r, c) = saved + step;
        const double up = loss_fn().item();
        v(r, c) = saved - step;
        const double down = loss_fn().item();
        v(r, c) = saved;
        const double numeric = (up - down) / (2.0 * step);
        const double a = analytic[i](r, c);
        const double err = std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), 1e-4});
        ++result.entries_checked;
        if (err > result.max_relative_error) {
          result.max_relative_error = err;
          std::ostringstream os;
          os << "input " << i << " (" << r << ", " << c << "): analytic " << a << " numeric " << numeric;
          result.worst = os.str();
        }
      }
    }
  }
  for (Tensor t : inputs) t.ZeroGrad();
  return result;
}

}  // namespace structrtl::nn
