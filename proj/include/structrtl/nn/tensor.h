#ifndef STRUCTRTL_NN_TENSOR_H_
#define STRUCTRTL_NN_TENSOR_H_

#include <functional>
#include <memory>
#include <vector>

#include "structrtl/util/matrix.h"

namespace structrtl::nn {

struct TensorImpl {
  Matrix value;
  Matrix grad;  // empty until something flows into it
  bool requires_grad = false;
  // Set on results of differentiable ops; cleared once backward has run.
  std::vector<std::shared_ptr<TensorImpl>> parents;
  std::function<void(TensorImpl&)> backward;
  bool consumed = false;

  void AccumulateGrad(const Matrix& g) {
    if (grad.size() == 0) {
      grad = g;
    } else {
      grad += g;
    }
  }
};

// A 2-D array of doubles with an optional reverse-mode tape. Scalars are
// 1x1. Copies share the underlying storage, so a Tensor can be passed by
// value like a handle.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Matrix value, bool requires_grad = false);

  const Matrix& value() const { return impl_->value; }
  Matrix& mutable_value() { return impl_->value; }
  // Zero matrix of the right shape when nothing has accumulated yet.
  Matrix grad() const;
  bool has_grad() const { return impl_->grad.size() != 0; }
  bool requires_grad() const { return impl_->requires_grad; }
  int rows() const { return static_cast<int>(impl_->value.rows()); }
  int cols() const { return static_cast<int>(impl_->value.cols()); }
  double item() const;
  bool defined() const { return impl_ != nullptr; }

  // Reverse pass from this 1x1 tensor. Accumulates into every reachable
  // leaf that requires grad, then releases the tape. A second call on the
  // same result throws.
  void Backward();

  // Same value, cut off from the tape.
  Tensor Detach() const;

  void ZeroGrad() { impl_->grad.resize(0, 0); }

  const std::shared_ptr<TensorImpl>& impl() const { return impl_; }

 private:
  std::shared_ptr<TensorImpl> impl_;
};

// While alive, op results record no tape (evaluation passes).
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

bool GradEnabled();

inline Tensor Constant(Matrix value) { return Tensor(std::move(value), false); }
inline Tensor Parameter(Matrix value) { return Tensor(std::move(value), true); }
Tensor Scalar(double v);

// Builds an op result. `backward` receives the result (whose grad is
// populated) and must accumulate into the parents that require grad.
Tensor MakeResult(Matrix value, std::vector<Tensor> parents,
                  std::function<void(TensorImpl&)> backward);

}  // namespace structrtl::nn

#endif  // STRUCTRTL_NN_TENSOR_H_
