#include "structrtl/nn/tensor.h"

#include <unordered_set>

#include "structrtl/util/error.h"

namespace structrtl::nn {

namespace {
thread_local bool grad_enabled = true;
}  // namespace

NoGradGuard::NoGradGuard() : previous_(grad_enabled) { grad_enabled = false; }
NoGradGuard::~NoGradGuard() { grad_enabled = previous_; }
bool GradEnabled() { return grad_enabled; }

Tensor::Tensor(Matrix value, bool requires_grad) : impl_(std::make_shared<TensorImpl>()) {
  impl_->value = std::move(value);
  impl_->requires_grad = requires_grad;
}

Matrix Tensor::grad() const {
  if (impl_->grad.size() == 0) return Matrix::Zero(rows(), cols());
  return impl_->grad;
}

double Tensor::item() const {
  if (rows() != 1 || cols() != 1) throw Error("item() on a non-scalar tensor");
  return impl_->value(0, 0);
}

Tensor Scalar(double v) {
  Matrix m(1, 1);
  m(0, 0) = v;
  return Constant(std::move(m));
}

Tensor MakeResult(Matrix value, std::vector<Tensor> parents,
                  std::function<void(TensorImpl&)> backward) {
  Tensor out(std::move(value), false);
  bool any = false;
  if (!grad_enabled) return out;
  for (const Tensor& p : parents) any = any || p.requires_grad();
  if (!any) return out;
  TensorImpl& impl = *out.impl();
  impl.requires_grad = true;
  for (Tensor& p : parents) impl.parents.push_back(p.impl());
  impl.backward = std::move(backward);
  return out;
}

void Tensor::Backward() {
  if (rows() != 1 || cols() != 1) throw Error("Backward() needs a scalar loss");
  if (impl_->consumed) throw Error("Backward() called twice on the same graph");
  if (!impl_->requires_grad) throw Error("loss does not depend on any parameter");

  // Iterative post-order DFS gives a topological order of the tape.
  std::vector<TensorImpl*> order;
  std::unordered_set<TensorImpl*> seen;
  std::vector<std::pair<TensorImpl*, size_t>> stack{{impl_.get(), 0}};
  seen.insert(impl_.get());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      TensorImpl* p = node->parents[next++].get();
      if (p->requires_grad && !seen.contains(p)) {
        seen.insert(p);
        stack.emplace_back(p, 0);
      }
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  impl_->grad = Matrix::Ones(1, 1);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    TensorImpl* node = *it;
    if (node->backward && node->grad.size() != 0) node->backward(*node);
  }
  for (TensorImpl* node : order) {
    if (!node->backward) continue;
    node->backward = nullptr;
    node->parents.clear();
    node->grad.resize(0, 0);
    node->consumed = true;
  }
}

Tensor Tensor::Detach() const { return Constant(impl_->value); }

}  // namespace structrtl::nn
