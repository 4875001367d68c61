#include "structrtl/nn/optim.h"

#include <cmath>

#include "structrtl/nn/checkpoint.h"
#include "structrtl/util/error.h"

namespace structrtl::nn {

Adam::Adam(std::vector<ParamGroup> groups, AdamOptions options)
    : groups_(std::move(groups)), options_(options) {
  for (const ParamGroup& g : groups_) {
    for (const Tensor& p : g.params) {
      m_.push_back(Matrix::Zero(p.rows(), p.cols()));
      v_.push_back(Matrix::Zero(p.rows(), p.cols()));
    }
  }
}

void Adam::Step() {
  ++step_;
  const double bc1 = 1.0 - std::pow(options_.beta1, static_cast<double>(step_));
  const double bc2 = 1.0 - std::pow(options_.beta2, static_cast<double>(step_));
  size_t i = 0;
  for (ParamGroup& group : groups_) {
    for (Tensor& p : group.params) {
      Matrix& value = p.mutable_value();
      Matrix g = p.grad();
      if (options_.mode == WeightDecayMode::kCoupled) {
        g += group.weight_decay * value;
      } else {
        value -= group.lr * group.weight_decay * value;
      }
      m_[i] = options_.beta1 * m_[i] + (1.0 - options_.beta1) * g;
      v_[i] = options_.beta2 * v_[i] + (1.0 - options_.beta2) * g.cwiseProduct(g);
      value.array() -= group.lr * (m_[i].array() / bc1) /
                       ((v_[i].array() / bc2).sqrt() + options_.eps);
      ++i;
    }
  }
}

void Adam::ZeroGrad() {
  for (ParamGroup& group : groups_) {
    for (Tensor& p : group.params) p.ZeroGrad();
  }
}

void Adam::SaveState(Checkpoint& ckpt, const std::string& prefix) const {
  for (size_t i = 0; i < m_.size(); ++i) {
    ckpt.Put(prefix + "m." + std::to_string(i), m_[i]);
    ckpt.Put(prefix + "v." + std::to_string(i), v_[i]);
  }
  ckpt.meta[prefix + "step"] = step_;
}

void Adam::LoadState(const Checkpoint& ckpt, const std::string& prefix) {
  for (size_t i = 0; i < m_.size(); ++i) {
    const Matrix* m = ckpt.Find(prefix + "m." + std::to_string(i));
    const Matrix* v = ckpt.Find(prefix + "v." + std::to_string(i));
    if (!m || !v || m->rows() != m_[i].rows() || m->cols() != m_[i].cols()) {
      throw SchemaError("/tensors", "optimizer state missing or mismatched for slot " + std::to_string(i));
    }
    m_[i] = *m;
    v_[i] = *v;
  }
  step_ = ckpt.meta.value(prefix + "step", int64_t{0});
}

}  // namespace structrtl::nn
