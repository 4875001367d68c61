#include "structrtl/nn/ops.h"

#include <cmath>
#include <numbers>

#include "structrtl/util/error.h"

namespace structrtl::nn {
namespace {

void RequireSameShape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(std::string(op) + ": shape mismatch " + std::to_string(a.rows()) + "x" +
                std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                std::to_string(b.cols()));
  }
}

TensorImpl& Parent(TensorImpl& self, size_t i) { return *self.parents[i]; }

}  // namespace

Tensor MatMul(const Tensor& a, const Tensor& b) {
  if (a.cols() != b.rows()) throw Error("MatMul: inner dimensions differ");
  Matrix out = a.value() * b.value();
  return MakeResult(std::move(out), {a, b}, [](TensorImpl& self) {
    TensorImpl& pa = Parent(self, 0);
    TensorImpl& pb = Parent(self, 1);
    if (pa.requires_grad) pa.AccumulateGrad(self.grad * pb.value.transpose());
    if (pb.requires_grad) pb.AccumulateGrad(pa.value.transpose() * self.grad);
  });
}

Tensor Add(const Tensor& a, const Tensor& b) {
  if (b.rows() == 1 && a.rows() != 1 && b.cols() == a.cols()) {
    Matrix out = a.value().rowwise() + b.value().row(0);
    return MakeResult(std::move(out), {a, b}, [](TensorImpl& self) {
      TensorImpl& pa = Parent(self, 0);
      TensorImpl& pb = Parent(self, 1);
      if (pa.requires_grad) pa.AccumulateGrad(self.grad);
      if (pb.requires_grad) pb.AccumulateGrad(self.grad.colwise().sum());
    });
  }
  RequireSameShape(a, b, "Add");
  Matrix out = a.value() + b.value();
  return MakeResult(std::move(out), {a, b}, [](TensorImpl& self) {
    for (size_t i = 0; i < 2; ++i) {
      if (Parent(self, i).requires_grad) Parent(self, i).AccumulateGrad(self.grad);
    }
  });
}

Tensor Sub(const Tensor& a, const Tensor& b) {
  RequireSameShape(a, b, "Sub");
  Matrix out = a.value() - b.value();
  return MakeResult(std::move(out), {a, b}, [](TensorImpl& self) {
    if (Parent(self, 0).requires_grad) Parent(self, 0).AccumulateGrad(self.grad);
    if (Parent(self, 1).requires_grad) Parent(self, 1).AccumulateGrad(-self.grad);
  });
}

Tensor Mul(const Tensor& a, const Tensor& b) {
  RequireSameShape(a, b, "Mul");
  Matrix out = a.value().cwiseProduct(b.value());
  return MakeResult(std::move(out), {a, b}, [](TensorImpl& self) {
    TensorImpl& pa = Parent(self, 0);
    TensorImpl& pb = Parent(self, 1);
    if (pa.requires_grad) pa.AccumulateGrad(self.grad.cwiseProduct(pb.value));
    if (pb.requires_grad) pb.AccumulateGrad(self.grad.cwiseProduct(pa.value));
  });
}

Tensor Scale(const Tensor& a, double s) {
  Matrix out = a.value() * s;
  return MakeResult(std::move(out), {a}, [s](TensorImpl& self) {
    Parent(self, 0).AccumulateGrad(self.grad * s);
  });
}

Tensor Transpose(const Tensor& a) {
  Matrix out = a.value().transpose();
  return MakeResult(std::move(out), {a}, [](TensorImpl& self) {
    Parent(self, 0).AccumulateGrad(self.grad.transpose());
  });
}

Tensor Relu(const Tensor& a) {
  Matrix out = a.value().cwiseMax(0.0);
  return MakeResult(std::move(out), {a}, [](TensorImpl& self) {
    TensorImpl& pa = Parent(self, 0);
    pa.AccumulateGrad((pa.value.array() > 0.0).select(self.grad, 0.0));
  });
}

Tensor Gelu(const Tensor& a) {
  const Matrix& x = a.value();
  Matrix out = x.unaryExpr([](double v) { return 0.5 * v * (1.0 + std::erf(v / std::numbers::sqrt2)); });
  return MakeResult(std::move(out), {a}, [](TensorImpl& self) {
    TensorImpl& pa = Parent(self, 0);
    const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
    Matrix d = pa.value.unaryExpr([inv_sqrt_2pi](double v) {
      return 0.5 * (1.0 + std::erf(v / std::numbers::sqrt2)) + v * inv_sqrt_2pi * std::exp(-0.5 * v * v);
    });
    pa.AccumulateGrad(self.grad.cwiseProduct(d));
  });
}

Tensor SoftmaxRows(const Tensor& a) {
  Matrix out = a.value();
  for (int r = 0; r < out.rows(); ++r) {
    out.row(r).array() -= out.row(r).maxCoeff();
    out.row(r) = out.row(r).array().exp();
    out.row(r) /= out.row(r).sum();
  }
  Matrix y = out;
  return MakeResult(std::move(out), {a}, [y = std::move(y)](TensorImpl& self) {
    const Eigen::VectorXd dot = self.grad.cwiseProduct(y).rowwise().sum();
    Matrix g = y.array() * (self.grad.array().colwise() - dot.array());
    Parent(self, 0).AccumulateGrad(g);
  });
}

Tensor LayerNorm(const Tensor& x, const Tensor& gamma, const Tensor& beta, double eps) {
  const Matrix& v = x.value();
  const int n = static_cast<int>(v.rows());
  const int c = static_cast<int>(v.cols());
  Matrix xhat(n, c);
  Eigen::VectorXd inv_std(n);
  for (int r = 0; r < n; ++r) {
    const double mu = v.row(r).mean();
    const double var = (v.row(r).array() - mu).square().mean();
    inv_std[r] = 1.0 / std::sqrt(var + eps);
    xhat.row(r) = (v.row(r).array() - mu) * inv_std[r];
  }
  Matrix out = (xhat.array().rowwise() * gamma.value().row(0).array()).rowwise() +
               beta.value().row(0).array();
  return MakeResult(std::move(out), {x, gamma, beta},
                    [xhat = std::move(xhat), inv_std = std::move(inv_std)](TensorImpl& self) {
    TensorImpl& px = Parent(self, 0);
    TensorImpl& pg = Parent(self, 1);
    TensorImpl& pb = Parent(self, 2);
    const Matrix& g = self.grad;
    if (pg.requires_grad) pg.AccumulateGrad(g.cwiseProduct(xhat).colwise().sum());
    if (pb.requires_grad) pb.AccumulateGrad(g.colwise().sum());
    if (px.requires_grad) {
      Matrix dxhat = g.array().rowwise() * pg.value.row(0).array();
      Matrix dx(dxhat.rows(), dxhat.cols());
      for (int r = 0; r < dxhat.rows(); ++r) {
        const double m1 = dxhat.row(r).mean();
        const double m2 = dxhat.row(r).cwiseProduct(xhat.row(r)).mean();
        dx.row(r) = inv_std[r] * (dxhat.row(r).array() - m1 - xhat.row(r).array() * m2);
      }
      px.AccumulateGrad(dx);
    }
  });
}

Tensor SliceCols(const Tensor& a, int start, int count) {
  Matrix out = a.value().middleCols(start, count);
  return MakeResult(std::move(out), {a}, [start, count](TensorImpl& self) {
    TensorImpl& pa = Parent(self, 0);
    Matrix g = Matrix::Zero(pa.value.rows(), pa.value.cols());
    g.middleCols(start, count) = self.grad;
    pa.AccumulateGrad(g);
  });
}

Tensor ConcatCols(const std::vector<Tensor>& parts) {
  int rows = parts.at(0).rows();
  int cols = 0;
  for (const Tensor& p : parts) {
    if (p.rows() != rows) throw Error("ConcatCols: row counts differ");
    cols += p.cols();
  }
  Matrix out(rows, cols);
  std::vector<int> offsets;
  int at = 0;
  for (const Tensor& p : parts) {
    offsets.push_back(at);
    out.middleCols(at, p.cols()) = p.value();
    at += p.cols();
  }
  return MakeResult(std::move(out), parts, [offsets](TensorImpl& self) {
    for (size_t i = 0; i < self.parents.size(); ++i) {
      TensorImpl& p = Parent(self, i);
      if (p.requires_grad) p.AccumulateGrad(self.grad.middleCols(offsets[i], p.value.cols()));
    }
  });
}

Tensor ConcatRows(const std::vector<Tensor>& parts) {
  int cols = parts.at(0).cols();
  int rows = 0;
  for (const Tensor& p : parts) {
    if (p.cols() != cols) throw Error("ConcatRows: column counts differ");
    rows += p.rows();
  }
  Matrix out(rows, cols);
  std::vector<int> offsets;
  int at = 0;
  for (const Tensor& p : parts) {
    offsets.push_back(at);
    out.middleRows(at, p.rows()) = p.value();
    at += p.rows();
  }
  return MakeResult(std::move(out), parts, [offsets](TensorImpl& self) {
    for (size_t i = 0; i < self.parents.size(); ++i) {
      TensorImpl& p = Parent(self, i);
      if (p.requires_grad) p.AccumulateGrad(self.grad.middleRows(offsets[i], p.value.rows()));
    }
  });
}

Tensor GatherRows(const Tensor& a, const std::vector<int>& rows) {
  Matrix out(rows.size(), a.cols());
  for (size_t i = 0; i < rows.size(); ++i) out.row(i) = a.value().row(rows[i]);
  return MakeResult(std::move(out), {a}, [rows](TensorImpl& self) {
    TensorImpl& pa = Parent(self, 0);
    Matrix g = Matrix::Zero(pa.value.rows(), pa.value.cols());
    for (size_t i = 0; i < rows.size(); ++i) g.row(rows[i]) += self.grad.row(i);
    pa.AccumulateGrad(g);
  });
}

Tensor GinAggregate(const Tensor& h, const Tensor& eps, const std::vector<int>& src,
                    const std::vector<int>& dst) {
  const double scale = 1.0 + eps.item();
  Matrix out = h.value() * scale;
  for (size_t e = 0; e < src.size(); ++e) out.row(dst[e]) += h.value().row(src[e]);
  return MakeResult(std::move(out), {h, eps}, [src, dst, scale](TensorImpl& self) {
    TensorImpl& ph = Parent(self, 0);
    TensorImpl& pe = Parent(self, 1);
    if (pe.requires_grad) {
      Matrix d(1, 1);
      d(0, 0) = self.grad.cwiseProduct(ph.value).sum();
      pe.AccumulateGrad(d);
    }
    if (ph.requires_grad) {
      Matrix g = self.grad * scale;
      for (size_t e = 0; e < src.size(); ++e) g.row(src[e]) += self.grad.row(dst[e]);
      ph.AccumulateGrad(g);
    }
  });
}

Tensor ReplaceRows(const Tensor& h, const std::vector<bool>& mask, const Tensor& token) {
  Matrix out = h.value();
  for (int r = 0; r < out.rows(); ++r) {
    if (mask[r]) out.row(r) = token.value().row(0);
  }
  return MakeResult(std::move(out), {h, token}, [mask](TensorImpl& self) {
    TensorImpl& ph = Parent(self, 0);
    TensorImpl& pt = Parent(self, 1);
    Matrix gh = self.grad;
    Matrix gt = Matrix::Zero(1, gh.cols());
    for (int r = 0; r < gh.rows(); ++r) {
      if (mask[r]) {
        gt += gh.row(r);
        gh.row(r).setZero();
      }
    }
    if (ph.requires_grad) ph.AccumulateGrad(gh);
    if (pt.requires_grad) pt.AccumulateGrad(gt);
  });
}

Tensor MeanRows(const Tensor& a) {
  Matrix out = a.value().colwise().mean();
  return MakeResult(std::move(out), {a}, [](TensorImpl& self) {
    TensorImpl& pa = Parent(self, 0);
    const double n = static_cast<double>(pa.value.rows());
    pa.AccumulateGrad(Matrix(Matrix::Ones(pa.value.rows(), 1) * (self.grad / n)));
  });
}

Tensor MaxRows(const Tensor& a) {
  const Matrix& v = a.value();
  Matrix out(1, v.cols());
  std::vector<int> arg(v.cols());
  for (int c = 0; c < v.cols(); ++c) {
    int best = 0;
    for (int r = 1; r < v.rows(); ++r) {
      if (v(r, c) > v(best, c)) best = r;
    }
    arg[c] = best;
    out(0, c) = v(best, c);
  }
  return MakeResult(std::move(out), {a}, [arg](TensorImpl& self) {
    TensorImpl& pa = Parent(self, 0);
    Matrix g = Matrix::Zero(pa.value.rows(), pa.value.cols());
    for (size_t c = 0; c < arg.size(); ++c) g(arg[c], c) = self.grad(0, c);
    pa.AccumulateGrad(g);
  });
}

Tensor Sum(const Tensor& a) {
  Matrix out(1, 1);
  out(0, 0) = a.value().sum();
  return MakeResult(std::move(out), {a}, [](TensorImpl& self) {
    TensorImpl& pa = Parent(self, 0);
    pa.AccumulateGrad(Matrix::Constant(pa.value.rows(), pa.value.cols(), self.grad(0, 0)));
  });
}

Tensor Mean(const Tensor& a) { return Scale(Sum(a), 1.0 / static_cast<double>(a.value().size())); }

Tensor ClassBalancedFocalLoss(const Tensor& logits, const std::vector<int>& labels,
                              const std::vector<double>& class_weights, double gamma) {
  const Matrix& z = logits.value();
  const int b = static_cast<int>(z.rows());
  if (static_cast<int>(labels.size()) != b) throw Error("focal loss: label count mismatch");
  if (b == 0) throw Error("focal loss: empty batch");
  Matrix probs(z.rows(), z.cols());
  Eigen::VectorXd coef(b);
  double total = 0.0;
  for (int i = 0; i < b; ++i) {
    const double m = z.row(i).maxCoeff();
    const double lse = m + std::log((z.row(i).array() - m).exp().sum());
    probs.row(i) = (z.row(i).array() - lse).exp();
    const double ce = lse - z(i, labels[i]);
    const double pt = std::exp(-ce);
    const double one_minus = std::max(0.0, 1.0 - pt);
    const double w = class_weights[labels[i]];
    const double focal = std::pow(one_minus, gamma);
    total += w * focal * ce;
    // d(w * (1-pt)^g * ce)/d ce, with d pt/d ce = -pt.
    double dfocal = 0.0;
    if (gamma != 0.0 && one_minus > 0.0) dfocal = gamma * std::pow(one_minus, gamma - 1.0) * pt;
    coef[i] = w * (focal + dfocal * ce);
  }
  Matrix out(1, 1);
  out(0, 0) = total / b;
  return MakeResult(std::move(out), {logits},
                    [probs = std::move(probs), coef = std::move(coef), labels, b](TensorImpl& self) {
    Matrix g = probs;
    for (int i = 0; i < b; ++i) {
      g(i, labels[i]) -= 1.0;
      g.row(i) *= coef[i] * self.grad(0, 0) / b;
    }
    Parent(self, 0).AccumulateGrad(g);
  });
}

Tensor BceWithLogits(const Tensor& logits, const std::vector<double>& targets) {
  const Matrix& x = logits.value();
  const int n = static_cast<int>(x.rows());
  if (x.cols() != 1 || static_cast<int>(targets.size()) != n || n == 0) {
    throw Error("BceWithLogits: expected a non-empty n x 1 column matching targets");
  }
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    const double v = x(i, 0);
    total += std::max(v, 0.0) - v * targets[i] + std::log1p(std::exp(-std::abs(v)));
  }
  Matrix out(1, 1);
  out(0, 0) = total / n;
  return MakeResult(std::move(out), {logits}, [targets, n](TensorImpl& self) {
    TensorImpl& p = Parent(self, 0);
    Matrix g(n, 1);
    for (int i = 0; i < n; ++i) {
      const double s = 1.0 / (1.0 + std::exp(-p.value(i, 0)));
      g(i, 0) = (s - targets[i]) * self.grad(0, 0) / n;
    }
    p.AccumulateGrad(g);
  });
}

double LogCosh(double d) {
  const double a = std::abs(d);
  return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
}

Tensor LogCoshLoss(const Tensor& pred, const Tensor& target) {
  RequireSameShape(pred, target, "LogCoshLoss");
  const Matrix d = pred.value() - target.value();
  const double n = static_cast<double>(d.size());
  Matrix out(1, 1);
  out(0, 0) = d.unaryExpr([](double v) { return LogCosh(v); }).sum() / n;
  return MakeResult(std::move(out), {pred, target}, [d, n](TensorImpl& self) {
    Matrix g = d.array().tanh() * (self.grad(0, 0) / n);
    if (Parent(self, 0).requires_grad) Parent(self, 0).AccumulateGrad(g);
    if (Parent(self, 1).requires_grad) Parent(self, 1).AccumulateGrad(-g);
  });
}

Tensor KdLoss(const Tensor& a, const Tensor& b, double tau) {
  RequireSameShape(a, b, "KdLoss");
  const Matrix& x = a.value();
  const Matrix& y = b.value();
  const int rows = static_cast<int>(x.rows());
  const double h = static_cast<double>(x.cols());
  Matrix ga(x.rows(), x.cols());
  Matrix gb(x.rows(), x.cols());
  double total = 0.0;
  for (int r = 0; r < rows; ++r) {
    const double na = x.row(r).norm();
    const double nb = y.row(r).norm();
    const Eigen::RowVectorXd diff = x.row(r) - y.row(r);
    double cos_loss = 1.0;
    ga.row(r) = (1.0 - tau) * 2.0 * diff / h;
    gb.row(r) = -ga.row(r);
    if (na >= 1e-12 && nb >= 1e-12) {
      const double cos = x.row(r).dot(y.row(r)) / (na * nb);
      cos_loss = 1.0 - cos;
      ga.row(r) -= tau * (y.row(r) / (na * nb) - cos * x.row(r) / (na * na));
      gb.row(r) -= tau * (x.row(r) / (na * nb) - cos * y.row(r) / (nb * nb));
    }
    total += tau * cos_loss + (1.0 - tau) * diff.squaredNorm() / h;
  }
  Matrix out(1, 1);
  out(0, 0) = total / rows;
  return MakeResult(std::move(out), {a, b},
                    [ga = std::move(ga), gb = std::move(gb), rows](TensorImpl& self) {
    const double s = self.grad(0, 0) / rows;
    if (Parent(self, 0).requires_grad) Parent(self, 0).AccumulateGrad(ga * s);
    if (Parent(self, 1).requires_grad) Parent(self, 1).AccumulateGrad(gb * s);
  });
}

}  // namespace structrtl::nn
