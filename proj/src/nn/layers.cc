#include "structrtl/nn/layers.h"

#include <cmath>

#include "structrtl/nn/ops.h"
#include "structrtl/util/error.h"

namespace structrtl::nn {

std::vector<Tensor> Tensors(const ParameterList& params) {
  std::vector<Tensor> out;
  out.reserve(params.size());
  for (const NamedParameter& p : params) out.push_back(p.tensor);
  return out;
}

namespace {

Matrix UniformMatrix(int rows, int cols, double bound, Rng& rng) {
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = rng.Uniform(-bound, bound);
  return m;
}

}  // namespace

Linear::Linear(int in, int out, Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(in));
  weight = Parameter(UniformMatrix(in, out, bound, rng));
  bias = Parameter(UniformMatrix(1, out, bound, rng));
}

Tensor Linear::Forward(const Tensor& x) const { return Add(MatMul(x, weight), bias); }

void Linear::Collect(const std::string& prefix, ParameterList& out) const {
  out.push_back({prefix + "weight", weight});
  out.push_back({prefix + "bias", bias});
}

Tensor Activate(const Tensor& x, Activation act) {
  return act == Activation::kRelu ? Relu(x) : Gelu(x);
}

Mlp::Mlp(const std::vector<int>& dims, Activation act, Rng& rng) : activation(act) {
  for (size_t i = 0; i + 1 < dims.size(); ++i) layers.emplace_back(dims[i], dims[i + 1], rng);
}

Tensor Mlp::Forward(const Tensor& x, Tensor* last_input) const {
  Tensor h = x;
  for (size_t i = 0; i < layers.size(); ++i) {
    if (i + 1 == layers.size() && last_input) *last_input = h;
    h = layers[i].Forward(h);
    if (i + 1 < layers.size()) h = Activate(h, activation);
  }
  return h;
}

void Mlp::Collect(const std::string& prefix, ParameterList& out) const {
  for (size_t i = 0; i < layers.size(); ++i) layers[i].Collect(prefix + std::to_string(i) + ".", out);
}

GinLayer::GinLayer(int in, int out, Rng& rng)
    : eps(Parameter(Matrix::Zero(1, 1))), mlp({in, out, out}, Activation::kRelu, rng) {}

Tensor GinLayer::Forward(const Tensor& h, const EdgeList& edges) const {
  return mlp.Forward(GinAggregate(h, eps, edges.src, edges.dst));
}

void GinLayer::Collect(const std::string& prefix, ParameterList& out) const {
  out.push_back({prefix + "eps", eps});
  mlp.Collect(prefix + "mlp.", out);
}

LayerNormLayer::LayerNormLayer(int dim)
    : gamma(Parameter(Matrix::Ones(1, dim))), beta(Parameter(Matrix::Zero(1, dim))) {}

Tensor LayerNormLayer::Forward(const Tensor& x) const { return LayerNorm(x, gamma, beta); }

void LayerNormLayer::Collect(const std::string& prefix, ParameterList& out) const {
  out.push_back({prefix + "gamma", gamma});
  out.push_back({prefix + "beta", beta});
}

MultiHeadAttention::MultiHeadAttention(int dim, int heads_, Rng& rng)
    : heads(heads_),
      query(dim, dim, rng),
      key(dim, dim, rng),
      value(dim, dim, rng),
      output(dim, dim, rng) {
  if (dim % heads != 0) throw Error("hidden dimension must be divisible by the head count");
}

Tensor MultiHeadAttention::Forward(const Tensor& x) const {
  const int head_dim = x.cols() / heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(head_dim));
  const Tensor q = query.Forward(x);
  const Tensor k = key.Forward(x);
  const Tensor v = value.Forward(x);
  std::vector<Tensor> outs;
  for (int h = 0; h < heads; ++h) {
    const Tensor qh = SliceCols(q, h * head_dim, head_dim);
    const Tensor kh = SliceCols(k, h * head_dim, head_dim);
    const Tensor vh = SliceCols(v, h * head_dim, head_dim);
    const Tensor attn = SoftmaxRows(Scale(MatMul(qh, Transpose(kh)), scale));
    outs.push_back(MatMul(attn, vh));
  }
  return output.Forward(heads == 1 ? outs[0] : ConcatCols(outs));
}

void MultiHeadAttention::Collect(const std::string& prefix, ParameterList& out) const {
  query.Collect(prefix + "query.", out);
  key.Collect(prefix + "key.", out);
  value.Collect(prefix + "value.", out);
  output.Collect(prefix + "output.", out);
}

TransformerLayer::TransformerLayer(int dim, int heads, int ffn_dim, Rng& rng)
    : norm1(dim), norm2(dim), attention(dim, heads, rng), ffn({dim, ffn_dim, dim}, Activation::kGelu, rng) {}

Tensor TransformerLayer::Forward(const Tensor& x) const {
  Tensor h = Add(x, attention.Forward(norm1.Forward(x)));
  return Add(h, ffn.Forward(norm2.Forward(h)));
}

void TransformerLayer::Collect(const std::string& prefix, ParameterList& out) const {
  norm1.Collect(prefix + "norm1.", out);
  attention.Collect(prefix + "attention.", out);
  norm2.Collect(prefix + "norm2.", out);
  ffn.Collect(prefix + "ffn.", out);
}

Tensor MeanMaxPool(const Tensor& h) { return ConcatCols({MeanRows(h), MaxRows(h)}); }

}  // namespace structrtl::nn
