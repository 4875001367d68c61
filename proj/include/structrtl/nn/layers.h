#ifndef STRUCTRTL_NN_LAYERS_H_
#define STRUCTRTL_NN_LAYERS_H_

#include <string>
#include <vector>

#include "structrtl/nn/tensor.h"
#include "structrtl/util/rng.h"

namespace structrtl::nn {

struct NamedParameter {
  std::string name;
  Tensor tensor;
};
using ParameterList = std::vector<NamedParameter>;

std::vector<Tensor> Tensors(const ParameterList& params);

// y = x W + b with W: in x out, b: 1 x out, both U(-1/sqrt(in), 1/sqrt(in)).
class Linear {
 public:
  Linear() = default;
  Linear(int in, int out, Rng& rng);

  Tensor Forward(const Tensor& x) const;
  void Collect(const std::string& prefix, ParameterList& out) const;

  Tensor weight;
  Tensor bias;
};

enum class Activation { kRelu, kGelu };

Tensor Activate(const Tensor& x, Activation act);

// Linear layers over `dims` with `act` between consecutive layers and no
// activation after the last.
class Mlp {
 public:
  Mlp() = default;
  Mlp(const std::vector<int>& dims, Activation act, Rng& rng);

  // When `last_input` is non-null it receives the activation entering the
  // final linear layer.
  Tensor Forward(const Tensor& x, Tensor* last_input = nullptr) const;
  void Collect(const std::string& prefix, ParameterList& out) const;

  std::vector<Linear> layers;
  Activation activation = Activation::kRelu;
};

// Directed edge list in the form consumed by GinLayer.
struct EdgeList {
  std::vector<int> src;
  std::vector<int> dst;
};

// h'_i = MLP((1 + eps) h_i + sum_{(j, i) in E} h_j), eps learnable (init 0),
// MLP = Linear -> ReLU -> Linear.
class GinLayer {
 public:
  GinLayer() = default;
  GinLayer(int in, int out, Rng& rng);

  Tensor Forward(const Tensor& h, const EdgeList& edges) const;
  void Collect(const std::string& prefix, ParameterList& out) const;

  Tensor eps;
  Mlp mlp;
};

class LayerNormLayer {
 public:
  LayerNormLayer() = default;
  explicit LayerNormLayer(int dim);

  Tensor Forward(const Tensor& x) const;
  void Collect(const std::string& prefix, ParameterList& out) const;

  Tensor gamma;
  Tensor beta;
};

// Full (unmasked) multi-head scaled dot-product self-attention.
class MultiHeadAttention {
 public:
  MultiHeadAttention() = default;
  MultiHeadAttention(int dim, int heads, Rng& rng);

  Tensor Forward(const Tensor& x) const;
  void Collect(const std::string& prefix, ParameterList& out) const;

  int heads = 1;
  Linear query, key, value, output;
};

// Pre-norm encoder layer: x += MHA(LN(x)); x += FFN(LN(x)), FFN with GELU.
class TransformerLayer {
 public:
  TransformerLayer() = default;
  TransformerLayer(int dim, int heads, int ffn_dim, Rng& rng);

  Tensor Forward(const Tensor& x) const;
  void Collect(const std::string& prefix, ParameterList& out) const;

  LayerNormLayer norm1, norm2;
  MultiHeadAttention attention;
  Mlp ffn;
};

// concat(column means, column maxima): 1 x 2C.
Tensor MeanMaxPool(const Tensor& h);

}  // namespace structrtl::nn

#endif  // STRUCTRTL_NN_LAYERS_H_
