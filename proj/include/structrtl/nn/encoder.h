#ifndef STRUCTRTL_NN_ENCODER_H_
#define STRUCTRTL_NN_ENCODER_H_

#include <vector>

#include "json.hpp"
#include "structrtl/nn/layers.h"

namespace structrtl::nn {

// Everything the encoder needs about one graph, precomputed.
struct GraphInput {
  Matrix features;              // N x input_dim
  EdgeList edges;               // directed, producer -> consumer
  Matrix pe;                    // N x pe_dim, unflipped
  std::vector<int> node_types;  // class labels for masked node modeling
  int num_nodes() const { return static_cast<int>(features.rows()); }
};

struct EncoderConfig {
  int input_dim = 33;
  int hidden = 128;
  int gin_layers = 8;
  int transformer_layers = 8;
  int heads = 4;
  int ffn_multiplier = 4;
  int pe_dim = 16;
  int num_classes = 32;
};

nlohmann::json ToJson(const EncoderConfig& c);
EncoderConfig EncoderConfigFromJson(const nlohmann::json& j);

// GIN stack -> (+ Linear(pe)) -> pre-norm Transformer stack -> LayerNorm,
// plus the learnable [MASK] row and the three task heads.
class EncoderModel {
 public:
  EncoderModel(const EncoderConfig& config, Rng& rng);

  const EncoderConfig& config() const { return config_; }

  // Local message passing on raw node features; ReLU between layers.
  Tensor EncodeGin(const Tensor& x, const EdgeList& edges) const;
  // Global attention over all nodes of one graph.
  Tensor EncodeTransformer(const Tensor& h, const Tensor& pe) const;
  // Both stages, no masking.
  Tensor Encode(const GraphInput& g, const Matrix& pe) const;

  Tensor NodeTypeLogits(const Tensor& h) const;
  Tensor EdgeLogits(const Tensor& h, const std::vector<int>& src, const std::vector<int>& dst) const;
  // Mean+max pooling, then the regression MLP. `penultimate` receives the
  // activation entering its final linear layer.
  Tensor Regress(const Tensor& h, Tensor* penultimate = nullptr) const;

  ParameterList Parameters() const;
  ParameterList EncoderParameters() const;
  ParameterList RegressionHeadParameters() const;

  std::vector<GinLayer> gin;
  Linear pe_projection;
  std::vector<TransformerLayer> transformer;
  LayerNormLayer final_norm;
  Tensor mask_token;
  Linear node_head;
  Mlp edge_head;
  Mlp regression_head;

 private:
  EncoderConfig config_;
};

}  // namespace structrtl::nn

#endif  // STRUCTRTL_NN_ENCODER_H_
