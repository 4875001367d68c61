#include "structrtl/nn/encoder.h"

#include "structrtl/nn/ops.h"
#include "structrtl/util/error.h"

namespace structrtl::nn {

nlohmann::json ToJson(const EncoderConfig& c) {
  return {{"input_dim", c.input_dim},
          {"hidden", c.hidden},
          {"gin_layers", c.gin_layers},
          {"transformer_layers", c.transformer_layers},
          {"heads", c.heads},
          {"ffn_multiplier", c.ffn_multiplier},
          {"pe_dim", c.pe_dim},
          {"num_classes", c.num_classes}};
}

EncoderConfig EncoderConfigFromJson(const nlohmann::json& j) {
  EncoderConfig c;
  c.input_dim = j.value("input_dim", c.input_dim);
  c.hidden = j.value("hidden", c.hidden);
  c.gin_layers = j.value("gin_layers", c.gin_layers);
  c.transformer_layers = j.value("transformer_layers", c.transformer_layers);
  c.heads = j.value("heads", c.heads);
  c.ffn_multiplier = j.value("ffn_multiplier", c.ffn_multiplier);
  c.pe_dim = j.value("pe_dim", c.pe_dim);
  c.num_classes = j.value("num_classes", c.num_classes);
  if (c.hidden < 1 || c.gin_layers < 1 || c.heads < 1 || c.hidden % c.heads != 0) {
    throw SchemaError("/encoder", "hidden must be positive and divisible by heads");
  }
  return c;
}

EncoderModel::EncoderModel(const EncoderConfig& config, Rng& rng) : config_(config) {
  const int h = config.hidden;
  for (int l = 0; l < config.gin_layers; ++l) gin.emplace_back(l == 0 ? config.input_dim : h, h, rng);
  pe_projection = Linear(config.pe_dim, h, rng);
  for (int l = 0; l < config.transformer_layers; ++l) {
    transformer.emplace_back(h, config.heads, config.ffn_multiplier * h, rng);
  }
  final_norm = LayerNormLayer(h);
  Matrix token(1, h);
  for (int i = 0; i < h; ++i) token(0, i) = 0.02 * rng.Normal();
  mask_token = Parameter(std::move(token));
  node_head = Linear(h, config.num_classes, rng);
  edge_head = Mlp({2 * h, h, h, 1}, Activation::kRelu, rng);
  regression_head = Mlp({2 * h, h, h, 1}, Activation::kRelu, rng);
}

Tensor EncoderModel::EncodeGin(const Tensor& x, const EdgeList& edges) const {
  Tensor h = x;
  for (size_t l = 0; l < gin.size(); ++l) {
    if (l > 0) h = Relu(h);
    h = gin[l].Forward(h, edges);
  }
  return h;
}

Tensor EncoderModel::EncodeTransformer(const Tensor& h, const Tensor& pe) const {
  Tensor x = Add(h, pe_projection.Forward(pe));
  for (const TransformerLayer& layer : transformer) x = layer.Forward(x);
  return final_norm.Forward(x);
}

Tensor EncoderModel::Encode(const GraphInput& g, const Matrix& pe) const {
  return EncodeTransformer(EncodeGin(Constant(g.features), g.edges), Constant(pe));
}

Tensor EncoderModel::NodeTypeLogits(const Tensor& h) const { return node_head.Forward(h); }

Tensor EncoderModel::EdgeLogits(const Tensor& h, const std::vector<int>& src,
                                const std::vector<int>& dst) const {
  return edge_head.Forward(ConcatCols({GatherRows(h, src), GatherRows(h, dst)}));
}

Tensor EncoderModel::Regress(const Tensor& h, Tensor* penultimate) const {
  return regression_head.Forward(MeanMaxPool(h), penultimate);
}

ParameterList EncoderModel::EncoderParameters() const {
  ParameterList out;
  for (size_t l = 0; l < gin.size(); ++l) gin[l].Collect("gin." + std::to_string(l) + ".", out);
  pe_projection.Collect("pe_projection.", out);
  for (size_t l = 0; l < transformer.size(); ++l) {
    transformer[l].Collect("transformer." + std::to_string(l) + ".", out);
  }
  final_norm.Collect("final_norm.", out);
  out.push_back({"mask_token", mask_token});
  return out;
}

ParameterList EncoderModel::RegressionHeadParameters() const {
  ParameterList out;
  regression_head.Collect("regression_head.", out);
  return out;
}

ParameterList EncoderModel::Parameters() const {
  ParameterList out = EncoderParameters();
  node_head.Collect("node_head.", out);
  edge_head.Collect("edge_head.", out);
  regression_head.Collect("regression_head.", out);
  return out;
}

}  // namespace structrtl::nn
