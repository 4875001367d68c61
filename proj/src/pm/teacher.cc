#include "structrtl/pm/teacher.h"

#include "structrtl/nn/ops.h"

namespace structrtl::pm {

nlohmann::json ToJson(const TeacherConfig& c) {
  return {{"input_dim", c.input_dim}, {"hidden", c.hidden}, {"layers", c.layers}};
}

TeacherConfig TeacherConfigFromJson(const nlohmann::json& j) {
  TeacherConfig c;
  c.input_dim = j.value("input_dim", c.input_dim);
  c.hidden = j.value("hidden", c.hidden);
  c.layers = j.value("layers", c.layers);
  if (c.hidden < 1 || c.layers < 0 || c.input_dim < 1) throw SchemaError("/teacher", "invalid dimensions");
  return c;
}

TeacherModel::TeacherModel(const TeacherConfig& config, Rng& rng)
    : input(config.input_dim, config.hidden, rng), config_(config) {
  for (int l = 0; l < config.layers; ++l) gin.emplace_back(config.hidden, config.hidden, rng);
  head = nn::Mlp({2 * config.hidden, config.hidden, config.hidden, 1}, nn::Activation::kRelu, rng);
}

nn::Tensor TeacherModel::ResidualStack(const nn::Tensor& h, const nn::EdgeList& edges) const {
  nn::Tensor out = h;
  for (const nn::GinLayer& layer : gin) out = nn::Add(out, layer.Forward(out, edges));
  return out;
}

nn::Tensor TeacherModel::Encode(const nn::GraphInput& g) const {
  return ResidualStack(input.Forward(nn::Constant(g.features)), g.edges);
}

nn::Tensor TeacherModel::Forward(const nn::GraphInput& g, bool training, Rng& rng,
                                 nn::Tensor* penultimate) const {
  return head.Forward(nn::MeanMaxPool(Encode(g)), penultimate);
}

void TeacherModel::ZeroResidualBranches() {
  for (nn::GinLayer& layer : gin) {
    nn::Linear& last = layer.mlp.layers.back();
    last.weight.mutable_value().setZero();
    last.bias.mutable_value().setZero();
  }
}

nn::ParameterList TeacherModel::Parameters() const {
  nn::ParameterList out;
  input.Collect("input.", out);
  for (size_t l = 0; l < gin.size(); ++l) gin[l].Collect("gin." + std::to_string(l) + ".", out);
  head.Collect("head.", out);
  return out;
}

std::vector<quality::EpochLoss> TrainTeacher(
    TeacherModel& model, const std::vector<nn::GraphInput>& netlists, const std::vector<double>& targets,
    const quality::RegressorConfig& config, uint64_t seed,
    const std::function<void(const quality::EpochLoss&)>& on_epoch) {
  if (netlists.size() != targets.size()) throw Error("netlist and target counts differ");
  quality::InitOutputBias(model.head, quality::Mean(targets));
  nn::Adam optimizer({{nn::Tensors(model.Parameters()), config.lr, config.weight_decay}}, nn::AdamOptions{});
  Rng rng(seed);
  return quality::Fit(netlists.size(), config.epochs, config.batch_size, optimizer, rng,
                      [&](size_t i, Rng& r) {
                        const nn::Tensor pred = model.Forward(netlists[i], true, r);
                        quality::SampleLoss s;
                        s.loss = nn::LogCoshLoss(pred, nn::Constant(Matrix::Constant(1, 1, targets[i])));
                        s.l_qe = s.loss.item();
                        return s;
                      },
                      on_epoch);
}

}  // namespace structrtl::pm
