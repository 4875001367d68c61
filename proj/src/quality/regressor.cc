#include "structrtl/quality/regressor.h"

#include <numeric>

#include "structrtl/nn/ops.h"
#include "structrtl/spectral/laplacian.h"

namespace structrtl::quality {

std::string TaskName(Task task) { return task == Task::kArea ? "area" : "delay"; }

Task ParseTask(std::string_view name) {
  if (name == "area") return Task::kArea;
  if (name == "delay") return Task::kDelay;
  throw Error("unknown task '" + std::string(name) + "' (expected area or delay)");
}

nlohmann::json ToJson(const RegressorConfig& c) {
  return {{"epochs", c.epochs},
          {"batch_size", c.batch_size},
          {"lr", c.lr},
          {"weight_decay", c.weight_decay},
          {"encoder_lr", c.encoder_lr},
          {"encoder_weight_decay", c.encoder_weight_decay},
          {"freeze_encoder", c.freeze_encoder},
          {"sign_flip", c.sign_flip}};
}

RegressorConfig RegressorConfigFromJson(const nlohmann::json& j) {
  RegressorConfig c;
  c.epochs = j.value("epochs", c.epochs);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.lr = j.value("lr", c.lr);
  c.weight_decay = j.value("weight_decay", c.weight_decay);
  c.encoder_lr = j.value("encoder_lr", c.encoder_lr);
  c.encoder_weight_decay = j.value("encoder_weight_decay", c.encoder_weight_decay);
  c.freeze_encoder = j.value("freeze_encoder", c.freeze_encoder);
  c.sign_flip = j.value("sign_flip", c.sign_flip);
  if (c.batch_size < 1) throw SchemaError("/batch_size", "must be positive");
  if (c.epochs < 0) throw SchemaError("/epochs", "must be >= 0");
  return c;
}

nn::Tensor StudentRegressor::Forward(const nn::GraphInput& g, bool training, Rng& rng,
                                     nn::Tensor* penultimate) const {
  if (training && sign_flip_) {
    Matrix pe = g.pe;
    spectral::SignFlip(pe, rng);
    return model_.Regress(model_.Encode(g, pe), penultimate);
  }
  return model_.Regress(model_.Encode(g, g.pe), penultimate);
}

std::vector<nn::ParamGroup> StudentParamGroups(const nn::EncoderModel& model, const RegressorConfig& config) {
  std::vector<nn::ParamGroup> groups;
  groups.push_back({nn::Tensors(model.RegressionHeadParameters()), config.lr, config.weight_decay});
  if (!config.freeze_encoder) {
    nn::ParamGroup encoder{{}, config.encoder_lr, config.encoder_weight_decay};
    for (const nn::NamedParameter& p : model.EncoderParameters()) {
      if (p.name != "mask_token") encoder.params.push_back(p.tensor);
    }
    groups.push_back(std::move(encoder));
  }
  return groups;
}

void InitOutputBias(const nn::Mlp& head, double value) {
  nn::Tensor bias = head.layers.back().bias;
  bias.mutable_value().setConstant(value);
}

std::vector<EpochLoss> Fit(size_t num_samples, int epochs, int batch_size, nn::Adam& optimizer,
                           Rng& rng, const SampleLossFn& sample_loss,
                           const std::function<void(const EpochLoss&)>& on_epoch) {
  std::vector<EpochLoss> log;
  std::vector<size_t> order(num_samples);
  for (int epoch = 1; epoch <= epochs; ++epoch) {
    std::iota(order.begin(), order.end(), 0);
    rng.Shuffle(order);
    EpochLoss stats;
    stats.epoch = epoch;
    for (size_t start = 0; start < num_samples; start += batch_size) {
      const size_t end = std::min(num_samples, start + static_cast<size_t>(batch_size));
      const double inv_batch = 1.0 / static_cast<double>(end - start);
      optimizer.ZeroGrad();
      for (size_t b = start; b < end; ++b) {
        SampleLoss s = sample_loss(order[b], rng);
        stats.loss += s.loss.item();
        stats.l_qe += s.l_qe;
        stats.l_kd += s.l_kd;
        nn::Scale(s.loss, inv_batch).Backward();
      }
      optimizer.Step();
    }
    const double n = static_cast<double>(std::max<size_t>(num_samples, 1));
    stats.loss /= n;
    stats.l_qe /= n;
    stats.l_kd /= n;
    log.push_back(stats);
    if (on_epoch) on_epoch(stats);
  }
  return log;
}

double PredictQuality(const GraphRegressor& model, const nn::GraphInput& g) {
  nn::NoGradGuard no_grad;
  Rng unused(0);
  return model.Forward(g, false, unused).item();
}

std::vector<double> PredictAll(const GraphRegressor& model, const std::vector<nn::GraphInput>& graphs) {
  std::vector<double> out;
  out.reserve(graphs.size());
  for (const nn::GraphInput& g : graphs) out.push_back(PredictQuality(model, g));
  return out;
}

double Mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

std::vector<EpochLoss> TrainRegressor(nn::EncoderModel& model, const std::vector<nn::GraphInput>& graphs,
                                      const std::vector<double>& targets, const RegressorConfig& config,
                                      uint64_t seed, const std::function<void(const EpochLoss&)>& on_epoch) {
  if (graphs.size() != targets.size()) throw Error("graph and target counts differ");
  InitOutputBias(model.regression_head, Mean(targets));
  nn::Adam optimizer(StudentParamGroups(model, config), nn::AdamOptions{});
  const StudentRegressor student(model, config.sign_flip);
  Rng rng(seed);
  return Fit(graphs.size(), config.epochs, config.batch_size, optimizer, rng,
             [&](size_t i, Rng& r) {
               const nn::Tensor pred = student.Forward(graphs[i], true, r);
               SampleLoss s;
               s.loss = nn::LogCoshLoss(pred, nn::Constant(Matrix::Constant(1, 1, targets[i])));
               s.l_qe = s.loss.item();
               return s;
             },
             on_epoch);
}

}  // namespace structrtl::quality
