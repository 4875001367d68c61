#include "structrtl/ssl/pretrain.h"

#include <filesystem>
#include <fstream>
#include <numeric>

#include <spdlog/spdlog.h>

#include "structrtl/nn/checkpoint.h"
#include "structrtl/nn/ops.h"
#include "structrtl/spectral/laplacian.h"

namespace structrtl::ssl {

nlohmann::json ToJson(const PretrainConfig& c) {
  return {{"epochs", c.epochs},
          {"batch_size", c.batch_size},
          {"lr", c.lr},
          {"weight_decay", c.weight_decay},
          {"alpha", c.alpha},
          {"mask_ratio", c.mask.ratio},
          {"min_per_class", c.mask.min_per_class},
          {"edge_ratio", c.edge_ratio},
          {"sign_flip", c.sign_flip},
          {"eval_every", c.eval_every},
          {"checkpoint_every", c.checkpoint_every}};
}

PretrainConfig PretrainConfigFromJson(const nlohmann::json& j) {
  PretrainConfig c;
  c.epochs = j.value("epochs", c.epochs);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.lr = j.value("lr", c.lr);
  c.weight_decay = j.value("weight_decay", c.weight_decay);
  c.alpha = j.value("alpha", c.alpha);
  c.mask.ratio = j.value("mask_ratio", c.mask.ratio);
  c.mask.min_per_class = j.value("min_per_class", c.mask.min_per_class);
  c.edge_ratio = j.value("edge_ratio", c.edge_ratio);
  c.sign_flip = j.value("sign_flip", c.sign_flip);
  c.eval_every = j.value("eval_every", c.eval_every);
  c.checkpoint_every = j.value("checkpoint_every", c.checkpoint_every);
  if (!(c.mask.ratio > 0 && c.mask.ratio < 1)) throw SchemaError("/pretrain/mask_ratio", "must be in (0, 1)");
  if (c.mask.min_per_class < 0) throw SchemaError("/pretrain/min_per_class", "must be >= 0");
  if (c.batch_size < 1) throw SchemaError("/pretrain/batch_size", "must be positive");
  if (c.alpha < 0 || c.alpha > 1) throw SchemaError("/pretrain/alpha", "must be in [0, 1]");
  return c;
}

nn::ParameterList PretrainParameters(const nn::EncoderModel& model) {
  nn::ParameterList params = model.EncoderParameters();
  model.node_head.Collect("node_head.", params);
  model.edge_head.Collect("edge_head.", params);
  return params;
}

std::vector<double> NodeTypeCounts(const std::vector<nn::GraphInput>& graphs, int num_classes) {
  std::vector<double> counts(num_classes, 0.0);
  for (const nn::GraphInput& g : graphs) {
    for (int t : g.node_types) counts[t] += 1.0;
  }
  return counts;
}

TaskAccuracy EvaluatePretrainTasks(const nn::EncoderModel& model,
                                   const std::vector<nn::GraphInput>& graphs,
                                   const MaskConfig& mask, uint64_t seed, int mask_draws) {
  nn::NoGradGuard no_grad;
  Rng rng(seed);
  const std::vector<double> unit(model.config().num_classes, 1.0);
  int mnm_correct = 0, mnm_total = 0, ep_correct = 0, ep_total = 0;
  for (const nn::GraphInput& g : graphs) {
    const nn::Tensor h_gin = model.EncodeGin(nn::Constant(g.features), g.edges);
    for (int d = 0; d < mask_draws; ++d) {
      try {
        TaskResult r = MaskedNodeModelingStep(model, g, h_gin, g.pe, mask, unit, rng);
        mnm_correct += r.correct;
        mnm_total += r.total;
      } catch (const DegenerateBatch&) {
      }
    }
    if (!g.edges.src.empty()) {
      const nn::Tensor h = model.EncodeTransformer(h_gin, nn::Constant(g.pe));
      TaskResult r = EdgePrediction(model, h, AllEdgesWithNegatives(g.edges, g.num_nodes(), rng));
      ep_correct += r.correct;
      ep_total += r.total;
    }
  }
  TaskAccuracy acc;
  acc.mnm = mnm_total ? static_cast<double>(mnm_correct) / mnm_total : 0.0;
  acc.ep = ep_total ? static_cast<double>(ep_correct) / ep_total : 0.0;
  return acc;
}

Pretrainer::Pretrainer(nn::EncoderModel& model, const PretrainConfig& config,
                       const std::vector<nn::GraphInput>& train,
                       const std::vector<nn::GraphInput>& val, uint64_t seed)
    : model_(model), config_(config), train_(train), val_(val), seed_(seed), rng_(seed) {
  class_weights_ = PresentClassWeights(NodeTypeCounts(train_, model.config().num_classes));
  nn::AdamOptions opts;
  opts.mode = nn::WeightDecayMode::kDecoupled;
  optimizer_ = std::make_unique<nn::Adam>(
      std::vector<nn::ParamGroup>{{nn::Tensors(PretrainParameters(model_)), config.lr, config.weight_decay}},
      opts);
}

PretrainEpoch Pretrainer::RunEpoch() {
  std::vector<size_t> order(train_.size());
  std::iota(order.begin(), order.end(), 0);
  rng_.Shuffle(order);

  double sum_mnm = 0.0, sum_ep = 0.0;
  int graphs_mnm = 0, graphs_ep = 0;
  int mnm_correct = 0, mnm_total = 0, ep_correct = 0, ep_total = 0;
  for (size_t start = 0; start < order.size(); start += config_.batch_size) {
    const size_t end = std::min(order.size(), start + config_.batch_size);
    const double inv_batch = 1.0 / static_cast<double>(end - start);
    optimizer_->ZeroGrad();
    for (size_t b = start; b < end; ++b) {
      const nn::GraphInput& g = train_[order[b]];
      Matrix pe = g.pe;
      if (config_.sign_flip) spectral::SignFlip(pe, rng_);
      const nn::Tensor h_gin = model_.EncodeGin(nn::Constant(g.features), g.edges);

      TaskResult mnm = MaskedNodeModelingStep(model_, g, h_gin, pe, config_.mask, class_weights_, rng_);
      nn::Tensor loss = nn::Scale(mnm.loss, config_.alpha);
      sum_mnm += mnm.loss.item();
      ++graphs_mnm;
      mnm_correct += mnm.correct;
      mnm_total += mnm.total;

      if (!g.edges.src.empty()) {
        const nn::Tensor h = model_.EncodeTransformer(h_gin, nn::Constant(pe));
        TaskResult ep = EdgePrediction(model_, h, SampleEdges(g.edges, g.num_nodes(), config_.edge_ratio, rng_));
        loss = nn::Add(loss, nn::Scale(ep.loss, 1.0 - config_.alpha));
        sum_ep += ep.loss.item();
        ++graphs_ep;
        ep_correct += ep.correct;
        ep_total += ep.total;
      }
      nn::Scale(loss, inv_batch).Backward();
    }
    optimizer_->Step();
  }
  ++epoch_;

  PretrainEpoch log;
  log.epoch = epoch_;
  log.l_mnm = graphs_mnm ? sum_mnm / graphs_mnm : 0.0;
  log.l_ep = graphs_ep ? sum_ep / graphs_ep : 0.0;
  log.acc_mnm = mnm_total ? static_cast<double>(mnm_correct) / mnm_total : 0.0;
  log.acc_ep = ep_total ? static_cast<double>(ep_correct) / ep_total : 0.0;
  if (!val_.empty() && config_.eval_every > 0 &&
      (epoch_ % config_.eval_every == 0 || epoch_ == config_.epochs)) {
    const TaskAccuracy acc = EvaluatePretrainTasks(model_, val_, config_.mask, seed_ ^ 0x5EEDULL);
    log.has_validation = true;
    log.val_acc_mnm = acc.mnm;
    log.val_acc_ep = acc.ep;
  }
  return log;
}

void Pretrainer::SaveCheckpoint(const std::string& path) const {
  nn::Checkpoint ckpt;
  ckpt.kind = "encoder";
  ckpt.meta["encoder"] = nn::ToJson(model_.config());
  ckpt.meta["pretrain"] = ToJson(config_);
  ckpt.meta["epoch"] = epoch_;
  ckpt.meta["seed"] = seed_;
  ckpt.meta["rng"] = rng_.SaveState();
  nn::StoreParameters(model_.Parameters(), ckpt);
  optimizer_->SaveState(ckpt);
  nn::SaveCheckpoint(ckpt, path);
}

void Pretrainer::ResumeFrom(const std::string& path) {
  const nn::Checkpoint ckpt = nn::LoadCheckpoint(path);
  if (ckpt.kind != "encoder") throw SchemaError("/kind", "expected an encoder checkpoint");
  nn::RestoreParameters(ckpt, model_.Parameters());
  optimizer_->LoadState(ckpt);
  rng_.LoadState(ckpt.meta.at("rng").get<std::string>());
  epoch_ = ckpt.meta.at("epoch").get<int>();
}

std::vector<PretrainEpoch> Pretrainer::Run(const std::string& out_dir) {
  std::ofstream csv;
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    const auto log_path = std::filesystem::path(out_dir) / "pretrain_log.csv";
    const bool append = epoch_ > 0 && std::filesystem::exists(log_path);
    csv.open(log_path, append ? std::ios::app : std::ios::trunc);
    if (!append) csv << "epoch,L_mnm,L_ep,acc_mnm,acc_ep,val_acc_mnm,val_acc_ep\n";
  }
  std::vector<PretrainEpoch> logs;
  while (epoch_ < config_.epochs) {
    PretrainEpoch e = RunEpoch();
    logs.push_back(e);
    spdlog::info("pretrain epoch {} L_mnm {:.4f} L_ep {:.4f} acc_mnm {:.3f} acc_ep {:.3f}", e.epoch,
                 e.l_mnm, e.l_ep, e.acc_mnm, e.acc_ep);
    if (csv.is_open()) {
      csv << e.epoch << ',' << e.l_mnm << ',' << e.l_ep << ',' << e.acc_mnm << ',' << e.acc_ep << ',';
      if (e.has_validation) csv << e.val_acc_mnm << ',' << e.val_acc_ep;
      else csv << ',';
      csv << '\n';
      csv.flush();
      if (config_.checkpoint_every > 0 && epoch_ % config_.checkpoint_every == 0) {
        SaveCheckpoint((std::filesystem::path(out_dir) / ("encoder_epoch" + std::to_string(epoch_) + ".ckpt")).string());
      }
    }
  }
  if (!out_dir.empty()) SaveCheckpoint((std::filesystem::path(out_dir) / "encoder.ckpt").string());
  return logs;
}

}  // namespace structrtl::ssl
