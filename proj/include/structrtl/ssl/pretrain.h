#ifndef STRUCTRTL_SSL_PRETRAIN_H_
#define STRUCTRTL_SSL_PRETRAIN_H_

#include <memory>
#include <string>
#include <vector>

#include "json.hpp"
#include "structrtl/nn/encoder.h"
#include "structrtl/nn/optim.h"
#include "structrtl/ssl/objectives.h"

namespace structrtl::ssl {

struct PretrainConfig {
  int epochs = 2000;
  int batch_size = 16;
  double lr = 2e-5;
  double weight_decay = 1e-4;
  double alpha = 0.5;
  MaskConfig mask;
  double edge_ratio = 0.2;
  bool sign_flip = true;
  int eval_every = 1;        // validation accuracies every n epochs (0: never)
  int checkpoint_every = 0;  // extra numbered checkpoints (0: final only)
};

nlohmann::json ToJson(const PretrainConfig& c);
PretrainConfig PretrainConfigFromJson(const nlohmann::json& j);

struct PretrainEpoch {
  int epoch = 0;
  double l_mnm = 0.0;
  double l_ep = 0.0;
  double acc_mnm = 0.0;
  double acc_ep = 0.0;
  bool has_validation = false;
  double val_acc_mnm = 0.0;
  double val_acc_ep = 0.0;
};

struct TaskAccuracy {
  double mnm = 0.0;
  double ep = 0.0;
};

// Inference-mode accuracies (no sign flips): MNM over `mask_draws`
// stratified masks per graph, EP over every edge plus equal negatives.
// Deterministic in `seed`.
TaskAccuracy EvaluatePretrainTasks(const nn::EncoderModel& model,
                                   const std::vector<nn::GraphInput>& graphs,
                                   const MaskConfig& mask, uint64_t seed, int mask_draws = 4);

// Per-corpus node-type counts (length num_classes).
std::vector<double> NodeTypeCounts(const std::vector<nn::GraphInput>& graphs, int num_classes);

// Joint masked-node-modeling + edge-prediction training. Each batch is a
// set of whole graphs; per-graph losses are averaged over the batch and
// combined as alpha * L_mnm + (1 - alpha) * L_ep. Graphs without edges
// contribute only the MNM term.
class Pretrainer {
 public:
  Pretrainer(nn::EncoderModel& model, const PretrainConfig& config,
             const std::vector<nn::GraphInput>& train, const std::vector<nn::GraphInput>& val,
             uint64_t seed);

  PretrainEpoch RunEpoch();
  int completed_epochs() const { return epoch_; }

  // Model, optimizer moments, RNG state and epoch counter.
  void SaveCheckpoint(const std::string& path) const;
  void ResumeFrom(const std::string& path);

  // Runs the remaining epochs up to config.epochs. With a non-empty
  // `out_dir`, writes pretrain_log.csv and encoder.ckpt there.
  std::vector<PretrainEpoch> Run(const std::string& out_dir = "");

 private:
  nn::EncoderModel& model_;
  PretrainConfig config_;
  const std::vector<nn::GraphInput>& train_;
  const std::vector<nn::GraphInput>& val_;
  uint64_t seed_;
  std::vector<double> class_weights_;
  std::unique_ptr<nn::Adam> optimizer_;
  Rng rng_;
  int epoch_ = 0;
};

// Parameters that pretraining updates (encoder + node/edge heads).
nn::ParameterList PretrainParameters(const nn::EncoderModel& model);

}  // namespace structrtl::ssl

#endif  // STRUCTRTL_SSL_PRETRAIN_H_
