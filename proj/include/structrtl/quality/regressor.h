#ifndef STRUCTRTL_QUALITY_REGRESSOR_H_
#define STRUCTRTL_QUALITY_REGRESSOR_H_

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "structrtl/nn/encoder.h"
#include "structrtl/nn/optim.h"
#include "structrtl/quality/metrics.h"
#include "structrtl/util/rng.h"

namespace structrtl::quality {

enum class Task { kArea, kDelay };

std::string TaskName(Task task);
// "area" or "delay"; anything else throws Error.
Task ParseTask(std::string_view name);

struct RegressorConfig {
  int epochs = 600;
  int batch_size = 256;
  double lr = 1e-4;
  double weight_decay = 1e-5;
  // Encoder fine-tuning group; ignored when freeze_encoder is set.
  double encoder_lr = 2e-5;
  double encoder_weight_decay = 1e-4;
  bool freeze_encoder = false;
  bool sign_flip = true;
};

nlohmann::json ToJson(const RegressorConfig& c);
RegressorConfig RegressorConfigFromJson(const nlohmann::json& j);

// Maps one graph to a 1 x 1 log-space prediction. `penultimate` receives
// the activation entering the final linear layer.
class GraphRegressor {
 public:
  virtual ~GraphRegressor() = default;
  virtual nn::Tensor Forward(const nn::GraphInput& g, bool training, Rng& rng,
                             nn::Tensor* penultimate = nullptr) const = 0;
};

// CDFG student: encoder -> mean/max pooling -> 3-layer MLP.
class StudentRegressor : public GraphRegressor {
 public:
  StudentRegressor(nn::EncoderModel& model, bool sign_flip) : model_(model), sign_flip_(sign_flip) {}

  nn::Tensor Forward(const nn::GraphInput& g, bool training, Rng& rng,
                     nn::Tensor* penultimate = nullptr) const override;

  nn::EncoderModel& model() const { return model_; }

 private:
  nn::EncoderModel& model_;
  bool sign_flip_;
};

// Head group (lr, weight_decay) plus, unless frozen, the encoder group at
// (encoder_lr, encoder_weight_decay). The [MASK] token is never included.
std::vector<nn::ParamGroup> StudentParamGroups(const nn::EncoderModel& model, const RegressorConfig& config);

// Sets the output bias of `head` to `value` (typically the mean target).
void InitOutputBias(const nn::Mlp& head, double value);

struct EpochLoss {
  int epoch = 0;
  double loss = 0.0;
  double l_qe = 0.0;
  double l_kd = 0.0;
};

struct SampleLoss {
  nn::Tensor loss;
  double l_qe = 0.0;
  double l_kd = 0.0;
};

using SampleLossFn = std::function<SampleLoss(size_t index, Rng& rng)>;

// Shuffled minibatch loop: each batch averages per-sample losses and takes
// one optimizer step. Epoch statistics are per-sample means.
std::vector<EpochLoss> Fit(size_t num_samples, int epochs, int batch_size, nn::Adam& optimizer,
                           Rng& rng, const SampleLossFn& sample_loss,
                           const std::function<void(const EpochLoss&)>& on_epoch = {});

double PredictQuality(const GraphRegressor& model, const nn::GraphInput& g);
std::vector<double> PredictAll(const GraphRegressor& model, const std::vector<nn::GraphInput>& graphs);

// Log-cosh regression of `targets` (log space) on the student.
std::vector<EpochLoss> TrainRegressor(nn::EncoderModel& model, const std::vector<nn::GraphInput>& graphs,
                                      const std::vector<double>& targets, const RegressorConfig& config,
                                      uint64_t seed,
                                      const std::function<void(const EpochLoss&)>& on_epoch = {});

double Mean(const std::vector<double>& v);

}  // namespace structrtl::quality

#endif  // STRUCTRTL_QUALITY_REGRESSOR_H_
