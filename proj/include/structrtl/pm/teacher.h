#ifndef STRUCTRTL_PM_TEACHER_H_
#define STRUCTRTL_PM_TEACHER_H_

#include <vector>

#include "json.hpp"
#include "structrtl/nn/encoder.h"
#include "structrtl/quality/regressor.h"

namespace structrtl::pm {

struct TeacherConfig {
  int input_dim = 15;
  int hidden = 128;
  int layers = 20;
};

nlohmann::json ToJson(const TeacherConfig& c);
TeacherConfig TeacherConfigFromJson(const nlohmann::json& j);

// Linear(cells -> H), residual GIN stack h <- h + GIN(h), mean/max
// pooling and a 3-layer MLP.
class TeacherModel : public quality::GraphRegressor {
 public:
  TeacherModel(const TeacherConfig& config, Rng& rng);

  const TeacherConfig& config() const { return config_; }

  nn::Tensor ResidualStack(const nn::Tensor& h, const nn::EdgeList& edges) const;
  nn::Tensor Encode(const nn::GraphInput& g) const;
  nn::Tensor Forward(const nn::GraphInput& g, bool training, Rng& rng,
                     nn::Tensor* penultimate = nullptr) const override;

  // Zeroes the last linear layer of every GIN branch, making the residual
  // stack the identity.
  void ZeroResidualBranches();

  nn::ParameterList Parameters() const;

  nn::Linear input;
  std::vector<nn::GinLayer> gin;
  nn::Mlp head;

 private:
  TeacherConfig config_;
};

// Adam with coupled weight decay, log-cosh on log-space targets.
std::vector<quality::EpochLoss> TrainTeacher(
    TeacherModel& model, const std::vector<nn::GraphInput>& netlists, const std::vector<double>& targets,
    const quality::RegressorConfig& config, uint64_t seed,
    const std::function<void(const quality::EpochLoss&)>& on_epoch = {});

}  // namespace structrtl::pm

#endif  // STRUCTRTL_PM_TEACHER_H_
