#ifndef STRUCTRTL_DISTILL_DISTILL_H_
#define STRUCTRTL_DISTILL_DISTILL_H_

#include <cstdint>
#include <functional>
#include <vector>

#include "json.hpp"
#include "structrtl/nn/encoder.h"
#include "structrtl/pm/teacher.h"
#include "structrtl/quality/regressor.h"

namespace structrtl::distill {

inline constexpr double kKdTau = 0.7;
inline constexpr double kQualityWeight = 0.5;

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

struct DistillConfig {
  quality::RegressorConfig regressor;
  double mu = kQualityWeight;  // weight of the quality loss
  double tau = kKdTau;         // weight of the cosine term inside the KD loss
};

nlohmann::json ToJson(const DistillConfig& c);
DistillConfig DistillConfigFromJson(const nlohmann::json& j);

// tau * (1 - cos(a, b)) + (1 - tau) * mean((a - b)^2) for two vectors.
double KdLossValue(const std::vector<double>& a, const std::vector<double>& b, double tau = kKdTau);

struct DistillResult {
  std::vector<quality::EpochLoss> log;
  uint64_t teacher_checksum_before = 0;
  uint64_t teacher_checksum_after = 0;
};

// Trains the student regressor on mu * log-cosh + (1 - mu) * KD, where KD
// aligns the activations entering both predictors' final linear layers.
// The teacher runs in inference mode on each design's netlist and is never
// updated. Optimizer, initialization and sampling match
// quality::TrainRegressor, so mu = 1 reproduces it exactly.
DistillResult TrainStudentWithKd(const pm::TeacherModel& teacher, nn::EncoderModel& student,
                                 const std::vector<nn::GraphInput>& graphs,
                                 const std::vector<nn::GraphInput>& netlists,
                                 const std::vector<double>& targets, const DistillConfig& config,
                                 uint64_t seed,
                                 const std::function<void(const quality::EpochLoss&)>& on_epoch = {});

}  // namespace structrtl::distill

#endif  // STRUCTRTL_DISTILL_DISTILL_H_
