#include "structrtl/distill/distill.h"

#include "structrtl/nn/checkpoint.h"
#include "structrtl/nn/ops.h"

namespace structrtl::distill {

nlohmann::json ToJson(const DistillConfig& c) {
  nlohmann::json j = quality::ToJson(c.regressor);
  j["mu"] = c.mu;
  j["tau"] = c.tau;
  return j;
}

DistillConfig DistillConfigFromJson(const nlohmann::json& j) {
  DistillConfig c;
  c.regressor = quality::RegressorConfigFromJson(j);
  c.mu = j.value("mu", c.mu);
  c.tau = j.value("tau", c.tau);
  if (c.mu < 0 || c.mu > 1) throw SchemaError("/mu", "must be in [0, 1]");
  if (c.tau < 0 || c.tau > 1) throw SchemaError("/tau", "must be in [0, 1]");
  return c;
}

double KdLossValue(const std::vector<double>& a, const std::vector<double>& b, double tau) {
  if (a.size() != b.size()) throw DimensionMismatch("KD vectors differ in length");
  Matrix ma(1, a.size()), mb(1, b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    ma(0, i) = a[i];
    mb(0, i) = b[i];
  }
  nn::NoGradGuard no_grad;
  return nn::KdLoss(nn::Constant(ma), nn::Constant(mb), tau).item();
}

DistillResult TrainStudentWithKd(const pm::TeacherModel& teacher, nn::EncoderModel& student,
                                 const std::vector<nn::GraphInput>& graphs,
                                 const std::vector<nn::GraphInput>& netlists,
                                 const std::vector<double>& targets, const DistillConfig& config,
                                 uint64_t seed,
                                 const std::function<void(const quality::EpochLoss&)>& on_epoch) {
  if (graphs.size() != targets.size() || netlists.size() != targets.size()) {
    throw Error("graph, netlist and target counts differ");
  }
  const auto teacher_width = teacher.head.layers.back().weight.rows();
  const auto student_width = student.regression_head.layers.back().weight.rows();
  if (teacher_width != student_width) {
    throw DimensionMismatch("teacher final-layer width " + std::to_string(teacher_width) +
                            " differs from student width " + std::to_string(student_width));
  }

  DistillResult result;
  const nn::ParameterList teacher_params = teacher.Parameters();
  result.teacher_checksum_before = nn::ParameterChecksum(teacher_params);
  std::vector<Matrix> teacher_z;
  {
    nn::NoGradGuard no_grad;
    Rng unused(0);
    for (const nn::GraphInput& n : netlists) {
      nn::Tensor z;
      teacher.Forward(n, false, unused, &z);
      teacher_z.push_back(z.value());
    }
  }

  quality::InitOutputBias(student.regression_head, quality::Mean(targets));
  nn::Adam optimizer(quality::StudentParamGroups(student, config.regressor), nn::AdamOptions{});
  const quality::StudentRegressor model(student, config.regressor.sign_flip);
  Rng rng(seed);
  result.log = quality::Fit(
      graphs.size(), config.regressor.epochs, config.regressor.batch_size, optimizer, rng,
      [&](size_t i, Rng& r) {
        nn::Tensor z;
        const nn::Tensor pred = model.Forward(graphs[i], true, r, &z);
        const nn::Tensor qe = nn::LogCoshLoss(pred, nn::Constant(Matrix::Constant(1, 1, targets[i])));
        const nn::Tensor kd = nn::KdLoss(z, nn::Constant(teacher_z[i]), config.tau);
        quality::SampleLoss s;
        s.loss = nn::Add(nn::Scale(qe, config.mu), nn::Scale(kd, 1.0 - config.mu));
        s.l_qe = qe.item();
        s.l_kd = kd.item();
        return s;
      },
      on_epoch);
  result.teacher_checksum_after = nn::ParameterChecksum(teacher_params);
  return result;
}

}  // namespace structrtl::distill
