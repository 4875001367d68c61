#ifndef STRUCTRTL_CLI_EXPERIMENT_H_
#define STRUCTRTL_CLI_EXPERIMENT_H_

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"
#include "structrtl/data/dataset.h"
#include "structrtl/distill/distill.h"
#include "structrtl/nn/encoder.h"
#include "structrtl/pm/teacher.h"
#include "structrtl/quality/metrics.h"
#include "structrtl/quality/regressor.h"
#include "structrtl/ssl/pretrain.h"

namespace structrtl::cli {

struct CorpusConfig {
  int count = 500;
  uint64_t seed = 1;
  data::SizeMix mix;
};

// Everything a pipeline stage reads. Defaults are the full-scale settings;
// DeskScale() shrinks models and schedules for a single CPU core.
struct ExperimentConfig {
  uint64_t seed = 0;
  nn::EncoderConfig encoder;
  ssl::PretrainConfig pretrain;
  quality::RegressorConfig regressor;
  pm::TeacherConfig teacher;
  quality::RegressorConfig teacher_training = TeacherTrainingDefaults();
  double mu = distill::kQualityWeight;
  double tau = distill::kKdTau;
  double train_ratio = 0.8;
  uint64_t split_seed = 0;
  CorpusConfig corpus;

  static quality::RegressorConfig TeacherTrainingDefaults();
  data::DatasetOptions DatasetOptions() const;
  distill::DistillConfig Distill() const;
};

ExperimentConfig DeskScale();

nlohmann::json ToJson(const ExperimentConfig& c);
// Keys missing from `j` keep their value from `base`.
ExperimentConfig Overlay(const ExperimentConfig& base, const nlohmann::json& j);
ExperimentConfig LoadConfigFile(const ExperimentConfig& base, const std::string& path);
// Resolved config plus run details, written as <dir>/config.json.
void WriteSnapshot(const std::string& dir, const ExperimentConfig& c, const nlohmann::json& run);

// Checkpoints of the three model kinds. Student and teacher files record
// the task they were trained for.
std::unique_ptr<nn::EncoderModel> NewEncoder(const nn::EncoderConfig& c, uint64_t seed);
std::unique_ptr<nn::EncoderModel> LoadEncoder(const std::string& path);
// Copies the encoder weights (GIN, PE projection, Transformer, norm) of a
// pretraining checkpoint into `model`; heads stay as they are.
void LoadPretrainedEncoder(const std::string& path, nn::EncoderModel& model);
void SaveStudent(const std::string& path, const nn::EncoderModel& model, quality::Task task);
std::unique_ptr<nn::EncoderModel> LoadStudent(const std::string& path, quality::Task* task = nullptr);
void SaveTeacher(const std::string& path, const pm::TeacherModel& model, quality::Task task);
std::unique_ptr<pm::TeacherModel> LoadTeacher(const std::string& path, quality::Task* task = nullptr);

struct Evaluation {
  quality::MetricReport report;
  std::vector<std::string> ids;
  std::vector<double> targets;  // log space
  std::vector<double> predictions;
};

Evaluation Evaluate(const quality::GraphRegressor& model, const std::vector<nn::GraphInput>& inputs,
                    const data::Dataset& ds, const std::vector<size_t>& idx, quality::Task task);
// metrics.json and predictions.csv (id,target,prediction).
void WriteEvaluation(const std::string& dir, const Evaluation& e);
std::string MetricJson(const quality::MetricReport& r);

// Training log CSV; KD columns appear when `with_kd`.
void WriteTrainingLog(const std::string& path, const std::vector<quality::EpochLoss>& log, bool with_kd);

// Pipeline stages on a loaded dataset, training on its train split.
std::vector<ssl::PretrainEpoch> PretrainOn(nn::EncoderModel& model, const ExperimentConfig& c,
                                           const data::Dataset& ds, uint64_t seed,
                                           const std::string& out_dir = "");
std::vector<quality::EpochLoss> FinetuneOn(nn::EncoderModel& model, const ExperimentConfig& c,
                                           const data::Dataset& ds, quality::Task task, uint64_t seed);
std::unique_ptr<pm::TeacherModel> TeacherOn(const ExperimentConfig& c, const data::Dataset& ds,
                                            quality::Task task, uint64_t seed,
                                            std::vector<quality::EpochLoss>* log = nullptr);
distill::DistillResult DistillOn(const pm::TeacherModel& teacher, nn::EncoderModel& student,
                                 const ExperimentConfig& c, const data::Dataset& ds, quality::Task task,
                                 uint64_t seed);

}  // namespace structrtl::cli

#endif  // STRUCTRTL_CLI_EXPERIMENT_H_
