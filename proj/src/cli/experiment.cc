#include "structrtl/cli/experiment.h"

#include <filesystem>
#include <fstream>

#include <spdlog/fmt/fmt.h>
#include <spdlog/spdlog.h>

#include "structrtl/nn/checkpoint.h"
#include "structrtl/util/error.h"
#include "structrtl/util/io.h"

namespace structrtl::cli {

quality::RegressorConfig ExperimentConfig::TeacherTrainingDefaults() {
  quality::RegressorConfig c;
  c.epochs = 1000;
  c.batch_size = 256;
  c.lr = 1e-4;
  c.weight_decay = 1e-5;
  return c;
}

data::DatasetOptions ExperimentConfig::DatasetOptions() const {
  data::DatasetOptions o;
  o.train_ratio = train_ratio;
  o.split_seed = split_seed;
  o.pe_dim = encoder.pe_dim;
  return o;
}

distill::DistillConfig ExperimentConfig::Distill() const {
  distill::DistillConfig d;
  d.regressor = regressor;
  d.mu = mu;
  d.tau = tau;
  return d;
}

// Epoch counts are sized so a three-seed study on the 500-design corpus
// (pretraining, two students, teacher and distillation per task) stays
// within an hour on one core.
ExperimentConfig DeskScale() {
  ExperimentConfig c;
  c.encoder.hidden = 32;
  c.encoder.gin_layers = 3;
  c.encoder.transformer_layers = 2;
  c.encoder.heads = 4;
  c.encoder.ffn_multiplier = 2;

  c.pretrain.epochs = 50;
  c.pretrain.batch_size = 16;
  c.pretrain.lr = 1e-3;
  c.pretrain.eval_every = 0;

  c.regressor.epochs = 40;
  c.regressor.batch_size = 16;
  c.regressor.lr = 1e-3;
  c.regressor.encoder_lr = c.pretrain.lr;  // fine-tune at the pretraining rate

  c.teacher.hidden = c.encoder.hidden;
  c.teacher.layers = 4;
  c.teacher_training.epochs = 40;
  c.teacher_training.batch_size = 16;
  c.teacher_training.lr = 1e-3;

  c.corpus.count = 500;
  c.corpus.mix = {0.5, 0.45, 0.05};
  return c;
}

nlohmann::json ToJson(const ExperimentConfig& c) {
  nlohmann::json teacher = pm::ToJson(c.teacher);
  teacher["training"] = quality::ToJson(c.teacher_training);
  return {
      {"seed", c.seed},
      {"encoder", nn::ToJson(c.encoder)},
      {"pretrain", ssl::ToJson(c.pretrain)},
      {"regressor", quality::ToJson(c.regressor)},
      {"teacher", teacher},
      {"distill", {{"mu", c.mu}, {"tau", c.tau}}},
      {"data", {{"train_ratio", c.train_ratio}, {"split_seed", c.split_seed}}},
      {"corpus",
       {{"count", c.corpus.count},
        {"seed", c.corpus.seed},
        {"mix", {{"tiny", c.corpus.mix.tiny}, {"small", c.corpus.mix.small}, {"medium", c.corpus.mix.medium}}}}},
  };
}

namespace {

const nlohmann::json& Section(const nlohmann::json& j, const char* key) {
  static const nlohmann::json kEmpty = nlohmann::json::object();
  if (!j.contains(key)) return kEmpty;
  if (!j[key].is_object()) throw SchemaError(std::string("/") + key, "must be an object");
  return j[key];
}

ExperimentConfig FromFullJson(const nlohmann::json& j) {
  ExperimentConfig c;
  c.seed = j.value("seed", c.seed);
  c.encoder = nn::EncoderConfigFromJson(Section(j, "encoder"));
  c.pretrain = ssl::PretrainConfigFromJson(Section(j, "pretrain"));
  c.regressor = quality::RegressorConfigFromJson(Section(j, "regressor"));
  const nlohmann::json& teacher = Section(j, "teacher");
  c.teacher = pm::TeacherConfigFromJson(teacher);
  c.teacher_training = quality::RegressorConfigFromJson(Section(teacher, "training"));
  const nlohmann::json& d = Section(j, "distill");
  c.mu = d.value("mu", c.mu);
  c.tau = d.value("tau", c.tau);
  if (c.mu < 0 || c.mu > 1) throw SchemaError("/distill/mu", "must be in [0, 1]");
  if (c.tau < 0 || c.tau > 1) throw SchemaError("/distill/tau", "must be in [0, 1]");
  const nlohmann::json& data = Section(j, "data");
  c.train_ratio = data.value("train_ratio", c.train_ratio);
  c.split_seed = data.value("split_seed", c.split_seed);
  if (!(c.train_ratio > 0 && c.train_ratio <= 1)) throw SchemaError("/data/train_ratio", "must be in (0, 1]");
  const nlohmann::json& corpus = Section(j, "corpus");
  c.corpus.count = corpus.value("count", c.corpus.count);
  c.corpus.seed = corpus.value("seed", c.corpus.seed);
  const nlohmann::json& mix = Section(corpus, "mix");
  c.corpus.mix.tiny = mix.value("tiny", c.corpus.mix.tiny);
  c.corpus.mix.small = mix.value("small", c.corpus.mix.small);
  c.corpus.mix.medium = mix.value("medium", c.corpus.mix.medium);
  return c;
}

std::string Join(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

}  // namespace

ExperimentConfig Overlay(const ExperimentConfig& base, const nlohmann::json& j) {
  if (!j.is_object()) throw SchemaError("", "config must be a JSON object");
  nlohmann::json merged = ToJson(base);
  merged.merge_patch(j);
  return FromFullJson(merged);
}

ExperimentConfig LoadConfigFile(const ExperimentConfig& base, const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(ReadFile(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError("", path + ": " + e.what());
  }
  return Overlay(base, j);
}

void WriteSnapshot(const std::string& dir, const ExperimentConfig& c, const nlohmann::json& run) {
  nlohmann::json j = ToJson(c);
  j["run"] = run;
  WriteFile(Join(dir, "config.json"), j.dump(2) + "\n");
}

std::unique_ptr<nn::EncoderModel> NewEncoder(const nn::EncoderConfig& c, uint64_t seed) {
  Rng rng(seed);
  return std::make_unique<nn::EncoderModel>(c, rng);
}

namespace {

nn::Checkpoint LoadKind(const std::string& path, const std::string& kind) {
  nn::Checkpoint ckpt = nn::LoadCheckpoint(path);
  if (ckpt.kind != kind) {
    throw SchemaError("/kind", fmt::format("{}: expected a {} checkpoint, found '{}'", path, kind, ckpt.kind));
  }
  return ckpt;
}

}  // namespace

std::unique_ptr<nn::EncoderModel> LoadEncoder(const std::string& path) {
  const nn::Checkpoint ckpt = LoadKind(path, "encoder");
  auto model = NewEncoder(nn::EncoderConfigFromJson(ckpt.meta.at("encoder")), 0);
  nn::RestoreParameters(ckpt, model->Parameters());
  return model;
}

void LoadPretrainedEncoder(const std::string& path, nn::EncoderModel& model) {
  const nn::Checkpoint ckpt = LoadKind(path, "encoder");
  const nlohmann::json stored = ckpt.meta.at("encoder");
  if (stored != nn::ToJson(model.config())) {
    throw SchemaError("/meta/encoder", path + ": encoder architecture differs from the configured one");
  }
  nn::RestoreParameters(ckpt, model.EncoderParameters());
}

void SaveStudent(const std::string& path, const nn::EncoderModel& model, quality::Task task) {
  nn::Checkpoint ckpt;
  ckpt.kind = "student";
  ckpt.meta["encoder"] = nn::ToJson(model.config());
  ckpt.meta["task"] = quality::TaskName(task);
  nn::StoreParameters(model.Parameters(), ckpt);
  nn::SaveCheckpoint(ckpt, path);
}

std::unique_ptr<nn::EncoderModel> LoadStudent(const std::string& path, quality::Task* task) {
  const nn::Checkpoint ckpt = LoadKind(path, "student");
  auto model = NewEncoder(nn::EncoderConfigFromJson(ckpt.meta.at("encoder")), 0);
  nn::RestoreParameters(ckpt, model->Parameters());
  if (task) *task = quality::ParseTask(ckpt.meta.at("task").get<std::string>());
  return model;
}

void SaveTeacher(const std::string& path, const pm::TeacherModel& model, quality::Task task) {
  nn::Checkpoint ckpt;
  ckpt.kind = "teacher";
  ckpt.meta["teacher"] = pm::ToJson(model.config());
  ckpt.meta["task"] = quality::TaskName(task);
  nn::StoreParameters(model.Parameters(), ckpt);
  nn::SaveCheckpoint(ckpt, path);
}

std::unique_ptr<pm::TeacherModel> LoadTeacher(const std::string& path, quality::Task* task) {
  const nn::Checkpoint ckpt = LoadKind(path, "teacher");
  Rng rng(0);
  auto model = std::make_unique<pm::TeacherModel>(pm::TeacherConfigFromJson(ckpt.meta.at("teacher")), rng);
  nn::RestoreParameters(ckpt, model->Parameters());
  if (task) *task = quality::ParseTask(ckpt.meta.at("task").get<std::string>());
  return model;
}

Evaluation Evaluate(const quality::GraphRegressor& model, const std::vector<nn::GraphInput>& inputs,
                    const data::Dataset& ds, const std::vector<size_t>& idx, quality::Task task) {
  Evaluation e;
  e.targets = ds.LogTargets(task, idx);
  e.predictions = quality::PredictAll(model, inputs);
  for (size_t i : idx) e.ids.push_back(ds.records[i].design_id);
  e.report = quality::ComputeMetrics(e.predictions, e.targets);
  return e;
}

std::string MetricJson(const quality::MetricReport& r) { return quality::ToJson(r).dump(2) + "\n"; }

void WriteEvaluation(const std::string& dir, const Evaluation& e) {
  WriteFile(Join(dir, "metrics.json"), MetricJson(e.report));
  std::string csv = "id,target,prediction\n";
  for (size_t i = 0; i < e.ids.size(); ++i) {
    csv += fmt::format("{},{:.17g},{:.17g}\n", e.ids[i], e.targets[i], e.predictions[i]);
  }
  WriteFile(Join(dir, "predictions.csv"), csv);
}

void WriteTrainingLog(const std::string& path, const std::vector<quality::EpochLoss>& log, bool with_kd) {
  std::string csv = with_kd ? "epoch,loss,L_qe,L_kd\n" : "epoch,loss\n";
  for (const quality::EpochLoss& e : log) {
    csv += with_kd ? fmt::format("{},{:.17g},{:.17g},{:.17g}\n", e.epoch, e.loss, e.l_qe, e.l_kd)
                   : fmt::format("{},{:.17g}\n", e.epoch, e.loss);
  }
  WriteFile(path, csv);
}

std::vector<ssl::PretrainEpoch> PretrainOn(nn::EncoderModel& model, const ExperimentConfig& c,
                                           const data::Dataset& ds, uint64_t seed, const std::string& out_dir) {
  const std::vector<nn::GraphInput> train = ds.Inputs(ds.train);
  const std::vector<nn::GraphInput> val = ds.Inputs(ds.val);
  ssl::Pretrainer trainer(model, c.pretrain, train, val, seed);
  return trainer.Run(out_dir);
}

namespace {

void LogEpoch(const char* what, const quality::EpochLoss& e, int epochs) {
  if (e.epoch == 1 || e.epoch == epochs || e.epoch % 10 == 0) {
    spdlog::info("{} epoch {} loss {:.5f}", what, e.epoch, e.loss);
  }
}

}  // namespace

std::vector<quality::EpochLoss> FinetuneOn(nn::EncoderModel& model, const ExperimentConfig& c,
                                           const data::Dataset& ds, quality::Task task, uint64_t seed) {
  return quality::TrainRegressor(model, ds.Inputs(ds.train), ds.LogTargets(task, ds.train), c.regressor, seed,
                                 [&](const quality::EpochLoss& e) { LogEpoch("train", e, c.regressor.epochs); });
}

std::unique_ptr<pm::TeacherModel> TeacherOn(const ExperimentConfig& c, const data::Dataset& ds,
                                            quality::Task task, uint64_t seed,
                                            std::vector<quality::EpochLoss>* log) {
  if (ds.netlists.size() != ds.records.size()) throw Error("dataset was loaded without netlists");
  Rng rng(seed);
  auto teacher = std::make_unique<pm::TeacherModel>(c.teacher, rng);
  auto losses = pm::TrainTeacher(*teacher, ds.Netlists(ds.train), ds.LogTargets(task, ds.train),
                                 c.teacher_training, seed, [&](const quality::EpochLoss& e) {
                                   LogEpoch("teacher", e, c.teacher_training.epochs);
                                 });
  if (log) *log = std::move(losses);
  return teacher;
}

distill::DistillResult DistillOn(const pm::TeacherModel& teacher, nn::EncoderModel& student,
                                 const ExperimentConfig& c, const data::Dataset& ds, quality::Task task,
                                 uint64_t seed) {
  if (ds.netlists.size() != ds.records.size()) throw Error("dataset was loaded without netlists");
  return distill::TrainStudentWithKd(teacher, student, ds.Inputs(ds.train), ds.Netlists(ds.train),
                                     ds.LogTargets(task, ds.train), c.Distill(), seed,
                                     [&](const quality::EpochLoss& e) { LogEpoch("distill", e, c.regressor.epochs); });
}

}  // namespace structrtl::cli
