#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <spdlog/fmt/fmt.h>
#include <string>
#include <vector>

#include "criteria.h"
#include "structrtl/cli/experiment.h"
#include "structrtl/data/dataset.h"
#include "structrtl/distill/distill.h"
#include "structrtl/nn/checkpoint.h"
#include "structrtl/pm/netlist.h"
#include "structrtl/pm/teacher.h"
#include "structrtl/quality/regressor.h"
#include "structrtl/ssl/pretrain.h"
#include "structrtl/util/io.h"

namespace structrtl::acceptance {
namespace {

namespace fs = std::filesystem;

double Seconds(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - since).count();
}

double Median3(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

// The eight fixture designs, all in the training split.
const data::Dataset& FixtureDataset() {
  static const data::Dataset ds = [] {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(fs::path(STRUCTRTL_FIXTURE_DIR) / "designs")) {
      if (e.path().extension() == ".v") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    std::vector<std::string> sources;
    for (const fs::path& p : files) sources.push_back(ReadFile(p.string()));
    data::DatasetOptions o;
    o.train_ratio = 1.0;
    return data::DatasetFromSources(sources, pm::CellLibrary::Default(), o);
  }();
  return ds;
}

fs::path ScratchDir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / fmt::format("structrtl_acceptance_{}", name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

// The fixture has eight designs and every run uses batch 8, so one epoch
// is one optimizer step. Settings are fixed up front: the desk encoder,
// Adam at 1e-3 without weight decay, sign flips off.
Outcome OverfitOracles() {
  const auto start = std::chrono::steady_clock::now();
  const data::Dataset& ds = FixtureDataset();
  const cli::ExperimentConfig desk = cli::DeskScale();
  std::vector<std::string> parts;
  bool pass = true;

  {  // (a) pretraining, accuracy checked every 25 steps
    auto model = cli::NewEncoder(desk.encoder, 0);
    ssl::PretrainConfig pc;
    pc.epochs = 500;
    pc.batch_size = 8;
    pc.lr = 1e-3;
    pc.weight_decay = 0.0;
    pc.sign_flip = false;
    pc.eval_every = 0;
    ssl::Pretrainer trainer(*model, pc, ds.inputs, {}, 10);
    ssl::TaskAccuracy acc, best;
    int step = 0, reached = -1;
    while (step < 500) {
      trainer.RunEpoch();
      if (++step % 25 != 0) continue;
      acc = ssl::EvaluatePretrainTasks(*model, ds.inputs, ssl::MaskConfig{}, 77, 16);
      best.mnm = std::max(best.mnm, acc.mnm);
      best.ep = std::max(best.ep, acc.ep);
      if (acc.mnm == 1.0 && acc.ep == 1.0) {
        reached = step;
        break;
      }
    }
    pass &= reached > 0;
    parts.push_back(reached > 0 ? fmt::format("(a) MNM and EP both 100% at step {}", reached)
                                : fmt::format("(a) not reached in 500 steps: final MNM {:.3f} EP {:.3f}, "
                                              "best MNM {:.3f} EP {:.3f}",
                                              acc.mnm, acc.ep, best.mnm, best.ep));
  }

  quality::RegressorConfig rc;
  rc.batch_size = 8;
  rc.lr = 1e-3;
  rc.weight_decay = 0.0;
  rc.encoder_lr = 1e-3;
  rc.encoder_weight_decay = 0.0;
  rc.sign_flip = false;
  for (quality::Task task : {quality::Task::kArea, quality::Task::kDelay}) {
    const std::vector<double> y = ds.LogTargets(task, ds.train);
    {  // (b) student regressor
      rc.epochs = 300;
      auto model = cli::NewEncoder(desk.encoder, 0);
      quality::TrainRegressor(*model, ds.inputs, y, rc, 0);
      const double mae =
          quality::ComputeMetrics(quality::PredictAll(quality::StudentRegressor(*model, false), ds.inputs), y).mae;
      pass &= mae <= 0.01;
      parts.push_back(fmt::format("(b) {} train MAE {:.5f}", quality::TaskName(task), mae));
    }
    {  // (c) 20-layer teacher on the lowered netlists
      rc.epochs = 1000;
      pm::TeacherConfig tc = desk.teacher;
      tc.layers = 20;
      Rng rng(0);
      pm::TeacherModel teacher(tc, rng);
      pm::TrainTeacher(teacher, ds.netlists, y, rc, 0);
      const double mae = quality::ComputeMetrics(quality::PredictAll(teacher, ds.netlists), y).mae;
      pass &= mae <= 0.01;
      parts.push_back(fmt::format("(c) {} teacher train MAE {:.5f}", quality::TaskName(task), mae));
    }
  }
  const double secs = Seconds(start);
  pass &= secs < 600.0;
  std::string detail;
  for (const std::string& p : parts) detail += p + "; ";
  return {pass, detail + fmt::format("total {:.0f}s (limit 600s)", secs)};
}

namespace {

struct TaskRun {
  double mae_pretrained = 0, mae_random = 0, mae_kd = 0;
  double r2_pretrained = 0, r2_kd = 0, r2_teacher = 0;
};

struct SeedRun {
  double pretrain_secs = 0, finetune_pre_secs = 0, finetune_rand_secs = 0, teacher_secs = 0, kd_secs = 0;
  TaskRun area, delay;
};

struct CorpusStudy {
  double data_secs = 0;
  size_t train = 0, val = 0;
  std::vector<SeedRun> seeds;
};

// Desk-scale config on a 500-design corpus, three seeds. For each seed the
// encoder is pretrained once; per task the pretrained and the random-init
// students start from the same initialization (head included), and the
// distilled student starts from the pretrained encoder again.
const CorpusStudy& RunCorpusStudy() {
  static std::optional<CorpusStudy> cached;
  if (cached) return *cached;
  CorpusStudy study;
  const cli::ExperimentConfig c = cli::DeskScale();
  const pm::CellLibrary lib = pm::CellLibrary::Default();
  auto t = std::chrono::steady_clock::now();
  const data::Dataset ds = data::DatasetFromSources(
      data::GenerateSources(c.corpus.count, c.corpus.seed, c.corpus.mix), lib, c.DatasetOptions());
  study.data_secs = Seconds(t);
  study.train = ds.train.size();
  study.val = ds.val.size();
  const std::vector<nn::GraphInput> val_inputs = ds.Inputs(ds.val);
  const std::vector<nn::GraphInput> val_netlists = ds.Netlists(ds.val);
  const fs::path scratch = ScratchDir("corpus");

  for (uint64_t s = 0; s < 3; ++s) {
    const uint64_t seed = c.seed + s;
    SeedRun run;
    const std::string ckpt_dir = (scratch / fmt::format("seed{}", seed)).string();
    t = std::chrono::steady_clock::now();
    {
      auto encoder = cli::NewEncoder(c.encoder, seed);
      cli::PretrainOn(*encoder, c, ds, seed, ckpt_dir);
    }
    run.pretrain_secs = Seconds(t);
    const std::string ckpt = ckpt_dir + "/encoder.ckpt";

    for (quality::Task task : {quality::Task::kArea, quality::Task::kDelay}) {
      TaskRun& r = task == quality::Task::kArea ? run.area : run.delay;
      t = std::chrono::steady_clock::now();
      {
        auto m = cli::NewEncoder(c.encoder, seed + 100);
        cli::LoadPretrainedEncoder(ckpt, *m);
        cli::FinetuneOn(*m, c, ds, task, seed);
        const auto e = cli::Evaluate(quality::StudentRegressor(*m, false), val_inputs, ds, ds.val, task);
        r.mae_pretrained = e.report.mae;
        r.r2_pretrained = e.report.r2;
      }
      run.finetune_pre_secs += Seconds(t);
      t = std::chrono::steady_clock::now();
      {
        auto m = cli::NewEncoder(c.encoder, seed + 100);
        cli::FinetuneOn(*m, c, ds, task, seed);
        r.mae_random = cli::Evaluate(quality::StudentRegressor(*m, false), val_inputs, ds, ds.val, task).report.mae;
      }
      run.finetune_rand_secs += Seconds(t);
      t = std::chrono::steady_clock::now();
      auto teacher = cli::TeacherOn(c, ds, task, seed);
      r.r2_teacher = cli::Evaluate(*teacher, val_netlists, ds, ds.val, task).report.r2;
      run.teacher_secs += Seconds(t);
      t = std::chrono::steady_clock::now();
      {
        auto m = cli::NewEncoder(c.encoder, seed + 100);
        cli::LoadPretrainedEncoder(ckpt, *m);
        cli::DistillOn(*teacher, *m, c, ds, task, seed);
        const auto e = cli::Evaluate(quality::StudentRegressor(*m, false), val_inputs, ds, ds.val, task);
        r.mae_kd = e.report.mae;
        r.r2_kd = e.report.r2;
      }
      run.kd_secs += Seconds(t);
    }
    study.seeds.push_back(run);
  }
  fs::remove_all(scratch);
  cached = study;
  return *cached;
}

template <typename F>
double MedianOf(const CorpusStudy& s, quality::Task task, F field) {
  std::vector<double> v;
  for (const SeedRun& r : s.seeds) v.push_back(field(task == quality::Task::kArea ? r.area : r.delay));
  return Median3(v);
}

template <typename F>
std::string PerSeed(const CorpusStudy& s, quality::Task task, F field) {
  std::string out;
  for (const SeedRun& r : s.seeds) {
    out += fmt::format("{}{:.4f}", out.empty() ? "" : "/", field(task == quality::Task::kArea ? r.area : r.delay));
  }
  return out;
}

}  // namespace

Outcome PretrainingHelps() {
  const CorpusStudy& s = RunCorpusStudy();
  double secs = s.data_secs;
  for (const SeedRun& r : s.seeds) secs += r.pretrain_secs + r.finetune_pre_secs + r.finetune_rand_secs;
  bool pass = secs <= 3600.0;
  std::string detail = fmt::format("{} train / {} val designs; ", s.train, s.val);
  for (quality::Task task : {quality::Task::kArea, quality::Task::kDelay}) {
    const auto pre = [](const TaskRun& r) { return r.mae_pretrained; };
    const auto rnd = [](const TaskRun& r) { return r.mae_random; };
    const double a = MedianOf(s, task, pre), b = MedianOf(s, task, rnd);
    pass &= a <= b;
    detail += fmt::format("{} median val MAE pretrained {:.4f} vs random {:.4f} (seeds {} vs {}); ",
                          quality::TaskName(task), a, b, PerSeed(s, task, pre), PerSeed(s, task, rnd));
  }
  return {pass, detail + fmt::format("cost {:.0f}s (limit 3600s)", secs)};
}

Outcome DistillationHelps() {
  const CorpusStudy& s = RunCorpusStudy();
  // Standalone cost of this comparison: data, pretraining, the no-KD
  // student, the teacher and the distilled student.
  double secs = s.data_secs;
  for (const SeedRun& r : s.seeds) secs += r.pretrain_secs + r.finetune_pre_secs + r.teacher_secs + r.kd_secs;
  bool pass = secs <= 3600.0;
  std::string detail;
  for (quality::Task task : {quality::Task::kArea, quality::Task::kDelay}) {
    const auto kd = [](const TaskRun& r) { return r.mae_kd; };
    const auto plain = [](const TaskRun& r) { return r.mae_pretrained; };
    const double mk = MedianOf(s, task, kd), mp = MedianOf(s, task, plain);
    const double rt = MedianOf(s, task, [](const TaskRun& r) { return r.r2_teacher; });
    const double rk = MedianOf(s, task, [](const TaskRun& r) { return r.r2_kd; });
    const double rp = MedianOf(s, task, [](const TaskRun& r) { return r.r2_pretrained; });
    pass &= mk <= mp && rt >= rk;
    detail += fmt::format("{} median val MAE KD {:.4f} vs no-KD {:.4f} (seeds {} vs {}), R2 teacher {:.4f} "
                          "vs KD student {:.4f} (no-KD {:.4f}); ",
                          quality::TaskName(task), mk, mp, PerSeed(s, task, kd), PerSeed(s, task, plain), rt, rk,
                          rp);
  }
  return {pass, detail + fmt::format("cost {:.0f}s (limit 3600s)", secs)};
}

Outcome MuOneDegeneracy() {
  const data::Dataset& ds = FixtureDataset();
  const cli::ExperimentConfig desk = cli::DeskScale();
  int compared = 0, mismatches = 0, checksum_mismatches = 0;
  for (quality::Task task : {quality::Task::kArea, quality::Task::kDelay}) {
    const std::vector<double> y = ds.LogTargets(task, ds.train);
    for (uint64_t seed : {0, 1, 2}) {
      Rng trng(seed + 50);
      const pm::TeacherModel teacher(desk.teacher, trng);
      distill::DistillConfig cfg = desk.Distill();
      cfg.mu = 1.0;
      cfg.regressor.epochs = 15;
      cfg.regressor.batch_size = 3;
      auto a = cli::NewEncoder(desk.encoder, seed);
      auto b = cli::NewEncoder(desk.encoder, seed);
      const distill::DistillResult kd =
          distill::TrainStudentWithKd(teacher, *a, ds.inputs, ds.netlists, y, cfg, seed);
      const std::vector<quality::EpochLoss> plain = quality::TrainRegressor(*b, ds.inputs, y, cfg.regressor, seed);
      if (kd.log.size() != plain.size()) ++mismatches;
      for (size_t i = 0; i < std::min(kd.log.size(), plain.size()); ++i) {
        ++compared;
        if (kd.log[i].loss != plain[i].loss || kd.log[i].l_qe != plain[i].l_qe) ++mismatches;
      }
      if (nn::ParameterChecksum(a->Parameters()) != nn::ParameterChecksum(b->Parameters())) ++checksum_mismatches;
    }
  }
  return {mismatches == 0 && checksum_mismatches == 0,
          fmt::format("{} epoch losses compared over 2 tasks x 3 seeds: {} differ; final weights differ in {} runs",
                      compared, mismatches, checksum_mismatches)};
}

namespace {

int RunCli(const std::string& args, const fs::path& log) {
  const std::string cmd = fmt::format("\"{}\" {} > \"{}\" 2>&1", STRUCTRTL_CLI_PATH, args, log.string());
  const int status = std::system(cmd.c_str());
  return status;
}

}  // namespace

// Runs the whole CLI pipeline twice. The second run passes each stage the
// config snapshot the first run wrote for that stage, with the same seed
// and thread count, then every metric JSON (and log) is compared byte for
// byte.
Outcome Determinism() {
  const fs::path root = ScratchDir("determinism");
  const fs::path base_cfg = root / "base.json";
  WriteFile(base_cfg.string(), R"({
  "corpus": {"count": 16, "seed": 3, "mix": {"tiny": 1.0, "small": 0.0, "medium": 0.0}},
  "pretrain": {"epochs": 3},
  "regressor": {"epochs": 4},
  "teacher": {"training": {"epochs": 4}}
})");
  struct Stage {
    std::string dir;
    std::string args;  // after the subcommand; {r} is the run directory
  };
  const std::vector<std::pair<std::string, Stage>> stages = {
      {"gen-synth", {"corpus", "--out {r}/corpus"}},
      {"pretrain", {"pre", "--corpus {r}/corpus/manifest.csv --out {r}/pre"}},
      {"train-teacher", {"teacher", "--corpus {r}/corpus/manifest.csv --task delay --out {r}/teacher"}},
      {"train", {"train", "--corpus {r}/corpus/manifest.csv --task delay --encoder {r}/pre/encoder.ckpt --out {r}/train"}},
      {"distill",
       {"kd", "--corpus {r}/corpus/manifest.csv --task delay --teacher {r}/teacher/teacher.ckpt "
              "--encoder {r}/pre/encoder.ckpt --out {r}/kd"}},
      {"eval", {"eval", "--ckpt {r}/kd/student.ckpt --corpus {r}/corpus/manifest.csv --split all --out {r}/eval"}},
  };
  std::vector<std::string> failures;
  for (const char* run : {"a", "b"}) {
    const fs::path r = root / run;
    fs::create_directories(r);
    for (const auto& [cmd, stage] : stages) {
      const std::string config = std::string(run) == "a"
                                     ? fmt::format("--desk-scale --config \"{}\"", base_cfg.string())
                                     : fmt::format("--config \"{}\"", (root / "a" / stage.dir / "config.json").string());
      std::string args = stage.args;
      for (size_t p; (p = args.find("{r}")) != std::string::npos;) args.replace(p, 3, "\"" + r.string() + "\"");
      const int status = RunCli(fmt::format("{} --seed 7 --threads 1 --log-level warn {} {}", config, cmd, args),
                                r / (stage.dir + ".log"));
      if (status != 0) failures.push_back(fmt::format("run {} {} exited {}", run, cmd, status));
    }
  }
  int metric_files = 0, compared = 0;
  for (const auto& e : fs::recursive_directory_iterator(root / "a")) {
    if (!e.is_regular_file()) continue;
    const fs::path rel = fs::relative(e.path(), root / "a");
    const std::string ext = rel.extension().string();
    // Snapshots record their own argv and logs their paths; everything
    // else must match byte for byte.
    if (rel.filename() == "config.json" || ext == ".log") continue;
    const fs::path other = root / "b" / rel;
    ++compared;
    metric_files += rel.filename() == "metrics.json";
    if (!fs::exists(other) || ReadFile(e.path().string()) != ReadFile(other.string())) {
      failures.push_back(rel.string() + " differs");
    }
  }
  if (metric_files < 4) failures.push_back(fmt::format("only {} metrics.json files produced", metric_files));
  std::string detail = fmt::format("{} stages run twice; {} output files compared ({} metrics.json)", stages.size(),
                                   compared, metric_files);
  for (size_t i = 0; i < std::min<size_t>(failures.size(), 5); ++i) detail += "; FAILED " + failures[i];
  if (failures.empty()) fs::remove_all(root);
  return {failures.empty(), detail};
}

}  // namespace structrtl::acceptance
