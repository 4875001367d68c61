// structrtl: command-line entry point for the whole toolchain.

#include <algorithm>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <spdlog/fmt/fmt.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "structrtl/cdfg/analysis.h"
#include "structrtl/cdfg/serialize.h"
#include "structrtl/cli/experiment.h"
#include "structrtl/data/dataset.h"
#include "structrtl/data/generator.h"
#include "structrtl/data/graph_input.h"
#include "structrtl/nn/checkpoint.h"
#include "structrtl/pm/netlist.h"
#include "structrtl/quality/metrics.h"
#include "structrtl/rtl/ast.h"
#include "structrtl/rtl/diagnostics.h"
#include "structrtl/rtl/elaborate.h"
#include "structrtl/rtl/parser.h"
#include "structrtl/spectral/laplacian.h"
#include "structrtl/util/io.h"

namespace fs = std::filesystem;
using namespace structrtl;

namespace {

const std::vector<std::string> kCommands = {"parse", "cdfg", "stats", "pe", "gen-synth", "pretrain",
                                            "train-teacher", "train", "distill", "eval", "predict"};

// Arguments that parse but do not fit together; exit code 2.
class UsageError : public Error {
 public:
  using Error::Error;
};

struct Globals {
  uint64_t seed = 0;
  bool seed_set = false;
  std::string config;
  int threads = 1;
  std::string log_level = "info";
  bool desk_scale = false;
  std::string library;
  std::vector<std::string> argv;
};

size_t EditDistance(const std::string& a, const std::string& b) {
  std::vector<size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (size_t j = 1; j <= b.size(); ++j) {
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

// Closest subcommand within two edits, else one that starts with `word`.
std::string Suggest(const std::string& word) {
  std::string best;
  size_t best_d = 3;
  for (const std::string& c : kCommands) {
    const size_t d = EditDistance(word, c);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  if (best.empty()) {
    for (const std::string& c : kCommands) {
      if (c.rfind(word, 0) == 0) return c;
    }
  }
  return best;
}

cli::ExperimentConfig ResolveConfig(const Globals& g) {
  cli::ExperimentConfig c = g.desk_scale ? cli::DeskScale() : cli::ExperimentConfig{};
  if (!g.config.empty()) c = cli::LoadConfigFile(c, g.config);
  if (g.seed_set) c.seed = g.seed;
  return c;
}

pm::CellLibrary Library(const Globals& g) {
  return g.library.empty() ? pm::CellLibrary::Default() : pm::CellLibraryFromJson(ReadFile(g.library));
}

nlohmann::json RunInfo(const Globals& g, const std::string& command) {
  return {{"command", command}, {"argv", g.argv}, {"threads", g.threads}, {"desk_scale", g.desk_scale}};
}

void Snapshot(const Globals& g, const cli::ExperimentConfig& c, const std::string& command, const std::string& dir) {
  cli::WriteSnapshot(dir, c, RunInfo(g, command));
}

// Snapshot beside a single output file: <out>.config.json.
void SnapshotForFile(const Globals& g, const cli::ExperimentConfig& c, const std::string& command,
                     const std::string& out) {
  nlohmann::json j = cli::ToJson(c);
  j["run"] = RunInfo(g, command);
  WriteFile(out + ".config.json", j.dump(2) + "\n");
}

void Emit(const std::string& out, const std::string& text) {
  if (out.empty()) {
    fmt::print("{}", text);
  } else {
    WriteFile(out, text);
    spdlog::info("wrote {}", out);
  }
}

cdfg::Cdfg CompileFile(const std::string& path) {
  const std::string source = ReadFile(path);
  try {
    return rtl::CompileVerilog(source);
  } catch (const rtl::FrontendError& e) {
    throw Error(path + ":" + e.what());
  }
}

std::string Join(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

data::Dataset LoadCorpus(const std::string& manifest, const cli::ExperimentConfig& c, const pm::CellLibrary& lib,
                         bool netlists) {
  data::DatasetOptions o = c.DatasetOptions();
  o.load_netlists = netlists;
  data::Dataset ds = data::LoadDataset(manifest, lib, o);
  spdlog::info("loaded {} designs ({} train / {} val)", ds.records.size(), ds.train.size(), ds.val.size());
  return ds;
}

const std::vector<size_t>& SplitIndices(const data::Dataset& ds, const std::string& split, std::vector<size_t>& all) {
  if (split == "train") return ds.train;
  if (split == "val") return ds.val;
  all.clear();
  for (size_t i = 0; i < ds.records.size(); ++i) all.push_back(i);
  return all;
}

void LogReport(const std::string& what, const quality::MetricReport& r) {
  spdlog::info("{}: MAE {:.4f} MAPE {:.4f} R2 {:.4f} RRSE {:.4f} (n={})", what, r.mae, r.mape, r.r2, r.rrse,
               r.n_samples);
}

}  // namespace

int main(int argc, char** argv) {
  auto logger = spdlog::stderr_color_mt("structrtl");
  spdlog::set_default_logger(logger);

  Globals g;
  g.argv.assign(argv + 1, argv + argc);

  CLI::App app{"structrtl: Verilog to CDFG compiler and graph models for post-synthesis quality estimation"};
  app.set_version_flag("--version", "structrtl 1.0");
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option_function<uint64_t>(
      "--seed", [&](uint64_t s) { g.seed = s; g.seed_set = true; }, "Random seed (overrides the config)");
  app.add_option("--config", g.config, "JSON config file overlaid on the defaults")->check(CLI::ExistingFile);
  app.add_option("--threads", g.threads, "Worker threads (execution is serial; recorded in the snapshot)")
      ->check(CLI::PositiveNumber);
  app.add_option("--log-level", g.log_level, "trace, debug, info, warn, error or off")
      ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "off"}));
  app.add_flag("--desk-scale", g.desk_scale, "Start from the small single-core preset instead of full scale");
  app.add_option("--library", g.library, "Cell library JSON (default: built-in 8-cell library)")
      ->check(CLI::ExistingFile);

  std::function<void()> run;

  // parse
  std::string in_file, out, emit = "cdfg";
  auto* parse = app.add_subcommand("parse", "Parse and elaborate one Verilog file");
  parse->add_option("file", in_file, "Verilog source")->required()->check(CLI::ExistingFile);
  parse->add_option("--emit", emit, "ast or cdfg")->check(CLI::IsMember({"ast", "cdfg"}));
  parse->add_option("--out", out, "Output path (default stdout)");
  parse->callback([&] {
    run = [&] {
      const std::string source = ReadFile(in_file);
      std::string text;
      try {
        text = emit == "ast" ? rtl::ToString(rtl::ParseModule(source)) : cdfg::ToJson(rtl::CompileVerilog(source));
      } catch (const rtl::FrontendError& e) {
        throw Error(in_file + ":" + e.what());
      }
      Emit(out, text);
      if (!out.empty()) SnapshotForFile(g, ResolveConfig(g), "parse", out);
    };
  });

  // cdfg
  std::string dot, json_out;
  auto* cdfg_cmd = app.add_subcommand("cdfg", "Compile Verilog to CDFG JSON and/or DOT");
  cdfg_cmd->add_option("file", in_file, "Verilog source")->required()->check(CLI::ExistingFile);
  cdfg_cmd->add_option("--json", json_out, "CDFG JSON output");
  cdfg_cmd->add_option("--dot", dot, "Graphviz DOT output");
  cdfg_cmd->callback([&] {
    run = [&] {
      const cdfg::Cdfg graph = CompileFile(in_file);
      if (json_out.empty() && dot.empty()) {
        Emit("", cdfg::ToJson(graph));
        return;
      }
      const cli::ExperimentConfig c = ResolveConfig(g);
      if (!json_out.empty()) {
        Emit(json_out, cdfg::ToJson(graph));
        SnapshotForFile(g, c, "cdfg", json_out);
      }
      if (!dot.empty()) {
        Emit(dot, cdfg::ToDot(graph));
        SnapshotForFile(g, c, "cdfg", dot);
      }
    };
  });

  // stats
  std::vector<std::string> stat_inputs;
  std::string features_out;
  auto* stats = app.add_subcommand("stats", "Node-type histogram and baseline features of designs");
  stats->add_option("inputs", stat_inputs, "Verilog files or a manifest CSV")->required()->check(CLI::ExistingFile);
  stats->add_option("--out", out, "Histogram table output (default stdout)");
  stats->add_option("--features", features_out, "Per-design baseline feature CSV");
  stats->callback([&] {
    run = [&] {
      std::vector<std::string> ids, files;
      for (const std::string& path : stat_inputs) {
        if (fs::path(path).extension() == ".csv") {
          for (const data::DesignRecord& r : data::ReadManifest(path)) {
            ids.push_back(r.design_id);
            files.push_back(r.verilog);
          }
        } else {
          ids.push_back(fs::path(path).stem().string());
          files.push_back(path);
        }
      }
      std::vector<cdfg::Cdfg> graphs;
      for (const std::string& f : files) graphs.push_back(CompileFile(f));
      const cdfg::NodeTypeHistogram h = cdfg::ComputeHistogram(graphs);
      Emit(out, fmt::format("designs {}\n", graphs.size()) + h.Format());
      const cli::ExperimentConfig c = ResolveConfig(g);
      if (!out.empty()) SnapshotForFile(g, c, "stats", out);
      if (!features_out.empty()) {
        std::string csv = "design_id,nodes,edges";
        for (std::string_view n : cdfg::kNodeTypeNames) csv += fmt::format(",bits_{}", n);
        for (std::string_view n : cdfg::kNodeTypeNames) csv += fmt::format(",count_{}", n);
        csv += ",avg_wire_width,longest_comb_path\n";
        for (size_t i = 0; i < graphs.size(); ++i) {
          csv += fmt::format("{},{},{}", ids[i], graphs[i].num_nodes(), graphs[i].num_edges());
          for (double v : cdfg::ComputeBaselineFeatures(graphs[i]).Flatten()) csv += fmt::format(",{:.17g}", v);
          csv += "\n";
        }
        WriteFile(features_out, csv);
        SnapshotForFile(g, c, "stats", features_out);
        spdlog::info("wrote {}", features_out);
      }
    };
  });

  // pe
  int pe_k = spectral::kNumEigenvectors;
  auto* pe = app.add_subcommand("pe", "Laplacian positional embeddings of a CDFG");
  pe->add_option("cdfg", in_file, "CDFG JSON (or a Verilog file)")->required()->check(CLI::ExistingFile);
  pe->add_option("--out", out, "PE JSON output")->required();
  pe->add_option("--k", pe_k, "Number of eigenvectors")->check(CLI::PositiveNumber);
  pe->callback([&] {
    run = [&] {
      const cdfg::Cdfg graph = fs::path(in_file).extension() == ".v" ? CompileFile(in_file)
                                                                      : cdfg::FromJson(ReadFile(in_file));
      Emit(out, spectral::ToJson(spectral::ComputePositionalEmbeddings(graph, pe_k)));
      SnapshotForFile(g, ResolveConfig(g), "pe", out);
    };
  });

  // gen-synth
  int count = -1;
  auto* gen = app.add_subcommand("gen-synth", "Generate a synthetic corpus with oracle labels");
  gen->add_option("--count", count, "Number of designs (default from config)");
  gen->add_option("--out", out, "Output directory")->required();
  gen->callback([&] {
    run = [&] {
      cli::ExperimentConfig c = ResolveConfig(g);
      if (count >= 0) c.corpus.count = count;
      if (g.seed_set) c.corpus.seed = g.seed;
      const std::string manifest = data::GenerateCorpus(out, c.corpus.count, c.corpus.seed, Library(g), c.corpus.mix);
      Snapshot(g, c, "gen-synth", out);
      spdlog::info("wrote {} designs, manifest {}", c.corpus.count, manifest);
    };
  });

  // pretrain
  std::string corpus, resume;
  auto* pretrain = app.add_subcommand("pretrain", "Self-supervised pretraining (masked nodes + edges)");
  pretrain->add_option("--corpus", corpus, "Manifest CSV")->required()->check(CLI::ExistingFile);
  pretrain->add_option("--out", out, "Checkpoint directory")->required();
  pretrain->add_option("--resume", resume, "Resume from a pretraining checkpoint")->check(CLI::ExistingFile);
  pretrain->callback([&] {
    run = [&] {
      const cli::ExperimentConfig c = ResolveConfig(g);
      const data::Dataset ds = LoadCorpus(corpus, c, Library(g), false);
      Snapshot(g, c, "pretrain", out);
      auto model = cli::NewEncoder(c.encoder, c.seed);
      const std::vector<nn::GraphInput> train = ds.Inputs(ds.train), val = ds.Inputs(ds.val);
      ssl::Pretrainer trainer(*model, c.pretrain, train, val, c.seed);
      if (!resume.empty()) trainer.ResumeFrom(resume);
      trainer.Run(out);
      const ssl::TaskAccuracy acc = ssl::EvaluatePretrainTasks(*model, val.empty() ? train : val, c.pretrain.mask,
                                                               c.seed, 4);
      spdlog::info("final accuracy: masked nodes {:.4f}, edges {:.4f}", acc.mnm, acc.ep);
    };
  });

  // train-teacher
  std::string task_name = "area";
  auto* teacher_cmd = app.add_subcommand("train-teacher", "Train the netlist-level teacher predictor");
  teacher_cmd->add_option("--corpus", corpus, "Manifest CSV")->required()->check(CLI::ExistingFile);
  teacher_cmd->add_option("--task", task_name, "area or delay")->check(CLI::IsMember({"area", "delay"}));
  teacher_cmd->add_option("--out", out, "Output directory")->required();
  teacher_cmd->callback([&] {
    run = [&] {
      const cli::ExperimentConfig c = ResolveConfig(g);
      const quality::Task task = quality::ParseTask(task_name);
      const data::Dataset ds = LoadCorpus(corpus, c, Library(g), true);
      Snapshot(g, c, "train-teacher", out);
      std::vector<quality::EpochLoss> log;
      auto teacher = cli::TeacherOn(c, ds, task, c.seed, &log);
      cli::SaveTeacher(Join(out, "teacher.ckpt"), *teacher, task);
      cli::WriteTrainingLog(Join(out, "train_log.csv"), log, false);
      if (ds.val.size() >= 2) {
        const cli::Evaluation e = cli::Evaluate(*teacher, ds.Netlists(ds.val), ds, ds.val, task);
        cli::WriteEvaluation(out, e);
        LogReport("teacher validation", e.report);
      }
    };
  });

  // train
  std::string encoder_ckpt;
  bool freeze = false;
  auto* train = app.add_subcommand("train", "Train the CDFG quality regressor");
  train->add_option("--corpus", corpus, "Manifest CSV")->required()->check(CLI::ExistingFile);
  train->add_option("--task", task_name, "area or delay")->check(CLI::IsMember({"area", "delay"}));
  train->add_option("--encoder", encoder_ckpt, "Pretrained encoder checkpoint (default: random init)")
      ->check(CLI::ExistingFile);
  train->add_flag("--freeze-encoder", freeze, "Train only the regression head");
  train->add_option("--out", out, "Output directory")->required();

  // distill
  std::string teacher_ckpt;
  auto* distill_cmd = app.add_subcommand("distill", "Train the CDFG regressor with teacher distillation");
  distill_cmd->add_option("--corpus", corpus, "Manifest CSV")->required()->check(CLI::ExistingFile);
  distill_cmd->add_option("--task", task_name, "area or delay")->check(CLI::IsMember({"area", "delay"}));
  distill_cmd->add_option("--teacher", teacher_ckpt, "Teacher checkpoint")->required()->check(CLI::ExistingFile);
  distill_cmd->add_option("--encoder", encoder_ckpt, "Pretrained encoder checkpoint")->check(CLI::ExistingFile);
  distill_cmd->add_flag("--freeze-encoder", freeze, "Train only the regression head");
  distill_cmd->add_option("--out", out, "Output directory")->required();

  auto student_run = [&](bool kd) {
    cli::ExperimentConfig c = ResolveConfig(g);
    if (freeze) c.regressor.freeze_encoder = true;
    const quality::Task task = quality::ParseTask(task_name);
    std::unique_ptr<pm::TeacherModel> teacher;
    if (kd) {
      quality::Task teacher_task;
      teacher = cli::LoadTeacher(teacher_ckpt, &teacher_task);
      if (teacher_task != task) {
        throw UsageError(fmt::format("teacher was trained for {}, not {}", quality::TaskName(teacher_task), task_name));
      }
    }
    const data::Dataset ds = LoadCorpus(corpus, c, Library(g), kd);
    const std::string name = kd ? "distill" : "train";
    Snapshot(g, c, name, out);
    auto model = cli::NewEncoder(c.encoder, c.seed);
    if (!encoder_ckpt.empty()) cli::LoadPretrainedEncoder(encoder_ckpt, *model);
    if (kd) {
      const distill::DistillResult r = cli::DistillOn(*teacher, *model, c, ds, task, c.seed);
      cli::WriteTrainingLog(Join(out, "train_log.csv"), r.log, true);
    } else {
      cli::WriteTrainingLog(Join(out, "train_log.csv"), cli::FinetuneOn(*model, c, ds, task, c.seed), false);
    }
    cli::SaveStudent(Join(out, "student.ckpt"), *model, task);
    if (ds.val.size() >= 2) {
      const quality::StudentRegressor student(*model, false);
      const cli::Evaluation e = cli::Evaluate(student, ds.Inputs(ds.val), ds, ds.val, task);
      cli::WriteEvaluation(out, e);
      LogReport("validation", e.report);
    }
  };
  train->callback([&] { run = [&] { student_run(false); }; });
  distill_cmd->callback([&] { run = [&] { student_run(true); }; });

  // eval
  std::string ckpt, split = "val";
  auto* eval = app.add_subcommand("eval", "Evaluate a student or teacher checkpoint");
  eval->add_option("--ckpt", ckpt, "Student or teacher checkpoint")->required()->check(CLI::ExistingFile);
  eval->add_option("--corpus", corpus, "Manifest CSV")->required()->check(CLI::ExistingFile);
  eval->add_option("--split", split, "train, val or all")->check(CLI::IsMember({"train", "val", "all"}));
  eval->add_option("--out", out, "Output directory")->required();
  eval->callback([&] {
    run = [&] {
      const cli::ExperimentConfig c = ResolveConfig(g);
      const std::string kind = nn::LoadCheckpoint(ckpt).kind;
      quality::Task task;
      std::vector<size_t> all;
      cli::Evaluation e;
      if (kind == "teacher") {
        auto teacher = cli::LoadTeacher(ckpt, &task);
        const data::Dataset ds = LoadCorpus(corpus, c, Library(g), true);
        const std::vector<size_t>& idx = SplitIndices(ds, split, all);
        e = cli::Evaluate(*teacher, ds.Netlists(idx), ds, idx, task);
      } else {
        auto model = cli::LoadStudent(ckpt, &task);
        cli::ExperimentConfig pe_cfg = c;
        pe_cfg.encoder = model->config();
        const data::Dataset ds = LoadCorpus(corpus, pe_cfg, Library(g), false);
        const std::vector<size_t>& idx = SplitIndices(ds, split, all);
        const quality::StudentRegressor student(*model, false);
        e = cli::Evaluate(student, ds.Inputs(idx), ds, idx, task);
      }
      Snapshot(g, c, "eval", out);
      cli::WriteEvaluation(out, e);
      LogReport(fmt::format("{} {} on {}", kind, quality::TaskName(task), split), e.report);
    };
  });

  // predict
  std::vector<std::string> predict_inputs;
  auto* predict = app.add_subcommand("predict", "Predict area or delay of Verilog designs");
  predict->add_option("--ckpt", ckpt, "Student checkpoint")->required()->check(CLI::ExistingFile);
  predict->add_option("files", predict_inputs, "Verilog sources")->required()->check(CLI::ExistingFile);
  predict->add_option("--out", out, "CSV output (default stdout)");
  predict->callback([&] {
    run = [&] {
      quality::Task task;
      auto model = cli::LoadStudent(ckpt, &task);
      const quality::StudentRegressor student(*model, false);
      std::string csv = fmt::format("file,log_{0},{0}\n", quality::TaskName(task));
      for (const std::string& f : predict_inputs) {
        const double p = quality::PredictQuality(student, data::BuildGraphInput(CompileFile(f), model->config().pe_dim));
        csv += fmt::format("{},{:.17g},{:.17g}\n", f, p, quality::InverseLogTransform(p));
      }
      Emit(out, csv);
      if (!out.empty()) SnapshotForFile(g, ResolveConfig(g), "predict", out);
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    // The first bare word names the subcommand; point at a close match.
    for (int i = 1; i < argc; ++i) {
      const std::string word = argv[i];
      if (word == "--seed" || word == "--config" || word == "--threads" || word == "--log-level" ||
          word == "--library") {
        ++i;
        continue;
      }
      if (word.empty() || word[0] == '-') continue;
      if (std::find(kCommands.begin(), kCommands.end(), word) != kCommands.end()) break;
      const std::string guess = Suggest(word);
      if (guess.empty()) {
        fmt::print(stderr, "unknown subcommand '{}'; run with --help for the list\n", word);
      } else {
        fmt::print(stderr, "unknown subcommand '{}'; did you mean '{}'?\n", word, guess);
      }
      return 2;
    }
    app.exit(e);
    return 2;
  }

  spdlog::set_level(spdlog::level::from_str(g.log_level));
  if (g.threads > 1) spdlog::warn("execution is serial; --threads {} is recorded but not used", g.threads);
  try {
    if (run) run();
  } catch (const UsageError& e) {
    spdlog::error("{}", e.what());
    return 2;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return 0;
}
