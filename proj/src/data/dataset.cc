#include "structrtl/data/dataset.h"

#include <cmath>
#include <filesystem>
#include <numeric>
#include <sstream>

#include <spdlog/fmt/fmt.h>

#include "structrtl/data/graph_input.h"
#include "structrtl/data/label_oracle.h"
#include "structrtl/data/lowering.h"
#include "structrtl/rtl/diagnostics.h"
#include "structrtl/rtl/elaborate.h"
#include "structrtl/util/io.h"

namespace structrtl::data {

namespace fs = std::filesystem;

namespace {

std::vector<std::string> SplitCsvLine(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::optional<double> ParseLabel(const std::string& cell, const std::string& where) {
  if (cell.empty()) return std::nullopt;
  size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(cell, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != cell.size()) throw Error(where + ": label '" + cell + "' is not a number");
  if (!(v > 0.0)) throw Error(where + ": labels must be positive");
  return v;
}

std::string FormatLabel(const std::optional<double>& v) { return v ? fmt::format("{:.17g}", *v) : ""; }

}  // namespace

std::vector<DesignRecord> ReadManifest(const std::string& path) {
  std::istringstream in(ReadFile(path));
  const fs::path base = fs::path(path).parent_path();
  std::string line;
  if (!std::getline(in, line)) throw Error(path + ": empty manifest");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "design_id,verilog,netlist,area,delay") {
    throw Error(path + ":1: expected header design_id,verilog,netlist,area,delay");
  }
  std::vector<DesignRecord> records;
  int line_no = 1;
  auto resolve = [&](const std::string& p) {
    if (p.empty() || fs::path(p).is_absolute()) return p;
    return (base / p).string();
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> cells = SplitCsvLine(line);
    const std::string where = path + ":" + std::to_string(line_no);
    if (cells.size() != 5) throw Error(where + ": expected 5 columns, found " + std::to_string(cells.size()));
    DesignRecord r;
    r.design_id = cells[0];
    r.verilog = resolve(cells[1]);
    r.netlist = resolve(cells[2]);
    r.area = ParseLabel(cells[3], where);
    r.delay = ParseLabel(cells[4], where);
    if (r.design_id.empty() || cells[1].empty()) throw Error(where + ": design_id and verilog are required");
    records.push_back(std::move(r));
  }
  return records;
}

void WriteManifest(const std::string& path, const std::vector<DesignRecord>& records) {
  std::ostringstream out;
  out << "design_id,verilog,netlist,area,delay\n";
  for (const DesignRecord& r : records) {
    out << r.design_id << ',' << r.verilog << ',' << r.netlist << ',' << FormatLabel(r.area) << ','
        << FormatLabel(r.delay) << '\n';
  }
  WriteFile(path, out.str());
}

std::vector<Split> AssignSplit(size_t n, double ratio, uint64_t seed) {
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  rng.Shuffle(order);
  const size_t num_train = static_cast<size_t>(std::llround(ratio * static_cast<double>(n)));
  std::vector<Split> out(n, Split::kVal);
  for (size_t i = 0; i < num_train && i < n; ++i) out[order[i]] = Split::kTrain;
  return out;
}

std::vector<nn::GraphInput> Dataset::Inputs(const std::vector<size_t>& idx) const {
  std::vector<nn::GraphInput> out;
  for (size_t i : idx) out.push_back(inputs[i]);
  return out;
}

std::vector<nn::GraphInput> Dataset::Netlists(const std::vector<size_t>& idx) const {
  std::vector<nn::GraphInput> out;
  for (size_t i : idx) out.push_back(netlists[i]);
  return out;
}

std::vector<double> Dataset::LogTargets(quality::Task task, const std::vector<size_t>& idx) const {
  std::vector<double> out;
  for (size_t i : idx) out.push_back(quality::LogTransform(task == quality::Task::kArea ? area[i] : delay[i]));
  return out;
}

namespace {

void AddDesign(Dataset& ds, DesignRecord record, const std::string& source, const pm::CellLibrary& lib,
               const DatasetOptions& options) {
  cdfg::Cdfg g;
  try {
    g = rtl::CompileVerilog(source);
  } catch (const rtl::FrontendError& e) {
    throw Error(record.verilog + ":" + e.what());
  }
  const QualityLabels oracle = record.area && record.delay ? QualityLabels{} : LabelOracle(g, lib);
  ds.area.push_back(record.area.value_or(oracle.area));
  ds.delay.push_back(record.delay.value_or(oracle.delay));
  ds.inputs.push_back(BuildGraphInput(g, options.pe_dim));
  if (options.load_netlists) {
    const pm::Netlist netlist =
        record.netlist.empty() ? LowerToNetlist(g, lib) : pm::ParseNetlist(ReadFile(record.netlist), lib);
    ds.netlists.push_back(BuildNetlistInput(netlist, lib));
  }
  ds.graphs.push_back(std::move(g));
  ds.records.push_back(std::move(record));
}

void FinishSplit(Dataset& ds, const DatasetOptions& options) {
  const std::vector<Split> split = AssignSplit(ds.records.size(), options.train_ratio, options.split_seed);
  for (size_t i = 0; i < split.size(); ++i) {
    ds.records[i].split = split[i];
    (split[i] == Split::kTrain ? ds.train : ds.val).push_back(i);
  }
}

}  // namespace

Dataset LoadDataset(const std::string& manifest_path, const pm::CellLibrary& lib, const DatasetOptions& options) {
  Dataset ds;
  for (DesignRecord& r : ReadManifest(manifest_path)) {
    const std::string source = ReadFile(r.verilog);
    AddDesign(ds, std::move(r), source, lib, options);
  }
  FinishSplit(ds, options);
  return ds;
}

Dataset DatasetFromSources(const std::vector<std::string>& sources, const pm::CellLibrary& lib,
                           const DatasetOptions& options) {
  Dataset ds;
  for (size_t i = 0; i < sources.size(); ++i) {
    DesignRecord r;
    r.design_id = fmt::format("d{:04d}", i);
    r.verilog = r.design_id + ".v";
    AddDesign(ds, std::move(r), sources[i], lib, options);
  }
  FinishSplit(ds, options);
  return ds;
}

std::vector<std::string> GenerateSources(int count, uint64_t seed, const SizeMix& mix) {
  Rng rng(seed);
  const double total = mix.tiny + mix.small + mix.medium;
  std::vector<std::string> out;
  for (int i = 0; i < count; ++i) {
    Rng design_rng(rng.Fork());
    const double u = design_rng.Uniform() * total;
    const SizeClass cls = u < mix.tiny ? SizeClass::kTiny
                          : u < mix.tiny + mix.small ? SizeClass::kSmall
                                                     : SizeClass::kMedium;
    out.push_back(GenerateDesign(design_rng, cls, fmt::format("d{:04d}", i)));
  }
  return out;
}

std::string GenerateCorpus(const std::string& out_dir, int count, uint64_t seed, const pm::CellLibrary& lib,
                           const SizeMix& mix) {
  const fs::path root(out_dir);
  std::vector<DesignRecord> records;
  const std::vector<std::string> sources = GenerateSources(count, seed, mix);
  for (size_t i = 0; i < sources.size(); ++i) {
    DesignRecord r;
    r.design_id = fmt::format("d{:04d}", i);
    r.verilog = "designs/" + r.design_id + ".v";
    r.netlist = "netlists/" + r.design_id + ".json";
    const cdfg::Cdfg g = rtl::CompileVerilog(sources[i]);
    const QualityLabels labels = LabelOracle(g, lib);
    r.area = labels.area;
    r.delay = labels.delay;
    WriteFile((root / r.verilog).string(), sources[i]);
    WriteFile((root / r.netlist).string(), pm::ToJson(LowerToNetlist(g, lib)));
    records.push_back(std::move(r));
  }
  const std::string manifest = (root / "manifest.csv").string();
  WriteManifest(manifest, records);
  return manifest;
}

}  // namespace structrtl::data
