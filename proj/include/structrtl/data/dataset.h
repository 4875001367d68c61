#ifndef STRUCTRTL_DATA_DATASET_H_
#define STRUCTRTL_DATA_DATASET_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "structrtl/cdfg/cdfg.h"
#include "structrtl/data/generator.h"
#include "structrtl/nn/encoder.h"
#include "structrtl/pm/netlist.h"
#include "structrtl/quality/regressor.h"

namespace structrtl::data {

enum class Split { kTrain, kVal };

struct DesignRecord {
  std::string design_id;
  std::string verilog;  // path
  std::string netlist;  // path, may be empty
  std::optional<double> area;
  std::optional<double> delay;
  Split split = Split::kTrain;
};

// CSV with header design_id,verilog,netlist,area,delay. Relative paths
// are resolved against the manifest's directory; empty label cells stay
// unset. Labels must be positive.
std::vector<DesignRecord> ReadManifest(const std::string& path);
// Paths are written as stored in the records.
void WriteManifest(const std::string& path, const std::vector<DesignRecord>& records);

// Deterministic shuffle under `seed`; the first round(ratio * n) shuffled
// positions are train.
std::vector<Split> AssignSplit(size_t n, double ratio, uint64_t seed);

struct DatasetOptions {
  double train_ratio = 0.8;
  uint64_t split_seed = 0;
  bool load_netlists = true;
  int pe_dim = 16;
};

// A manifest compiled into model inputs. Missing labels come from the
// label oracle; missing netlists are lowered from the CDFG.
struct Dataset {
  std::vector<DesignRecord> records;
  std::vector<cdfg::Cdfg> graphs;
  std::vector<nn::GraphInput> inputs;
  std::vector<nn::GraphInput> netlists;
  std::vector<double> area;
  std::vector<double> delay;
  std::vector<size_t> train;
  std::vector<size_t> val;

  const std::vector<size_t>& indices(Split s) const { return s == Split::kTrain ? train : val; }
  std::vector<nn::GraphInput> Inputs(const std::vector<size_t>& idx) const;
  std::vector<nn::GraphInput> Netlists(const std::vector<size_t>& idx) const;
  // Natural-log labels of `task`.
  std::vector<double> LogTargets(quality::Task task, const std::vector<size_t>& idx) const;
};

Dataset LoadDataset(const std::string& manifest_path, const pm::CellLibrary& lib,
                    const DatasetOptions& options = {});

// Builds a dataset from in-memory sources (ids d0000, d0001, ...); labels
// and netlists from the oracle and the lowering.
Dataset DatasetFromSources(const std::vector<std::string>& sources, const pm::CellLibrary& lib,
                           const DatasetOptions& options = {});

struct SizeMix {
  double tiny = 0.45;
  double small = 0.45;
  double medium = 0.10;
};

// Draws `count` designs. Each design uses its own RNG stream forked from
// `seed`, so the i-th design does not depend on the mix of earlier ones.
std::vector<std::string> GenerateSources(int count, uint64_t seed, const SizeMix& mix = {});

// Writes designs/<id>.v, netlists/<id>.json and manifest.csv (oracle
// labels filled in) under `out_dir`; returns the manifest path.
std::string GenerateCorpus(const std::string& out_dir, int count, uint64_t seed, const pm::CellLibrary& lib,
                           const SizeMix& mix = {});

}  // namespace structrtl::data

#endif  // STRUCTRTL_DATA_DATASET_H_
