#ifndef STRUCTRTL_CDFG_ANALYSIS_H_
#define STRUCTRTL_CDFG_ANALYSIS_H_

#include <array>
#include <string>
#include <vector>

#include "structrtl/cdfg/cdfg.h"
#include "structrtl/util/matrix.h"

namespace structrtl::cdfg {

struct Violation {
  std::string kind;  // e.g. "dangling edge", "combinational cycle"
  std::string detail;
};

// Reports every violated graph invariant; an empty result means valid.
std::vector<Violation> Validate(const Cdfg& g);

// Keep-mask that drops Reg nodes: the register-cut view of the graph.
std::vector<bool> RegisterCutMask(const Cdfg& g);

// Width feature appended after the one-hot block.
double WidthFeature(int width);

inline constexpr int kNodeFeatureDim = kNumNodeTypes + 1;

// N x 33: one-hot node type followed by log2(1 + width).
Matrix InitNodeFeatures(const Cdfg& g);

// Longest path, in edges, of the register-cut graph. Throws Error if the
// cut graph is cyclic (the graph failed validation).
int LongestCombinationalPath(const Cdfg& g);

struct BaselineFeatures {
  std::array<double, kNumNodeTypes> total_bits_per_type{};
  std::array<double, kNumNodeTypes> count_per_type{};
  double avg_wire_width = 0.0;
  int longest_comb_path_len = 0;

  // Flat layout: bits[32], counts[32], avg_wire_width, path length.
  std::vector<double> Flatten() const;
};

BaselineFeatures ComputeBaselineFeatures(const Cdfg& g);

struct NodeTypeHistogram {
  std::array<long long, kNumNodeTypes> counts{};
  long long total = 0;

  void Add(const Cdfg& g);
  // Percentage share of `type`; 0 when the histogram is empty.
  double Percent(NodeType type) const;
  // Fixed-width text table: type, count, ratio.
  std::string Format() const;
};

NodeTypeHistogram ComputeHistogram(const std::vector<Cdfg>& corpus);

}  // namespace structrtl::cdfg

#endif  // STRUCTRTL_CDFG_ANALYSIS_H_
