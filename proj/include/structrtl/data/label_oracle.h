#ifndef STRUCTRTL_DATA_LABEL_ORACLE_H_
#define STRUCTRTL_DATA_LABEL_ORACLE_H_

#include <array>
#include <string>
#include <vector>

#include "structrtl/cdfg/cdfg.h"
#include "structrtl/pm/netlist.h"

namespace structrtl::data {

// Library cells that implement one output bit of a node, as a chain: the
// first cell reads operand bits, each later cell reads the previous
// cell's output plus further operand bits. Wire, Const, Concat and
// PartSelect are pure wiring.
const std::vector<std::string>& BitRecipe(cdfg::NodeType type);

inline constexpr double kBaseWireDelay = 0.5;

struct OracleCosts {
  std::array<double, cdfg::kNumNodeTypes> area_per_bit{};
  // Sum of the recipe chain's worst pin delays. Port buffers (Input,
  // Output) are not timed; a Reg contributes its flop delay where a path
  // starts at it.
  std::array<double, cdfg::kNumNodeTypes> delay{};
  double base_delay = kBaseWireDelay;
};

OracleCosts DeriveCosts(const pm::CellLibrary& lib);

struct QualityLabels {
  double area = 0.0;
  double delay = 0.0;
};

// area = sum over nodes of area_per_bit(type) * width.
double OracleArea(const cdfg::Cdfg& g, const OracleCosts& costs);

// base + heaviest node-weighted path once every Reg is split into a source
// copy (out-edges, flop delay) and a sink copy (in-edges, weight 0).
double OracleDelay(const cdfg::Cdfg& g, const OracleCosts& costs);

// OracleArea (or the smallest cell's area when that is zero) and
// OracleDelay under costs derived from `lib`.
QualityLabels LabelOracle(const cdfg::Cdfg& g, const pm::CellLibrary& lib);

}  // namespace structrtl::data

#endif  // STRUCTRTL_DATA_LABEL_ORACLE_H_
