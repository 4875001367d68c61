#include "structrtl/data/label_oracle.h"

#include <algorithm>
#include <map>

#include "structrtl/util/error.h"

namespace structrtl::data {

using cdfg::NodeType;

const std::vector<std::string>& BitRecipe(NodeType type) {
  static const auto* recipes = [] {
    auto* r = new std::map<NodeType, std::vector<std::string>>;
    const std::vector<std::string> compare = {"XOR2", "AND2", "OR2"};
    const std::vector<std::string> adder = {"XOR2", "XOR2", "AND2", "OR2"};
    const std::vector<std::string> divider = {"XOR2", "AND2", "OR2", "XOR2", "AND2", "OR2", "XOR2", "NAND2"};
    (*r)[NodeType::kLNot] = {"NOR2"};
    (*r)[NodeType::kNot] = {"INV"};
    (*r)[NodeType::kURxor] = {"XOR2"};
    (*r)[NodeType::kURand] = {"AND2"};
    (*r)[NodeType::kURor] = {"OR2"};
    (*r)[NodeType::kLt] = compare;
    (*r)[NodeType::kLe] = compare;
    (*r)[NodeType::kGt] = compare;
    (*r)[NodeType::kGe] = compare;
    (*r)[NodeType::kAdd] = adder;
    (*r)[NodeType::kSub] = adder;
    (*r)[NodeType::kMul] = {"AND2", "XOR2", "XOR2", "AND2", "OR2", "XOR2"};
    (*r)[NodeType::kDiv] = divider;
    (*r)[NodeType::kMod] = divider;
    (*r)[NodeType::kShiftLeft] = {"AND2", "OR2"};
    (*r)[NodeType::kShiftRight] = {"AND2", "OR2"};
    (*r)[NodeType::kAnd] = {"AND2"};
    (*r)[NodeType::kOr] = {"OR2"};
    (*r)[NodeType::kEq] = {"XOR2", "NOR2"};
    (*r)[NodeType::kNeq] = {"XOR2", "OR2"};
    (*r)[NodeType::kBitAnd] = {"AND2"};
    (*r)[NodeType::kBitOr] = {"OR2"};
    (*r)[NodeType::kBitXor] = {"XOR2"};
    (*r)[NodeType::kBitNXor] = {"XOR2", "INV"};
    (*r)[NodeType::kPartSelect] = {};
    (*r)[NodeType::kConcat] = {};
    (*r)[NodeType::kCond] = {"AND2", "OR2"};
    (*r)[NodeType::kWire] = {};
    (*r)[NodeType::kConst] = {};
    (*r)[NodeType::kInput] = {"BUF"};
    (*r)[NodeType::kOutput] = {"BUF"};
    (*r)[NodeType::kReg] = {"DFF"};
    return r;
  }();
  return recipes->at(type);
}

OracleCosts DeriveCosts(const pm::CellLibrary& lib) {
  OracleCosts c;
  for (int t = 0; t < cdfg::kNumNodeTypes; ++t) {
    const NodeType type = cdfg::FromCode(t);
    for (const std::string& cell : BitRecipe(type)) {
      if (lib.Find(cell) < 0) throw SchemaError("/cells", "library lacks cell " + cell + " needed by the oracle");
      c.area_per_bit[t] += lib.at(cell).area;
      c.delay[t] += lib.at(cell).MaxPinDelay();
    }
  }
  c.delay[cdfg::Code(NodeType::kInput)] = 0.0;
  c.delay[cdfg::Code(NodeType::kOutput)] = 0.0;
  return c;
}

double OracleArea(const cdfg::Cdfg& g, const OracleCosts& costs) {
  double area = 0.0;
  for (const cdfg::Node& n : g.nodes()) area += costs.area_per_bit[cdfg::Code(n.type)] * n.width;
  return area;
}

double OracleDelay(const cdfg::Cdfg& g, const OracleCosts& costs) {
  const int n = g.num_nodes();
  // Kahn order over the Reg-split graph: edges into a Reg end at its sink
  // copy, so they never delay the Reg's own source copy.
  std::vector<std::vector<int>> succ(n);
  std::vector<int> indegree(n, 0);
  for (const cdfg::Edge& e : g.edges()) {
    if (g.node(e.dst).type == NodeType::kReg) continue;
    succ[e.src].push_back(e.dst);
    ++indegree[e.dst];
  }
  std::vector<double> arrival(n, 0.0);
  std::vector<int> queue;
  for (int v = 0; v < n; ++v) {
    if (indegree[v] == 0) queue.push_back(v);
  }
  std::vector<double> start(n);
  for (int v = 0; v < n; ++v) start[v] = costs.delay[cdfg::Code(g.node(v).type)];
  for (int v = 0; v < n; ++v) arrival[v] = start[v];
  for (size_t head = 0; head < queue.size(); ++head) {
    const int u = queue[head];
    for (int v : succ[u]) {
      arrival[v] = std::max(arrival[v], arrival[u] + start[v]);
      if (--indegree[v] == 0) queue.push_back(v);
    }
  }
  if (static_cast<int>(queue.size()) != n) throw Error("oracle delay needs a graph without combinational cycles");
  double worst = 0.0;
  for (int v = 0; v < n; ++v) worst = std::max(worst, arrival[v]);
  // Sink copies of registers weigh nothing: their arrival is the max over
  // their drivers, already covered above.
  return costs.base_delay + worst;
}

QualityLabels LabelOracle(const cdfg::Cdfg& g, const pm::CellLibrary& lib) {
  const OracleCosts costs = DeriveCosts(lib);
  double area = OracleArea(g, costs);
  if (area == 0.0) {
    // Only wiring and constants: charge one smallest cell so labels stay positive.
    area = lib.cells().front().area;
    for (const pm::CellType& c : lib.cells()) area = std::min(area, c.area);
  }
  return {area, OracleDelay(g, costs)};
}

}  // namespace structrtl::data
