#include "structrtl/cdfg/analysis.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>
#include <tuple>

#include "structrtl/util/error.h"

namespace structrtl::cdfg {
namespace {

// Kahn's algorithm over the kept subgraph. Returns the topological order;
// its size is smaller than the kept count iff the subgraph has a cycle.
std::vector<int> TopoOrder(const std::vector<std::vector<int>>& succ,
                           const std::vector<bool>& keep) {
  const int n = static_cast<int>(succ.size());
  std::vector<int> indeg(n, 0);
  for (int u = 0; u < n; ++u) {
    for (int v : succ[u]) ++indeg[v];
  }
  std::vector<int> order;
  std::vector<int> ready;
  for (int u = n - 1; u >= 0; --u) {
    if (keep[u] && indeg[u] == 0) ready.push_back(u);
  }
  while (!ready.empty()) {
    const int u = ready.back();
    ready.pop_back();
    order.push_back(u);
    for (int v : succ[u]) {
      if (--indeg[v] == 0) ready.push_back(v);
    }
  }
  return order;
}

}  // namespace

std::vector<bool> RegisterCutMask(const Cdfg& g) {
  std::vector<bool> keep(g.num_nodes(), true);
  for (const Node& n : g.nodes()) {
    if (n.type == NodeType::kReg) keep[n.id] = false;
  }
  return keep;
}

std::vector<Violation> Validate(const Cdfg& g) {
  std::vector<Violation> out;
  const int n = g.num_nodes();
  for (int i = 0; i < n; ++i) {
    const Node& node = g.node(i);
    if (node.id != i) {
      out.push_back({"non-dense id", "node at index " + std::to_string(i) +
                                         " has id " + std::to_string(node.id)});
    }
    if (node.width < 1) {
      out.push_back({"bad width", "node " + std::to_string(i) + " has width " +
                                      std::to_string(node.width)});
    }
    if (node.type == NodeType::kConst && !node.attrs.value) {
      out.push_back({"missing const value", "node " + std::to_string(i)});
    }
  }

  bool edges_in_range = true;
  std::set<std::tuple<int, int, int>> seen;
  for (const Edge& e : g.edges()) {
    const std::string label = std::to_string(e.src) + "->" + std::to_string(e.dst);
    if (e.src < 0 || e.src >= n || e.dst < 0 || e.dst >= n) {
      out.push_back({"dangling edge", label});
      edges_in_range = false;
      continue;
    }
    if (!seen.insert({e.src, e.dst, e.operand_index}).second) {
      out.push_back({"duplicate edge", label + " operand " +
                                           std::to_string(e.operand_index)});
    }
    if (e.operand_index < 0) {
      out.push_back({"negative operand index", label});
    }
    if (e.src == e.dst && g.node(e.dst).type != NodeType::kReg) {
      out.push_back({"self-loop", label});
    }
    if (g.node(e.src).type == NodeType::kOutput) {
      out.push_back({"edge out of Output", label});
    }
    const NodeType dst_type = g.node(e.dst).type;
    if (dst_type == NodeType::kInput || dst_type == NodeType::kConst) {
      out.push_back({"edge into source node", label});
    }
  }
  if (!edges_in_range) return out;

  const std::vector<bool> keep = RegisterCutMask(g);
  const auto succ = Successors(g, keep);
  const auto order = TopoOrder(succ, keep);
  const auto kept = static_cast<size_t>(std::count(keep.begin(), keep.end(), true));
  if (order.size() != kept) {
    out.push_back({"combinational cycle",
                   std::to_string(kept - order.size()) +
                       " nodes lie on or behind a register-free cycle"});
  }
  return out;
}

double WidthFeature(int width) { return std::log2(1.0 + width); }

Matrix InitNodeFeatures(const Cdfg& g) {
  Matrix x = Matrix::Zero(g.num_nodes(), kNodeFeatureDim);
  for (const Node& n : g.nodes()) {
    x(n.id, Code(n.type)) = 1.0;
    x(n.id, kNumNodeTypes) = WidthFeature(n.width);
  }
  return x;
}

int LongestCombinationalPath(const Cdfg& g) {
  const std::vector<bool> keep = RegisterCutMask(g);
  const auto succ = Successors(g, keep);
  const auto order = TopoOrder(succ, keep);
  const auto kept = static_cast<size_t>(std::count(keep.begin(), keep.end(), true));
  if (order.size() != kept) {
    throw Error("longest path undefined: register-cut graph is cyclic");
  }
  std::vector<int> dist(g.num_nodes(), 0);
  int best = 0;
  for (int u : order) {
    for (int v : succ[u]) {
      dist[v] = std::max(dist[v], dist[u] + 1);
      best = std::max(best, dist[v]);
    }
  }
  return best;
}

std::vector<double> BaselineFeatures::Flatten() const {
  std::vector<double> flat;
  flat.reserve(2 * kNumNodeTypes + 2);
  flat.insert(flat.end(), total_bits_per_type.begin(), total_bits_per_type.end());
  flat.insert(flat.end(), count_per_type.begin(), count_per_type.end());
  flat.push_back(avg_wire_width);
  flat.push_back(longest_comb_path_len);
  return flat;
}

BaselineFeatures ComputeBaselineFeatures(const Cdfg& g) {
  BaselineFeatures f;
  double wire_bits = 0.0;
  int wires = 0;
  for (const Node& n : g.nodes()) {
    f.total_bits_per_type[Code(n.type)] += n.width;
    f.count_per_type[Code(n.type)] += 1.0;
    if (n.type == NodeType::kWire) {
      wire_bits += n.width;
      ++wires;
    }
  }
  f.avg_wire_width = wires > 0 ? wire_bits / wires : 0.0;
  f.longest_comb_path_len = LongestCombinationalPath(g);
  return f;
}

void NodeTypeHistogram::Add(const Cdfg& g) {
  for (const Node& n : g.nodes()) ++counts[Code(n.type)];
  total += g.num_nodes();
}

double NodeTypeHistogram::Percent(NodeType type) const {
  if (total == 0) return 0.0;
  return 100.0 * static_cast<double>(counts[Code(type)]) / static_cast<double>(total);
}

std::string NodeTypeHistogram::Format() const {
  std::ostringstream out;
  char line[96];
  std::snprintf(line, sizeof(line), "%-12s %12s %8s\n", "NodeType", "Count", "Ratio");
  out << line;
  for (int i = 0; i < kNumNodeTypes; ++i) {
    std::snprintf(line, sizeof(line), "%-12s %12lld %7.2f%%\n",
                  std::string(kNodeTypeNames[i]).c_str(), counts[i],
                  Percent(FromCode(i)));
    out << line;
  }
  std::snprintf(line, sizeof(line), "%-12s %12lld\n", "Total", total);
  out << line;
  return out.str();
}

NodeTypeHistogram ComputeHistogram(const std::vector<Cdfg>& corpus) {
  NodeTypeHistogram h;
  for (const Cdfg& g : corpus) h.Add(g);
  return h;
}

}  // namespace structrtl::cdfg
