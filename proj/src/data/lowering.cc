#include "structrtl/data/lowering.h"

#include <algorithm>
#include <functional>
#include <set>

#include "structrtl/data/label_oracle.h"
#include "structrtl/util/error.h"

namespace structrtl::data {

using cdfg::NodeType;

namespace {

bool IsWiring(NodeType t) {
  return t == NodeType::kWire || t == NodeType::kConst || t == NodeType::kConcat ||
         t == NodeType::kPartSelect;
}

std::string NetName(int node, int bit) { return "n" + std::to_string(node) + "_" + std::to_string(bit); }

}  // namespace

pm::Netlist LowerToNetlist(const cdfg::Cdfg& g, const pm::CellLibrary& lib) {
  const int n = g.num_nodes();
  std::vector<std::vector<int>> operands(n);
  {
    std::vector<cdfg::Edge> edges = g.edges();
    std::stable_sort(edges.begin(), edges.end(),
                     [](const cdfg::Edge& a, const cdfg::Edge& b) { return a.operand_index < b.operand_index; });
    for (const cdfg::Edge& e : edges) operands[e.dst].push_back(e.src);
  }

  pm::Netlist out;
  std::set<std::string> ties;
  std::vector<std::vector<std::string>> nets(n);
  std::vector<bool> resolving(n, false);

  // Net carrying bit `bit` of node v; wiring nodes resolve to their source.
  std::function<void(int)> resolve_node;
  auto bit_net = [&](int v, int bit) -> std::string {
    if (nets[v].empty()) resolve_node(v);
    return nets[v][bit % nets[v].size()];
  };
  resolve_node = [&](int v) {
    if (!nets[v].empty()) return;
    const cdfg::Node& node = g.node(v);
    std::vector<std::string>& bits = nets[v];
    if (!IsWiring(node.type)) {
      for (int i = 0; i < node.width; ++i) bits.push_back(NetName(v, i));
      return;
    }
    if (resolving[v]) throw Error("combinational wiring loop at node " + std::to_string(v));
    resolving[v] = true;
    std::vector<std::string> resolved;
    auto tie = [&](char c) {
      const std::string name = c == '1' ? "tie1" : "tie0";
      ties.insert(name);
      return name;
    };
    switch (node.type) {
      case NodeType::kConst: {
        const std::string value = node.attrs.value.value_or(std::string(node.width, '0'));
        for (int i = 0; i < node.width; ++i) {
          const int from_msb = static_cast<int>(value.size()) - 1 - i;
          resolved.push_back(tie(from_msb >= 0 ? value[from_msb] : '0'));
        }
        break;
      }
      case NodeType::kConcat: {
        // The first operand is the most significant part.
        for (auto it = operands[v].rbegin(); it != operands[v].rend(); ++it) {
          for (int i = 0; i < g.node(*it).width; ++i) resolved.push_back(bit_net(*it, i));
        }
        break;
      }
      case NodeType::kPartSelect: {
        if (operands[v].empty()) break;
        const int lsb = operands[v].size() == 1 ? std::min(node.attrs.lsb.value_or(0), node.attrs.msb.value_or(0)) : 0;
        for (int i = 0; i < node.width; ++i) resolved.push_back(bit_net(operands[v][0], lsb + i));
        break;
      }
      default:  // Wire
        if (!operands[v].empty()) {
          for (int i = 0; i < node.width; ++i) resolved.push_back(bit_net(operands[v][0], i));
        }
        break;
    }
    if (resolved.empty()) resolved.assign(node.width, tie('0'));
    resolved.resize(node.width, resolved.back());
    bits = std::move(resolved);
    resolving[v] = false;
  };
  for (int v = 0; v < n; ++v) resolve_node(v);

  int next_id = 0;
  auto add_cell = [&](const std::string& type, std::map<std::string, std::string> pins) {
    out.cells.push_back({next_id++, type, std::move(pins)});
  };

  for (int v = 0; v < n; ++v) {
    const cdfg::Node& node = g.node(v);
    if (IsWiring(node.type)) continue;
    const std::vector<std::string>& recipe = BitRecipe(node.type);
    for (int i = 0; i < node.width; ++i) {
      std::vector<std::string> pool;
      if (node.type == NodeType::kInput) {
        pool.push_back("pi" + std::to_string(v) + "_" + std::to_string(i));
        out.inputs.push_back(pool.back());
      }
      for (int u : operands[v]) pool.push_back(bit_net(u, i));
      if (pool.empty()) {
        ties.insert("tie0");
        pool.push_back("tie0");
      }
      size_t cursor = 0;
      std::string prev;
      for (size_t c = 0; c < recipe.size(); ++c) {
        const pm::CellType& cell = lib.at(recipe[c]);
        std::map<std::string, std::string> pins;
        for (size_t p = 0; p < cell.inputs.size(); ++p) {
          if (p == 0 && c > 0) {
            pins[cell.inputs[p]] = prev;
          } else {
            pins[cell.inputs[p]] = pool[cursor % pool.size()];
            ++cursor;
          }
        }
        prev = c + 1 == recipe.size() ? nets[v][i] : nets[v][i] + "_" + std::to_string(c);
        pins[cell.output] = prev;
        add_cell(recipe[c], std::move(pins));
      }
      if (node.type == NodeType::kOutput) out.outputs.push_back(nets[v][i]);
    }
  }
  out.inputs.insert(out.inputs.end(), ties.begin(), ties.end());

  std::map<std::string, int> driver;
  for (size_t c = 0; c < out.cells.size(); ++c) {
    driver[out.cells[c].pins.at(lib.at(out.cells[c].type).output)] = static_cast<int>(c);
  }
  std::set<std::pair<int, int>> edges;
  for (size_t c = 0; c < out.cells.size(); ++c) {
    for (const std::string& pin : lib.at(out.cells[c].type).inputs) {
      auto d = driver.find(out.cells[c].pins.at(pin));
      if (d != driver.end()) edges.emplace(d->second, static_cast<int>(c));
    }
  }
  out.edges.assign(edges.begin(), edges.end());
  return out;
}

}  // namespace structrtl::data
