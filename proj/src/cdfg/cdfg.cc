#include "structrtl/cdfg/cdfg.h"

#include <algorithm>
#include <cassert>

namespace structrtl::cdfg {

std::optional<NodeType> ParseNodeType(std::string_view name) {
  for (int i = 0; i < kNumNodeTypes; ++i) {
    if (kNodeTypeNames[i] == name) return FromCode(i);
  }
  return std::nullopt;
}

int Cdfg::AddNode(NodeType type, int width, NodeAttrs attrs) {
  assert(width >= 1);
  Node node;
  node.id = num_nodes();
  node.type = type;
  node.width = width;
  node.attrs = std::move(attrs);
  nodes_.push_back(std::move(node));
  return nodes_.back().id;
}

void Cdfg::AddEdge(int src, int dst, int operand_index) {
  edges_.push_back(Edge{src, dst, operand_index});
}

Cdfg Cdfg::Permuted(const std::vector<int>& new_id_of) const {
  Cdfg out;
  out.nodes_.resize(nodes_.size());
  for (const Node& n : nodes_) {
    Node moved = n;
    moved.id = new_id_of[n.id];
    out.nodes_[moved.id] = std::move(moved);
  }
  out.edges_.reserve(edges_.size());
  for (const Edge& e : edges_) {
    out.edges_.push_back(Edge{new_id_of[e.src], new_id_of[e.dst], e.operand_index});
  }
  std::sort(out.edges_.begin(), out.edges_.end());
  return out;
}

std::vector<int> InDegrees(const Cdfg& g) {
  std::vector<int> deg(g.num_nodes(), 0);
  for (const Edge& e : g.edges()) ++deg[e.dst];
  return deg;
}

std::vector<int> OutDegrees(const Cdfg& g) {
  std::vector<int> deg(g.num_nodes(), 0);
  for (const Edge& e : g.edges()) ++deg[e.src];
  return deg;
}

std::vector<std::vector<int>> Successors(const Cdfg& g,
                                         const std::vector<bool>& keep) {
  std::vector<std::vector<int>> succ(g.num_nodes());
  for (const Edge& e : g.edges()) {
    if (keep[e.src] && keep[e.dst]) succ[e.src].push_back(e.dst);
  }
  for (auto& s : succ) {
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
  }
  return succ;
}

}  // namespace structrtl::cdfg
