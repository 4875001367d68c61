#ifndef STRUCTRTL_CDFG_CDFG_H_
#define STRUCTRTL_CDFG_CDFG_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "structrtl/cdfg/node_type.h"

namespace structrtl::cdfg {

struct NodeAttrs {
  std::optional<std::string> name;
  // Constant bits, most significant first; length equals the node width.
  std::optional<std::string> value;
  std::optional<int> msb;
  std::optional<int> lsb;
  std::optional<std::string> clock;

  bool operator==(const NodeAttrs&) const = default;
};

struct Node {
  int id = 0;
  NodeType type = NodeType::kWire;
  int width = 1;
  NodeAttrs attrs;

  bool operator==(const Node&) const = default;
};

struct Edge {
  int src = 0;
  int dst = 0;
  int operand_index = 0;

  bool operator==(const Edge&) const = default;
  auto operator<=>(const Edge&) const = default;
};

// Directed, possibly cyclic control-data-flow graph. Edges point from
// producer to consumer; operand_index records the operand slot at the
// consumer so non-commutative operators keep their argument order.
class Cdfg {
 public:
  int AddNode(NodeType type, int width, NodeAttrs attrs = {});
  void AddEdge(int src, int dst, int operand_index);

  int num_nodes() const { return static_cast<int>(nodes_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const Node& node(int id) const { return nodes_[id]; }
  Node& mutable_node(int id) { return nodes_[id]; }

  // Raw insertion used by deserialization and tests; performs no checks.
  void AppendNodeUnchecked(Node node) { nodes_.push_back(std::move(node)); }
  void AppendEdgeUnchecked(Edge edge) { edges_.push_back(edge); }

  // Returns a copy with node ids renumbered by `new_id_of[old]`, nodes and
  // edges reordered accordingly. Used by relabeling-invariance checks.
  Cdfg Permuted(const std::vector<int>& new_id_of) const;

  bool operator==(const Cdfg&) const = default;

 private:
  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
};

std::vector<int> InDegrees(const Cdfg& g);
std::vector<int> OutDegrees(const Cdfg& g);

// Adjacency list (successors) restricted to nodes whose keep[] is true.
std::vector<std::vector<int>> Successors(const Cdfg& g,
                                         const std::vector<bool>& keep);

}  // namespace structrtl::cdfg

#endif  // STRUCTRTL_CDFG_CDFG_H_
