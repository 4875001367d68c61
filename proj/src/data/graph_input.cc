#include "structrtl/data/graph_input.h"

#include "structrtl/cdfg/analysis.h"

namespace structrtl::data {

nn::GraphInput BuildGraphInput(const cdfg::Cdfg& g, int pe_dim) {
  nn::GraphInput in;
  in.features = cdfg::InitNodeFeatures(g);
  for (const cdfg::Edge& e : g.edges()) {
    in.edges.src.push_back(e.src);
    in.edges.dst.push_back(e.dst);
  }
  in.pe = spectral::ComputePositionalEmbeddings(g, pe_dim).matrix;
  for (const cdfg::Node& n : g.nodes()) in.node_types.push_back(static_cast<int>(n.type));
  return in;
}

nn::GraphInput BuildNetlistInput(const pm::Netlist& netlist, const pm::CellLibrary& lib) {
  nn::GraphInput in;
  in.features = pm::CellFeatures(netlist, lib);
  in.edges = pm::NetlistEdges(netlist);
  return in;
}

}  // namespace structrtl::data
