#ifndef STRUCTRTL_DATA_GRAPH_INPUT_H_
#define STRUCTRTL_DATA_GRAPH_INPUT_H_

#include "structrtl/cdfg/cdfg.h"
#include "structrtl/nn/encoder.h"
#include "structrtl/pm/netlist.h"
#include "structrtl/spectral/laplacian.h"

namespace structrtl::data {

// Node features, dataflow edges, Laplacian embeddings and node-type labels.
nn::GraphInput BuildGraphInput(const cdfg::Cdfg& g, int pe_dim = spectral::kNumEigenvectors);

// Cell features and driver -> sink edges; no embeddings or labels.
nn::GraphInput BuildNetlistInput(const pm::Netlist& netlist, const pm::CellLibrary& lib);

}  // namespace structrtl::data

#endif  // STRUCTRTL_DATA_GRAPH_INPUT_H_
