#ifndef STRUCTRTL_DATA_LOWERING_H_
#define STRUCTRTL_DATA_LOWERING_H_

#include "structrtl/cdfg/cdfg.h"
#include "structrtl/pm/netlist.h"

namespace structrtl::data {

// Bit-level netlist stub: every output bit of a node becomes that node
// type's BitRecipe chain, with bit i reading bit (i mod width) of each
// operand. Wiring nodes alias operand nets; constants tie to the primary
// inputs "tie0"/"tie1". The total cell area equals OracleArea.
pm::Netlist LowerToNetlist(const cdfg::Cdfg& g, const pm::CellLibrary& lib);

}  // namespace structrtl::data

#endif  // STRUCTRTL_DATA_LOWERING_H_
