#ifndef STRUCTRTL_RTL_ELABORATE_H_
#define STRUCTRTL_RTL_ELABORATE_H_

#include <string_view>

#include "structrtl/cdfg/cdfg.h"
#include "structrtl/rtl/ast.h"

namespace structrtl::rtl {

// Lowers one module to a CDFG.
//
// Node creation order is fixed (ports, registered outputs, nets, then
// expression operators in source order) so identical sources serialize to
// identical bytes. Named wires and registers become Wire/Reg nodes;
// expression temporaries do not. A reg assigned under an edge trigger is a
// Reg node; a reg assigned in a combinational block is a Wire node. Clock
// signals contribute no data edges; the Reg node records the clock name.
// if/else in procedural blocks becomes Cond (mux) trees, and a register
// left unassigned on a branch feeds its own value back ("hold").
//
// Throws ElaborationError for undeclared identifiers, undriven outputs,
// multiply-driven nets, inferred latches, and combinational cycles.
cdfg::Cdfg Elaborate(const AstModule& ast);

// Tokenize, parse (single module) and elaborate.
cdfg::Cdfg CompileVerilog(std::string_view source);

}  // namespace structrtl::rtl

#endif  // STRUCTRTL_RTL_ELABORATE_H_
