#ifndef STRUCTRTL_DATA_GENERATOR_H_
#define STRUCTRTL_DATA_GENERATOR_H_

#include <string>
#include <string_view>

#include "structrtl/util/rng.h"

namespace structrtl::data {

enum class SizeClass { kTiny, kSmall, kMedium };

struct SizeBounds {
  int min_nodes;
  int max_nodes;
};

// tiny 4..30, small 31..200, medium 201..600 elaborated CDFG nodes.
SizeBounds Bounds(SizeClass cls);
std::string SizeClassName(SizeClass cls);
SizeClass ParseSizeClass(std::string_view name);

// A random single-module design in the supported Verilog subset mixing
// named wires, combinational always blocks and clocked registers with
// if/case control. Drafts are elaborated and redrawn until the node count
// falls inside the class bounds.
std::string GenerateDesign(Rng& rng, SizeClass cls, const std::string& module_name = "design");

}  // namespace structrtl::data

#endif  // STRUCTRTL_DATA_GENERATOR_H_
