#ifndef STRUCTRTL_CDFG_SERIALIZE_H_
#define STRUCTRTL_CDFG_SERIALIZE_H_

#include <string>
#include <string_view>

#include "structrtl/cdfg/cdfg.h"

namespace structrtl::cdfg {

// Canonical JSON text:
//   {"edges":[{"dst":int,"op_idx":int,"src":int}],
//    "nodes":[{"attrs":{...},"id":int,"type":str,"width":int}]}
// Keys are sorted, so equal graphs serialize to identical bytes.
std::string ToJson(const Cdfg& g);

// Inverse of ToJson. "op_idx" defaults to 0 and "attrs" to {} when
// omitted. Throws SchemaError carrying the JSON pointer of the bad value.
Cdfg FromJson(std::string_view text);

// Graphviz rendering; node labels show type, width and name/value.
std::string ToDot(const Cdfg& g);

}  // namespace structrtl::cdfg

#endif  // STRUCTRTL_CDFG_SERIALIZE_H_
