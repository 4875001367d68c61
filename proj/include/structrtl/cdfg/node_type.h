#ifndef STRUCTRTL_CDFG_NODE_TYPE_H_
#define STRUCTRTL_CDFG_NODE_TYPE_H_

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

namespace structrtl::cdfg {

// The closed CDFG node vocabulary. Integer codes are part of the
// serialization and checkpoint contract: never reorder.
enum class NodeType : uint8_t {
  kLNot = 0,
  kNot,
  kURxor,
  kURand,
  kURor,
  kLt,
  kLe,
  kGt,
  kGe,
  kAdd,
  kSub,
  kMul,
  kDiv,
  kMod,
  kShiftLeft,
  kShiftRight,
  kAnd,
  kOr,
  kEq,
  kNeq,
  kBitAnd,
  kBitOr,
  kBitXor,
  kBitNXor,
  kPartSelect,
  kConcat,
  kCond,
  kWire,
  kConst,
  kInput,
  kOutput,
  kReg,
};

inline constexpr int kNumNodeTypes = 32;

inline constexpr std::array<std::string_view, kNumNodeTypes> kNodeTypeNames = {
    "LNot",   "Not",    "URxor",      "URand",      "URor",   "Lt",
    "Le",     "Gt",     "Ge",         "Add",        "Sub",    "Mul",
    "Div",    "Mod",    "ShiftLeft",  "ShiftRight", "And",    "Or",
    "Eq",     "Neq",    "BitAnd",     "BitOr",      "BitXor", "BitNXor",
    "PartSelect", "Concat", "Cond",   "Wire",       "Const",  "Input",
    "Output", "Reg"};

constexpr int Code(NodeType type) { return static_cast<int>(type); }

constexpr NodeType FromCode(int code) { return static_cast<NodeType>(code); }

constexpr std::string_view Name(NodeType type) {
  return kNodeTypeNames[static_cast<size_t>(type)];
}

std::optional<NodeType> ParseNodeType(std::string_view name);

// Operator nodes whose result is a single bit regardless of operand widths.
constexpr bool IsOneBitResult(NodeType t) {
  switch (t) {
    case NodeType::kLNot:
    case NodeType::kURxor:
    case NodeType::kURand:
    case NodeType::kURor:
    case NodeType::kLt:
    case NodeType::kLe:
    case NodeType::kGt:
    case NodeType::kGe:
    case NodeType::kAnd:
    case NodeType::kOr:
    case NodeType::kEq:
    case NodeType::kNeq:
      return true;
    default:
      return false;
  }
}

}  // namespace structrtl::cdfg

#endif  // STRUCTRTL_CDFG_NODE_TYPE_H_
