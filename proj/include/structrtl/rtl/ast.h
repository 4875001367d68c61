#ifndef STRUCTRTL_RTL_AST_H_
#define STRUCTRTL_RTL_AST_H_

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "structrtl/rtl/diagnostics.h"
#include "structrtl/rtl/token.h"

namespace structrtl::rtl {

enum class UnaryOp { kLNot, kNot, kRedXor, kRedAnd, kRedOr, kRedNand, kRedNor, kNeg };

// One value per binary operator node type; the mapping to the CDFG
// vocabulary is 1:1.
enum class BinaryOp {
  kLt, kLe, kGt, kGe, kAdd, kSub, kMul, kDiv, kMod, kShiftLeft, kShiftRight,
  kAnd, kOr, kEq, kNeq, kBitAnd, kBitOr, kBitXor, kBitNXor,
};

enum class ExprKind { kIdent, kConst, kUnary, kBinary, kTernary, kConcat, kPartSelect };

struct Expr;
// Shared so that desugaring (case selectors, replication) can reference
// one subtree from several places; see Expr::shared.
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  ExprKind kind = ExprKind::kConst;
  SourceLoc loc;
  std::string name;          // kIdent and kPartSelect base signal
  NumberLiteral literal;     // kConst
  UnaryOp unary_op = UnaryOp::kNot;
  BinaryOp binary_op = BinaryOp::kAdd;
  // kUnary: 1, kBinary: 2, kTernary: cond/then/else, kConcat: parts in
  // source order (MSB first), kPartSelect: the index when dynamic.
  std::vector<ExprPtr> operands;
  // kPartSelect with constant bounds.
  int msb = 0;
  int lsb = 0;
  bool dynamic_index = false;
  // Referenced from more than one place; elaborate it once per context.
  bool shared = false;
};

enum class Direction { kInput, kOutput };

struct Range {
  int msb = 0;
  int lsb = 0;
  int width() const { return (msb >= lsb ? msb - lsb : lsb - msb) + 1; }
  bool Contains(int bit) const {
    return msb >= lsb ? (bit <= msb && bit >= lsb) : (bit >= msb && bit <= lsb);
  }
};

struct PortDecl {
  std::string name;
  Direction dir = Direction::kInput;
  Range range;
  bool is_reg = false;
  SourceLoc loc;
  int width() const { return range.width(); }
};

enum class NetKind { kWire, kReg };

struct NetDecl {
  std::string name;
  NetKind kind = NetKind::kWire;
  Range range;
  SourceLoc loc;
  int width() const { return range.width(); }
};

struct ContinuousAssign {
  std::string lhs;
  ExprPtr rhs;
  SourceLoc loc;
};

struct Statement;
using StmtPtr = std::shared_ptr<const Statement>;

enum class StmtKind { kBlock, kIf, kAssign };

struct Statement {
  StmtKind kind = StmtKind::kBlock;
  SourceLoc loc;
  std::vector<StmtPtr> body;  // kBlock
  ExprPtr cond;               // kIf
  StmtPtr then_stmt;          // kIf
  StmtPtr else_stmt;          // kIf, may be null
  std::string lhs;            // kAssign
  ExprPtr rhs;                // kAssign
  bool nonblocking = false;   // kAssign
};

struct AlwaysBlock {
  // Edge-triggered when clock is set; combinational otherwise.
  std::optional<std::string> clock;
  // Further edge-sensitivity signals (asynchronous set/reset).
  std::vector<std::string> other_edges;
  StmtPtr body;
  SourceLoc loc;
};

struct AstModule {
  std::string name;
  std::vector<PortDecl> ports;
  std::vector<NetDecl> nets;
  std::vector<ContinuousAssign> assigns;
  std::vector<AlwaysBlock> always_blocks;
  SourceLoc loc;

  const PortDecl* FindPort(const std::string& n) const;
  const NetDecl* FindNet(const std::string& n) const;
};

// Compact S-expression rendering used by `parse --emit ast` and tests,
// e.g. "(BitAnd a b)".
std::string ToString(const Expr& e);
std::string ToString(const Statement& s, int indent = 0);
std::string ToString(const AstModule& m);

const char* BinaryOpName(BinaryOp op);
const char* UnaryOpName(UnaryOp op);

}  // namespace structrtl::rtl

#endif  // STRUCTRTL_RTL_AST_H_
