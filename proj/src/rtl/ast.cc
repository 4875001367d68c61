#include "structrtl/rtl/ast.h"

#include <sstream>

namespace structrtl::rtl {

const PortDecl* AstModule::FindPort(const std::string& n) const {
  for (const PortDecl& p : ports) {
    if (p.name == n) return &p;
  }
  return nullptr;
}

const NetDecl* AstModule::FindNet(const std::string& n) const {
  for (const NetDecl& d : nets) {
    if (d.name == n) return &d;
  }
  return nullptr;
}

const char* BinaryOpName(BinaryOp op) {
  switch (op) {
    case BinaryOp::kLt: return "Lt";
    case BinaryOp::kLe: return "Le";
    case BinaryOp::kGt: return "Gt";
    case BinaryOp::kGe: return "Ge";
    case BinaryOp::kAdd: return "Add";
    case BinaryOp::kSub: return "Sub";
    case BinaryOp::kMul: return "Mul";
    case BinaryOp::kDiv: return "Div";
    case BinaryOp::kMod: return "Mod";
    case BinaryOp::kShiftLeft: return "ShiftLeft";
    case BinaryOp::kShiftRight: return "ShiftRight";
    case BinaryOp::kAnd: return "And";
    case BinaryOp::kOr: return "Or";
    case BinaryOp::kEq: return "Eq";
    case BinaryOp::kNeq: return "Neq";
    case BinaryOp::kBitAnd: return "BitAnd";
    case BinaryOp::kBitOr: return "BitOr";
    case BinaryOp::kBitXor: return "BitXor";
    case BinaryOp::kBitNXor: return "BitNXor";
  }
  return "?";
}

const char* UnaryOpName(UnaryOp op) {
  switch (op) {
    case UnaryOp::kLNot: return "LNot";
    case UnaryOp::kNot: return "Not";
    case UnaryOp::kRedXor: return "URxor";
    case UnaryOp::kRedAnd: return "URand";
    case UnaryOp::kRedOr: return "URor";
    case UnaryOp::kRedNand: return "URnand";
    case UnaryOp::kRedNor: return "URnor";
    case UnaryOp::kNeg: return "Neg";
  }
  return "?";
}

std::string ToString(const Expr& e) {
  std::ostringstream out;
  switch (e.kind) {
    case ExprKind::kIdent:
      out << e.name;
      break;
    case ExprKind::kConst:
      out << e.literal.width << "'b" << e.literal.bits;
      break;
    case ExprKind::kUnary:
      out << "(" << UnaryOpName(e.unary_op) << " " << ToString(*e.operands[0]) << ")";
      break;
    case ExprKind::kBinary:
      out << "(" << BinaryOpName(e.binary_op) << " " << ToString(*e.operands[0]) << " "
          << ToString(*e.operands[1]) << ")";
      break;
    case ExprKind::kTernary:
      out << "(Cond " << ToString(*e.operands[0]) << " " << ToString(*e.operands[1]) << " "
          << ToString(*e.operands[2]) << ")";
      break;
    case ExprKind::kConcat:
      out << "(Concat";
      for (const ExprPtr& op : e.operands) out << " " << ToString(*op);
      out << ")";
      break;
    case ExprKind::kPartSelect:
      if (e.dynamic_index) {
        out << "(PartSelect " << e.name << " " << ToString(*e.operands[0]) << ")";
      } else {
        out << "(PartSelect " << e.name << " " << e.msb << " " << e.lsb << ")";
      }
      break;
  }
  return out.str();
}

std::string ToString(const Statement& s, int indent) {
  const std::string pad(indent * 2, ' ');
  std::ostringstream out;
  switch (s.kind) {
    case StmtKind::kBlock:
      out << pad << "begin\n";
      for (const StmtPtr& b : s.body) out << ToString(*b, indent + 1);
      out << pad << "end\n";
      break;
    case StmtKind::kIf:
      out << pad << "if " << ToString(*s.cond) << "\n" << ToString(*s.then_stmt, indent + 1);
      if (s.else_stmt) out << pad << "else\n" << ToString(*s.else_stmt, indent + 1);
      break;
    case StmtKind::kAssign:
      out << pad << s.lhs << (s.nonblocking ? " <= " : " = ") << ToString(*s.rhs) << "\n";
      break;
  }
  return out.str();
}

std::string ToString(const AstModule& m) {
  std::ostringstream out;
  out << "module " << m.name << "\n";
  for (const PortDecl& p : m.ports) {
    out << "  port " << p.name << " " << (p.dir == Direction::kInput ? "in" : "out") << " "
        << p.width() << (p.is_reg ? " reg" : "") << "\n";
  }
  for (const NetDecl& n : m.nets) {
    out << "  " << (n.kind == NetKind::kWire ? "wire " : "reg ") << n.name << " " << n.width()
        << "\n";
  }
  for (const ContinuousAssign& a : m.assigns) {
    out << "  assign " << a.lhs << " = " << ToString(*a.rhs) << "\n";
  }
  for (const AlwaysBlock& b : m.always_blocks) {
    out << "  always " << (b.clock ? "posedge " + *b.clock : std::string("comb")) << "\n"
        << ToString(*b.body, 2);
  }
  return out.str();
}

}  // namespace structrtl::rtl
