#include "structrtl/rtl/parser.h"

#include <map>
#include <unordered_map>

namespace structrtl::rtl {
namespace {

struct BinaryInfo {
  int precedence;  // higher binds tighter
  BinaryOp op;
};

const std::unordered_map<std::string_view, BinaryInfo>& BinaryTable() {
  static const std::unordered_map<std::string_view, BinaryInfo> kTable = {
      {"*", {10, BinaryOp::kMul}},        {"/", {10, BinaryOp::kDiv}},
      {"%", {10, BinaryOp::kMod}},        {"+", {9, BinaryOp::kAdd}},
      {"-", {9, BinaryOp::kSub}},         {"<<", {8, BinaryOp::kShiftLeft}},
      {">>", {8, BinaryOp::kShiftRight}}, {"<<<", {8, BinaryOp::kShiftLeft}},
      {">>>", {8, BinaryOp::kShiftRight}}, {"<", {7, BinaryOp::kLt}},
      {"<=", {7, BinaryOp::kLe}},         {">", {7, BinaryOp::kGt}},
      {">=", {7, BinaryOp::kGe}},         {"==", {6, BinaryOp::kEq}},
      {"!=", {6, BinaryOp::kNeq}},        {"===", {6, BinaryOp::kEq}},
      {"!==", {6, BinaryOp::kNeq}},       {"&", {5, BinaryOp::kBitAnd}},
      {"^", {4, BinaryOp::kBitXor}},      {"~^", {4, BinaryOp::kBitNXor}},
      {"^~", {4, BinaryOp::kBitNXor}},    {"|", {3, BinaryOp::kBitOr}},
      {"&&", {2, BinaryOp::kAnd}},        {"||", {1, BinaryOp::kOr}},
  };
  return kTable;
}

NumberLiteral LiteralOf(uint64_t value) {
  NumberLiteral lit;
  if (value == 0) {
    lit.bits = "0";
  } else {
    while (value != 0) {
      lit.bits.insert(lit.bits.begin(), (value & 1) ? '1' : '0');
      value >>= 1;
    }
  }
  lit.width = static_cast<int>(lit.bits.size());
  return lit;
}

NumberLiteral Resize(NumberLiteral lit, int width) {
  if (static_cast<int>(lit.bits.size()) >= width) {
    lit.bits = lit.bits.substr(lit.bits.size() - width);
  } else {
    lit.bits.insert(0, width - lit.bits.size(), '0');
  }
  lit.width = width;
  lit.sized = true;
  return lit;
}

ExprPtr MakeConst(NumberLiteral lit, SourceLoc loc) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::kConst;
  e->literal = std::move(lit);
  e->loc = loc;
  return e;
}

ExprPtr MakeBinary(BinaryOp op, ExprPtr lhs, ExprPtr rhs, SourceLoc loc) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::kBinary;
  e->binary_op = op;
  e->operands = {std::move(lhs), std::move(rhs)};
  e->loc = loc;
  return e;
}

ExprPtr MarkShared(const ExprPtr& e) {
  if (e->kind == ExprKind::kIdent || e->kind == ExprKind::kConst || e->shared) return e;
  auto copy = std::make_shared<Expr>(*e);
  copy->shared = true;
  return copy;
}

class Parser {
 public:
  explicit Parser(const std::vector<Token>& tokens) : toks_(tokens) {}

  std::vector<AstModule> Run() {
    std::vector<AstModule> modules;
    while (!AtEof()) {
      if (Cur().Is(TokenKind::kKeyword, "module")) {
        modules.push_back(ParseModuleDecl());
      } else {
        Fail("'module'");
      }
    }
    return modules;
  }

 private:
  const Token& Cur() const { return toks_[pos_]; }
  const Token& PeekTok(size_t ahead) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  bool AtEof() const { return Cur().kind == TokenKind::kEof; }
  const Token& Take() {
    const Token& t = toks_[pos_];
    if (t.kind != TokenKind::kEof) ++pos_;
    return t;
  }

  bool IsSym(std::string_view text) const {
    return (Cur().kind == TokenKind::kOperator || Cur().kind == TokenKind::kPunctuation) &&
           Cur().text == text;
  }
  bool IsKw(std::string_view text) const { return Cur().Is(TokenKind::kKeyword, text); }

  bool AcceptSym(std::string_view text) {
    if (!IsSym(text)) return false;
    Take();
    return true;
  }
  bool AcceptKw(std::string_view text) {
    if (!IsKw(text)) return false;
    Take();
    return true;
  }

  [[noreturn]] void Fail(const std::string& expected) const {
    const Token& t = Cur();
    const std::string found =
        t.kind == TokenKind::kEof ? "end of file"
                                  : std::string(TokenKindName(t.kind)) + " '" + t.text + "'";
    throw ParseError(t.loc(), expected, found);
  }

  void ExpectSym(std::string_view text) {
    if (!AcceptSym(text)) Fail("'" + std::string(text) + "'");
  }
  void ExpectKw(std::string_view text) {
    if (!AcceptKw(text)) Fail("'" + std::string(text) + "'");
  }
  std::string ExpectIdent() {
    if (Cur().kind != TokenKind::kIdentifier) Fail("identifier");
    if (Cur().text.front() == '$') throw UnsupportedConstruct(Cur().loc(), "system task " + Cur().text);
    return Take().text;
  }

  [[noreturn]] void Unsupported(const std::string& what) const {
    throw UnsupportedConstruct(Cur().loc(), what);
  }

  // --- Module structure -------------------------------------------------

  AstModule ParseModuleDecl() {
    params_.clear();
    AstModule m;
    m.loc = Cur().loc();
    ExpectKw("module");
    m.name = ExpectIdent();
    if (AcceptSym("#")) {
      ExpectSym("(");
      if (!IsSym(")")) {
        do {
          AcceptKw("parameter");
          ParseParamAssign();
        } while (AcceptSym(","));
      }
      ExpectSym(")");
    }
    std::vector<std::string> port_order;
    if (AcceptSym("(")) {
      if (!IsSym(")")) {
        if (IsKw("input") || IsKw("output") || IsKw("inout")) {
          ParseAnsiPorts(m);
        } else {
          do {
            port_order.push_back(ExpectIdent());
          } while (AcceptSym(","));
        }
      }
      ExpectSym(")");
    }
    ExpectSym(";");

    // Non-ANSI declarations are collected by name, then ordered per header.
    std::map<std::string, PortDecl> body_ports;
    while (!IsKw("endmodule")) {
      if (AtEof()) Fail("'endmodule'");
      ParseItem(m, body_ports);
    }
    ExpectKw("endmodule");

    for (const std::string& name : port_order) {
      auto it = body_ports.find(name);
      if (it == body_ports.end()) {
        throw ParseError(m.loc, "direction declaration for port '" + name + "'", "none");
      }
      m.ports.push_back(it->second);
      body_ports.erase(it);
    }
    if (!body_ports.empty()) {
      const PortDecl& extra = body_ports.begin()->second;
      throw ParseError(extra.loc, "port '" + extra.name + "' in module header", "declaration only");
    }
    // `output q; reg q;` promotes the port to a reg and drops the net.
    for (auto it = m.nets.begin(); it != m.nets.end();) {
      auto port = std::find_if(m.ports.begin(), m.ports.end(),
                               [&](const PortDecl& p) { return p.name == it->name; });
      if (port == m.ports.end()) {
        ++it;
        continue;
      }
      if (port->dir != Direction::kOutput || it->kind != NetKind::kReg) {
        if (it->kind == NetKind::kWire && port->range.width() == it->range.width()) {
          it = m.nets.erase(it);
          continue;
        }
        throw ParseError(it->loc, "unique declaration", "redeclaration of '" + it->name + "'");
      }
      port->is_reg = true;
      it = m.nets.erase(it);
    }
    return m;
  }

  void ParseAnsiPorts(AstModule& m) {
    Direction dir = Direction::kInput;
    bool is_reg = false;
    Range range;
    do {
      if (IsKw("inout")) Unsupported("inout port");
      if (IsKw("input") || IsKw("output")) {
        dir = Take().text == "input" ? Direction::kInput : Direction::kOutput;
        is_reg = false;
        if (AcceptKw("reg")) {
          is_reg = true;
        } else {
          AcceptKw("wire");
        }
        AcceptKw("signed");
        range = ParseOptionalRange();
      }
      PortDecl p;
      p.loc = Cur().loc();
      p.name = ExpectIdent();
      p.dir = dir;
      p.range = range;
      p.is_reg = is_reg;
      if (p.is_reg && p.dir == Direction::kInput) {
        throw ParseError(p.loc, "wire input", "input reg");
      }
      CheckFresh(m, p.name, p.loc);
      m.ports.push_back(p);
    } while (AcceptSym(","));
  }

  void CheckFresh(const AstModule& m, const std::string& name, SourceLoc loc) const {
    if (m.FindPort(name) || params_.contains(name)) {
      throw ParseError(loc, "unique declaration", "redeclaration of '" + name + "'");
    }
    for (const NetDecl& n : m.nets) {
      if (n.name == name) throw ParseError(loc, "unique declaration", "redeclaration of '" + name + "'");
    }
  }

  Range ParseOptionalRange() {
    Range r;
    if (!AcceptSym("[")) return r;
    r.msb = ConstInt(ParseExpr(), "constant range bound");
    ExpectSym(":");
    r.lsb = ConstInt(ParseExpr(), "constant range bound");
    ExpectSym("]");
    return r;
  }

  int ConstInt(const ExprPtr& e, const std::string& what) {
    auto v = EvalConst(*e);
    if (!v) throw ParseError(e->loc, what, "non-constant expression");
    if (*v > (1u << 20)) throw ParseError(e->loc, what, "out-of-range value " + std::to_string(*v));
    return static_cast<int>(*v);
  }

  void ParseParamAssign() {
    Range range = ParseOptionalRange();
    const bool ranged = range.width() > 1 || range.msb != 0;
    const SourceLoc loc = Cur().loc();
    const std::string name = ExpectIdent();
    ExpectSym("=");
    ExprPtr value = ParseExpr();
    auto v = EvalConst(*value);
    if (!v) throw ParseError(loc, "constant parameter value", "non-constant expression");
    NumberLiteral lit = LiteralOf(*v);
    if (ranged) {
      lit = Resize(lit, range.width());
    } else if (value->kind == ExprKind::kConst && value->literal.sized) {
      lit = value->literal;
    }
    params_[name] = lit;
  }

  void ParseItem(AstModule& m, std::map<std::string, PortDecl>& body_ports) {
    const SourceLoc loc = Cur().loc();
    if (IsKw("input") || IsKw("output")) {
      const Direction dir = Take().text == "input" ? Direction::kInput : Direction::kOutput;
      bool is_reg = false;
      if (AcceptKw("reg")) {
        is_reg = true;
      } else {
        AcceptKw("wire");
      }
      AcceptKw("signed");
      Range range = ParseOptionalRange();
      do {
        PortDecl p;
        p.loc = Cur().loc();
        p.name = ExpectIdent();
        p.dir = dir;
        p.range = range;
        p.is_reg = is_reg;
        if (body_ports.contains(p.name)) {
          throw ParseError(p.loc, "unique declaration", "redeclaration of '" + p.name + "'");
        }
        if (m.FindPort(p.name)) {
          throw ParseError(p.loc, "unique declaration", "redeclaration of ANSI port '" + p.name + "'");
        }
        body_ports[p.name] = p;
      } while (AcceptSym(","));
      ExpectSym(";");
    } else if (IsKw("wire") || IsKw("reg")) {
      const NetKind kind = Take().text == "wire" ? NetKind::kWire : NetKind::kReg;
      AcceptKw("signed");
      Range range = ParseOptionalRange();
      do {
        NetDecl n;
        n.loc = Cur().loc();
        n.name = ExpectIdent();
        n.kind = kind;
        n.range = range;
        if (IsSym("[")) Unsupported("memory declaration");
        if (!body_ports.contains(n.name) && !m.FindPort(n.name)) CheckFresh(m, n.name, n.loc);
        m.nets.push_back(n);
        if (AcceptSym("=")) {
          if (kind == NetKind::kReg) Unsupported("reg initializer");
          ContinuousAssign a;
          a.loc = n.loc;
          a.lhs = n.name;
          a.rhs = ParseExpr();
          m.assigns.push_back(std::move(a));
        }
      } while (AcceptSym(","));
      ExpectSym(";");
    } else if (IsKw("parameter") || IsKw("localparam")) {
      Take();
      do {
        ParseParamAssign();
      } while (AcceptSym(","));
      ExpectSym(";");
    } else if (AcceptKw("assign")) {
      do {
        ContinuousAssign a;
        a.loc = Cur().loc();
        if (IsSym("{")) Unsupported("concatenation on assignment left-hand side");
        a.lhs = ExpectIdent();
        if (IsSym("[")) Unsupported("assignment to part-select");
        ExpectSym("=");
        a.rhs = ParseExpr();
        m.assigns.push_back(std::move(a));
      } while (AcceptSym(","));
      ExpectSym(";");
    } else if (AcceptKw("always")) {
      m.always_blocks.push_back(ParseAlways(loc));
    } else if (Cur().kind == TokenKind::kKeyword) {
      Unsupported("'" + Cur().text + "'");
    } else if (Cur().kind == TokenKind::kIdentifier) {
      Unsupported("module instantiation");
    } else {
      Fail("module item");
    }
  }

  AlwaysBlock ParseAlways(SourceLoc loc) {
    AlwaysBlock blk;
    blk.loc = loc;
    ExpectSym("@");
    if (AcceptSym("*")) {
      blk.body = ParseStatement();
      return blk;
    }
    ExpectSym("(");
    if (AcceptSym("*")) {
      ExpectSym(")");
      blk.body = ParseStatement();
      return blk;
    }
    bool any_edge = false;
    bool any_level = false;
    do {
      if (IsKw("posedge") || IsKw("negedge")) {
        Take();
        const std::string sig = ExpectIdent();
        if (!blk.clock) {
          blk.clock = sig;
        } else {
          blk.other_edges.push_back(sig);
        }
        any_edge = true;
      } else {
        ExpectIdent();
        any_level = true;
      }
    } while (AcceptKw("or") || AcceptSym(","));
    ExpectSym(")");
    if (any_edge && any_level) {
      throw UnsupportedConstruct(loc, "mixed edge and level sensitivity");
    }
    blk.body = ParseStatement();
    return blk;
  }

  // --- Statements ---------------------------------------------------------

  StmtPtr ParseStatement() {
    auto s = std::make_shared<Statement>();
    s->loc = Cur().loc();
    if (AcceptKw("begin")) {
      s->kind = StmtKind::kBlock;
      if (AcceptSym(":")) ExpectIdent();
      while (!AcceptKw("end")) {
        if (AtEof()) Fail("'end'");
        s->body.push_back(ParseStatement());
      }
      return s;
    }
    if (AcceptKw("if")) {
      s->kind = StmtKind::kIf;
      ExpectSym("(");
      s->cond = ParseExpr();
      ExpectSym(")");
      s->then_stmt = ParseStatement();
      if (AcceptKw("else")) s->else_stmt = ParseStatement();
      return s;
    }
    if (IsKw("case") || IsKw("casez") || IsKw("casex")) {
      return ParseCase();
    }
    if (AcceptSym(";")) {
      s->kind = StmtKind::kBlock;
      return s;
    }
    if (Cur().kind == TokenKind::kIdentifier) {
      s->kind = StmtKind::kAssign;
      s->lhs = ExpectIdent();
      if (IsSym("[")) Unsupported("assignment to part-select");
      if (AcceptSym("<=")) {
        s->nonblocking = true;
      } else if (AcceptSym("=")) {
        s->nonblocking = false;
      } else {
        Fail("'=' or '<='");
      }
      if (IsSym("#")) Unsupported("delay control");
      s->rhs = ParseExpr();
      ExpectSym(";");
      return s;
    }
    if (IsSym("{")) Unsupported("concatenation on assignment left-hand side");
    if (IsSym("#")) Unsupported("delay control");
    if (Cur().kind == TokenKind::kKeyword) Unsupported("'" + Cur().text + "' statement");
    Fail("statement");
  }

  // case (sel) L1: S1; L2, L3: S2; default: S3; endcase
  //   => if (sel == L1) S1 else if (sel == L2 || sel == L3) S2 else S3
  StmtPtr ParseCase() {
    const SourceLoc loc = Cur().loc();
    Take();
    ExpectSym("(");
    ExprPtr selector = MarkShared(ParseExpr());
    ExpectSym(")");

    struct Arm {
      ExprPtr cond;
      StmtPtr body;
      SourceLoc loc;
    };
    std::vector<Arm> arms;
    StmtPtr fallback;
    while (!AcceptKw("endcase")) {
      if (AtEof()) Fail("'endcase'");
      if (AcceptKw("default")) {
        AcceptSym(":");
        if (fallback) throw ParseError(loc, "single default arm", "second default");
        fallback = ParseStatement();
        continue;
      }
      Arm arm;
      arm.loc = Cur().loc();
      do {
        ExprPtr label = ParseExpr();
        ExprPtr eq = MakeBinary(BinaryOp::kEq, selector, label, label->loc);
        arm.cond = arm.cond ? MakeBinary(BinaryOp::kOr, arm.cond, eq, label->loc) : eq;
      } while (AcceptSym(","));
      ExpectSym(":");
      arm.body = ParseStatement();
      arms.push_back(std::move(arm));
    }
    StmtPtr chain = fallback;
    for (auto it = arms.rbegin(); it != arms.rend(); ++it) {
      auto s = std::make_shared<Statement>();
      s->kind = StmtKind::kIf;
      s->loc = it->loc;
      s->cond = it->cond;
      s->then_stmt = it->body;
      s->else_stmt = chain;
      chain = s;
    }
    if (!chain) {
      auto empty = std::make_shared<Statement>();
      empty->kind = StmtKind::kBlock;
      empty->loc = loc;
      chain = empty;
    }
    return chain;
  }

  // --- Expressions ----------------------------------------------------------

  ExprPtr ParseExpr() {
    ExprPtr cond = ParseBinary(1);
    if (!IsSym("?")) return cond;
    const SourceLoc loc = Take().loc();
    ExprPtr then_e = ParseExpr();
    ExpectSym(":");
    ExprPtr else_e = ParseExpr();
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::kTernary;
    e->loc = loc;
    e->operands = {cond, then_e, else_e};
    return e;
  }

  ExprPtr ParseBinary(int min_prec) {
    ExprPtr lhs = ParseUnary();
    while (Cur().kind == TokenKind::kOperator) {
      if (Cur().text == "**") Unsupported("power operator");
      auto it = BinaryTable().find(Cur().text);
      if (it == BinaryTable().end() || it->second.precedence < min_prec) break;
      const SourceLoc loc = Take().loc();
      ExprPtr rhs = ParseBinary(it->second.precedence + 1);
      lhs = MakeBinary(it->second.op, lhs, rhs, loc);
    }
    return lhs;
  }

  ExprPtr ParseUnary() {
    if (Cur().kind == TokenKind::kOperator) {
      static const std::unordered_map<std::string_view, UnaryOp> kUnary = {
          {"!", UnaryOp::kLNot},    {"~", UnaryOp::kNot},      {"^", UnaryOp::kRedXor},
          {"&", UnaryOp::kRedAnd},  {"|", UnaryOp::kRedOr},    {"~&", UnaryOp::kRedNand},
          {"~|", UnaryOp::kRedNor}, {"-", UnaryOp::kNeg}};
      if (Cur().text == "+") {
        Take();
        return ParseUnary();
      }
      if (Cur().text == "~^" || Cur().text == "^~") Unsupported("unary reduction XNOR");
      auto it = kUnary.find(Cur().text);
      if (it != kUnary.end()) {
        const SourceLoc loc = Take().loc();
        auto e = std::make_shared<Expr>();
        e->kind = ExprKind::kUnary;
        e->unary_op = it->second;
        e->loc = loc;
        e->operands = {ParseUnary()};
        return e;
      }
    }
    return ParsePrimary();
  }

  ExprPtr ParsePrimary() {
    const SourceLoc loc = Cur().loc();
    if (Cur().kind == TokenKind::kNumber) {
      return MakeConst(*Take().number, loc);
    }
    if (AcceptSym("(")) {
      ExprPtr e = ParseExpr();
      ExpectSym(")");
      return e;
    }
    if (AcceptSym("{")) return ParseConcat(loc);
    if (Cur().kind == TokenKind::kIdentifier) {
      if (Cur().text.front() == '$') Unsupported("system function " + Cur().text);
      const std::string name = Take().text;
      if (auto p = params_.find(name); p != params_.end()) {
        if (IsSym("[")) Unsupported("select on parameter");
        return MakeConst(p->second, loc);
      }
      if (IsSym("(")) Unsupported("function call");
      auto ident = std::make_shared<Expr>();
      ident->kind = ExprKind::kIdent;
      ident->name = name;
      ident->loc = loc;
      if (!AcceptSym("[")) return ident;
      return ParseSelect(name, loc);
    }
    Fail("expression");
  }

  ExprPtr ParseSelect(const std::string& name, SourceLoc loc) {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::kPartSelect;
    e->name = name;
    e->loc = loc;
    ExprPtr first = ParseExpr();
    if (IsSym("+:") || IsSym("-:")) Unsupported("indexed part-select");
    if (AcceptSym(":")) {
      ExprPtr second = ParseExpr();
      e->msb = ConstInt(first, "constant part-select bound");
      e->lsb = ConstInt(second, "constant part-select bound");
    } else if (auto v = EvalConst(*first)) {
      e->msb = e->lsb = static_cast<int>(*v);
    } else {
      e->dynamic_index = true;
      e->operands = {first};
    }
    ExpectSym("]");
    if (IsSym("[")) Unsupported("multi-dimensional select");
    return e;
  }

  ExprPtr ParseConcat(SourceLoc loc) {
    ExprPtr first = ParseExpr();
    if (AcceptSym("{")) {
      // Replication {n{a, b}}.
      const int count = ConstInt(first, "constant replication count");
      std::vector<ExprPtr> parts;
      do {
        parts.push_back(MarkShared(ParseExpr()));
      } while (AcceptSym(","));
      ExpectSym("}");
      ExpectSym("}");
      auto e = std::make_shared<Expr>();
      e->kind = ExprKind::kConcat;
      e->loc = loc;
      for (int i = 0; i < count; ++i) {
        e->operands.insert(e->operands.end(), parts.begin(), parts.end());
      }
      if (e->operands.empty()) throw UnsupportedConstruct(loc, "zero replication");
      return e;
    }
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::kConcat;
    e->loc = loc;
    e->operands.push_back(first);
    while (AcceptSym(",")) e->operands.push_back(ParseExpr());
    ExpectSym("}");
    return e;
  }

  const std::vector<Token>& toks_;
  size_t pos_ = 0;
  std::unordered_map<std::string, NumberLiteral> params_;
};

uint64_t Mask(int width) { return width >= 64 ? ~0ULL : ((1ULL << width) - 1); }

}  // namespace

std::optional<uint64_t> EvalConst(const Expr& e) {
  switch (e.kind) {
    case ExprKind::kConst:
      return e.literal.value();
    case ExprKind::kIdent:
    case ExprKind::kPartSelect:
      return std::nullopt;
    case ExprKind::kConcat: {
      // Only narrow concatenations fold; widths come from literals.
      uint64_t v = 0;
      int total = 0;
      for (const ExprPtr& op : e.operands) {
        if (op->kind != ExprKind::kConst) return std::nullopt;
        total += op->literal.width;
        if (total > 64) return std::nullopt;
        v = (v << op->literal.width) | (op->literal.value() & Mask(op->literal.width));
      }
      return v;
    }
    case ExprKind::kTernary: {
      auto c = EvalConst(*e.operands[0]);
      if (!c) return std::nullopt;
      return EvalConst(*e.operands[*c ? 1 : 2]);
    }
    case ExprKind::kUnary: {
      auto a = EvalConst(*e.operands[0]);
      if (!a) return std::nullopt;
      switch (e.unary_op) {
        case UnaryOp::kLNot:
          return *a == 0 ? 1 : 0;
        case UnaryOp::kNeg:
          return ~*a + 1;
        case UnaryOp::kNot:
          return ~*a;
        default:
          return std::nullopt;  // reductions need a width
      }
    }
    case ExprKind::kBinary: {
      auto a = EvalConst(*e.operands[0]);
      auto b = EvalConst(*e.operands[1]);
      if (!a || !b) return std::nullopt;
      switch (e.binary_op) {
        case BinaryOp::kAdd: return *a + *b;
        case BinaryOp::kSub: return *a - *b;
        case BinaryOp::kMul: return *a * *b;
        case BinaryOp::kDiv: return *b == 0 ? std::nullopt : std::optional<uint64_t>(*a / *b);
        case BinaryOp::kMod: return *b == 0 ? std::nullopt : std::optional<uint64_t>(*a % *b);
        case BinaryOp::kShiftLeft: return *b >= 64 ? 0 : *a << *b;
        case BinaryOp::kShiftRight: return *b >= 64 ? 0 : *a >> *b;
        case BinaryOp::kLt: return *a < *b;
        case BinaryOp::kLe: return *a <= *b;
        case BinaryOp::kGt: return *a > *b;
        case BinaryOp::kGe: return *a >= *b;
        case BinaryOp::kEq: return *a == *b;
        case BinaryOp::kNeq: return *a != *b;
        case BinaryOp::kAnd: return (*a != 0) && (*b != 0);
        case BinaryOp::kOr: return (*a != 0) || (*b != 0);
        case BinaryOp::kBitAnd: return *a & *b;
        case BinaryOp::kBitOr: return *a | *b;
        case BinaryOp::kBitXor: return *a ^ *b;
        case BinaryOp::kBitNXor: return ~(*a ^ *b);
      }
    }
  }
  return std::nullopt;
}

std::vector<AstModule> Parse(const std::vector<Token>& tokens) { return Parser(tokens).Run(); }

AstModule ParseModule(std::string_view source) {
  std::vector<Token> tokens = Tokenize(source);
  std::vector<AstModule> modules = Parse(tokens);
  if (modules.size() != 1) {
    const SourceLoc loc = modules.size() > 1 ? modules[1].loc : SourceLoc{};
    throw UnsupportedConstruct(loc, modules.empty() ? "empty source (no module)"
                                                    : "multiple modules in one file");
  }
  return std::move(modules.front());
}

}  // namespace structrtl::rtl
