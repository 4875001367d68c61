#include "structrtl/rtl/elaborate.h"

#include <algorithm>
#include <map>
#include <set>
#include <tuple>
#include <unordered_map>

#include "structrtl/cdfg/analysis.h"
#include "structrtl/rtl/parser.h"

namespace structrtl::rtl {
namespace {

using cdfg::NodeType;

// A value read from the design: either a concrete node, or the (not yet
// known) driver of an output port, resolved once every driver is seen.
struct Value {
  int node = -1;
  int deferred_signal = -1;
  int width = 1;
  bool unassigned = false;

  bool SameAs(const Value& o) const {
    return node == o.node && deferred_signal == o.deferred_signal && unassigned == o.unassigned;
  }
  auto Key() const { return std::make_tuple(node, deferred_signal, unassigned); }
};

enum class SignalKind {
  kInput,
  kDrivenOutput,  // output whose value is its driver's value
  kStoredOutput,  // output reg assigned under an edge trigger
  kWire,          // Wire node (declared wire or combinationally driven reg)
  kReg,           // Reg node
};

struct Signal {
  std::string name;
  SignalKind kind = SignalKind::kWire;
  bool declared_reg = false;
  Range range;
  int value_node = -1;
  int sink_node = -1;
  bool driven = false;
  Value driver;
  SourceLoc loc;
  int width() const { return range.width(); }
};

struct PendingEdge {
  int signal;
  int dst;
  int operand_index;
};

struct ProcState {
  std::map<int, Value> cur;   // what reads observe
  std::map<int, Value> next;  // end-of-block value per target
  int version = 0;
};

NodeType BinaryNodeType(BinaryOp op) {
  switch (op) {
    case BinaryOp::kLt: return NodeType::kLt;
    case BinaryOp::kLe: return NodeType::kLe;
    case BinaryOp::kGt: return NodeType::kGt;
    case BinaryOp::kGe: return NodeType::kGe;
    case BinaryOp::kAdd: return NodeType::kAdd;
    case BinaryOp::kSub: return NodeType::kSub;
    case BinaryOp::kMul: return NodeType::kMul;
    case BinaryOp::kDiv: return NodeType::kDiv;
    case BinaryOp::kMod: return NodeType::kMod;
    case BinaryOp::kShiftLeft: return NodeType::kShiftLeft;
    case BinaryOp::kShiftRight: return NodeType::kShiftRight;
    case BinaryOp::kAnd: return NodeType::kAnd;
    case BinaryOp::kOr: return NodeType::kOr;
    case BinaryOp::kEq: return NodeType::kEq;
    case BinaryOp::kNeq: return NodeType::kNeq;
    case BinaryOp::kBitAnd: return NodeType::kBitAnd;
    case BinaryOp::kBitOr: return NodeType::kBitOr;
    case BinaryOp::kBitXor: return NodeType::kBitXor;
    case BinaryOp::kBitNXor: return NodeType::kBitNXor;
  }
  return NodeType::kAdd;
}

void CollectTargets(const Statement& s, std::vector<std::pair<std::string, SourceLoc>>& out) {
  switch (s.kind) {
    case StmtKind::kBlock:
      for (const StmtPtr& b : s.body) CollectTargets(*b, out);
      break;
    case StmtKind::kIf:
      CollectTargets(*s.then_stmt, out);
      if (s.else_stmt) CollectTargets(*s.else_stmt, out);
      break;
    case StmtKind::kAssign:
      out.emplace_back(s.lhs, s.loc);
      break;
  }
}

class Elaborator {
 public:
  explicit Elaborator(const AstModule& ast) : ast_(ast) {}

  cdfg::Cdfg Run() {
    DeclareSignals();
    for (const ContinuousAssign& a : ast_.assigns) ElaborateAssign(a);
    for (size_t i = 0; i < ast_.always_blocks.size(); ++i) ElaborateAlways(ast_.always_blocks[i], i);
    for (const Signal& s : signals_) {
      if (s.kind == SignalKind::kDrivenOutput && !s.driven) {
        throw ElaborationError(s.loc, "undriven output '" + s.name + "'");
      }
    }
    for (const PendingEdge& p : pending_) {
      std::set<int> visiting;
      g_.AddEdge(ResolveDeferred(p.signal, visiting), p.dst, p.operand_index);
    }
    for (const cdfg::Node& n : g_.nodes()) {
      if (n.width < 1) throw ElaborationError(ast_.loc, "width-0 result at node " + std::to_string(n.id));
    }
    auto violations = cdfg::Validate(g_);
    if (!violations.empty()) {
      throw ElaborationError(ast_.loc, violations.front().kind + ": " + violations.front().detail);
    }
    return std::move(g_);
  }

 private:
  // --- Declarations --------------------------------------------------------

  void DeclareSignals() {
    // Which regs are written under an edge trigger vs. combinationally.
    std::map<std::string, bool> proc_target_is_seq;
    for (const AlwaysBlock& b : ast_.always_blocks) {
      std::vector<std::pair<std::string, SourceLoc>> targets;
      CollectTargets(*b.body, targets);
      for (const auto& [name, loc] : targets) {
        auto [it, fresh] = proc_target_is_seq.emplace(name, b.clock.has_value());
        if (!fresh && it->second != b.clock.has_value()) {
          throw ElaborationError(loc, "multiply-driven net '" + name + "'");
        }
      }
    }

    for (const PortDecl& p : ast_.ports) {
      Signal s;
      s.name = p.name;
      s.range = p.range;
      s.loc = p.loc;
      s.declared_reg = p.is_reg;
      if (p.dir == Direction::kInput) {
        s.kind = SignalKind::kInput;
        s.value_node = g_.AddNode(NodeType::kInput, p.width(), Named(p.name));
      } else {
        auto seq = proc_target_is_seq.find(p.name);
        s.kind = (p.is_reg && seq != proc_target_is_seq.end() && seq->second)
                     ? SignalKind::kStoredOutput
                     : SignalKind::kDrivenOutput;
        s.sink_node = g_.AddNode(NodeType::kOutput, p.width(), Named(p.name));
      }
      AddSignal(std::move(s));
    }
    for (Signal& s : signals_) {
      if (s.kind == SignalKind::kStoredOutput) {
        s.value_node = g_.AddNode(NodeType::kReg, s.width(), Named(s.name));
        g_.AddEdge(s.value_node, s.sink_node, 0);
      }
    }
    for (const NetDecl& n : ast_.nets) {
      Signal s;
      s.name = n.name;
      s.range = n.range;
      s.loc = n.loc;
      s.declared_reg = n.kind == NetKind::kReg;
      auto seq = proc_target_is_seq.find(n.name);
      const bool registered = s.declared_reg && seq != proc_target_is_seq.end() && seq->second;
      s.kind = registered ? SignalKind::kReg : SignalKind::kWire;
      s.value_node = g_.AddNode(registered ? NodeType::kReg : NodeType::kWire, n.width(), Named(n.name));
      AddSignal(std::move(s));
    }
  }

  static cdfg::NodeAttrs Named(const std::string& name) {
    cdfg::NodeAttrs a;
    a.name = name;
    return a;
  }

  void AddSignal(Signal s) {
    index_[s.name] = static_cast<int>(signals_.size());
    signals_.push_back(std::move(s));
  }

  int Lookup(const std::string& name, SourceLoc loc) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw ElaborationError(loc, "undeclared identifier '" + name + "'");
    return it->second;
  }

  // --- Drivers ---------------------------------------------------------------

  Value Read(int sig) const {
    const Signal& s = signals_[sig];
    Value v;
    v.width = s.width();
    if (s.value_node >= 0) {
      v.node = s.value_node;
    } else {
      v.deferred_signal = sig;
    }
    return v;
  }

  void Connect(const Value& v, int dst, int operand_index) {
    if (v.node >= 0) {
      g_.AddEdge(v.node, dst, operand_index);
    } else {
      pending_.push_back({v.deferred_signal, dst, operand_index});
    }
  }

  void Drive(int sig, const Value& v, SourceLoc loc) {
    Signal& s = signals_[sig];
    if (s.driven) throw ElaborationError(loc, "multiply-driven net '" + s.name + "'");
    s.driven = true;
    s.driver = v;
    switch (s.kind) {
      case SignalKind::kDrivenOutput:
        Connect(v, s.sink_node, 0);
        break;
      case SignalKind::kWire:
      case SignalKind::kReg:
      case SignalKind::kStoredOutput:
        Connect(v, s.value_node, 0);
        break;
      case SignalKind::kInput:
        throw ElaborationError(loc, "assignment to input '" + s.name + "'");
    }
  }

  int ResolveDeferred(int sig, std::set<int>& visiting) {
    const Signal& s = signals_[sig];
    if (!visiting.insert(sig).second) {
      throw ElaborationError(s.loc, "combinational cycle through output '" + s.name + "'");
    }
    if (!s.driven) throw ElaborationError(s.loc, "undriven output '" + s.name + "'");
    if (s.driver.node >= 0) return s.driver.node;
    return ResolveDeferred(s.driver.deferred_signal, visiting);
  }

  // --- Expressions -----------------------------------------------------------

  int NewNode(NodeType type, int width, SourceLoc loc, cdfg::NodeAttrs attrs = {}) {
    if (width < 1) throw ElaborationError(loc, "width-0 result");
    return g_.AddNode(type, width, std::move(attrs));
  }

  Value Op(NodeType type, int width, const std::vector<Value>& operands, SourceLoc loc,
           cdfg::NodeAttrs attrs = {}) {
    const int id = NewNode(type, width, loc, std::move(attrs));
    for (size_t i = 0; i < operands.size(); ++i) Connect(operands[i], id, static_cast<int>(i));
    Value v;
    v.node = id;
    v.width = width;
    return v;
  }

  Value Constant(const NumberLiteral& lit, SourceLoc loc) {
    cdfg::NodeAttrs a;
    a.value = lit.bits;
    return Op(NodeType::kConst, lit.width, {}, loc, a);
  }

  Value Eval(const Expr& e, const ProcState* state) {
    if (e.shared) {
      const auto key = std::make_pair(&e, state ? state->version : -1);
      if (auto it = memo_.find(key); it != memo_.end()) return it->second;
      Value v = EvalUncached(e, state);
      memo_[key] = v;
      return v;
    }
    return EvalUncached(e, state);
  }

  Value ReadIdent(const std::string& name, SourceLoc loc, const ProcState* state) {
    const int sig = Lookup(name, loc);
    if (state) {
      if (auto it = state->cur.find(sig); it != state->cur.end() && !it->second.unassigned) {
        return it->second;
      }
    }
    return Read(sig);
  }

  Value EvalUncached(const Expr& e, const ProcState* state) {
    switch (e.kind) {
      case ExprKind::kIdent:
        return ReadIdent(e.name, e.loc, state);
      case ExprKind::kConst:
        return Constant(e.literal, e.loc);
      case ExprKind::kUnary: {
        const Value a = Eval(*e.operands[0], state);
        switch (e.unary_op) {
          case UnaryOp::kLNot: return Op(NodeType::kLNot, 1, {a}, e.loc);
          case UnaryOp::kNot: return Op(NodeType::kNot, a.width, {a}, e.loc);
          case UnaryOp::kRedXor: return Op(NodeType::kURxor, 1, {a}, e.loc);
          case UnaryOp::kRedAnd: return Op(NodeType::kURand, 1, {a}, e.loc);
          case UnaryOp::kRedOr: return Op(NodeType::kURor, 1, {a}, e.loc);
          case UnaryOp::kRedNand:
            return Op(NodeType::kLNot, 1, {Op(NodeType::kURand, 1, {a}, e.loc)}, e.loc);
          case UnaryOp::kRedNor:
            return Op(NodeType::kLNot, 1, {Op(NodeType::kURor, 1, {a}, e.loc)}, e.loc);
          case UnaryOp::kNeg: {
            NumberLiteral zero;
            zero.width = a.width;
            zero.sized = true;
            zero.bits.assign(a.width, '0');
            return Op(NodeType::kSub, a.width, {Constant(zero, e.loc), a}, e.loc);
          }
        }
        break;
      }
      case ExprKind::kBinary: {
        const Value a = Eval(*e.operands[0], state);
        const Value b = Eval(*e.operands[1], state);
        const NodeType type = BinaryNodeType(e.binary_op);
        int width;
        if (cdfg::IsOneBitResult(type)) {
          width = 1;
        } else if (type == NodeType::kShiftLeft || type == NodeType::kShiftRight) {
          width = a.width;
        } else {
          width = std::max(a.width, b.width);
        }
        return Op(type, width, {a, b}, e.loc);
      }
      case ExprKind::kTernary: {
        const Value c = Eval(*e.operands[0], state);
        const Value t = Eval(*e.operands[1], state);
        const Value f = Eval(*e.operands[2], state);
        return Op(NodeType::kCond, std::max(t.width, f.width), {c, t, f}, e.loc);
      }
      case ExprKind::kConcat: {
        std::vector<Value> parts;
        int width = 0;
        for (const ExprPtr& op : e.operands) {
          parts.push_back(Eval(*op, state));
          width += parts.back().width;
        }
        return Op(NodeType::kConcat, width, parts, e.loc);
      }
      case ExprKind::kPartSelect: {
        const int sig = Lookup(e.name, e.loc);
        const Value base = ReadIdent(e.name, e.loc, state);
        if (e.dynamic_index) {
          const Value index = Eval(*e.operands[0], state);
          return Op(NodeType::kPartSelect, 1, {base, index}, e.loc);
        }
        const Range& declared = signals_[sig].range;
        if (!declared.Contains(e.msb) || !declared.Contains(e.lsb)) {
          throw ElaborationError(e.loc, "part-select [" + std::to_string(e.msb) + ":" +
                                            std::to_string(e.lsb) + "] out of range for '" +
                                            e.name + "'");
        }
        cdfg::NodeAttrs attrs;
        attrs.msb = e.msb;
        attrs.lsb = e.lsb;
        const int width = (e.msb >= e.lsb ? e.msb - e.lsb : e.lsb - e.msb) + 1;
        return Op(NodeType::kPartSelect, width, {base}, e.loc, attrs);
      }
    }
    throw ElaborationError(e.loc, "unhandled expression");
  }

  // --- Continuous assignment -----------------------------------------------

  void ElaborateAssign(const ContinuousAssign& a) {
    const int sig = Lookup(a.lhs, a.loc);
    const Signal& s = signals_[sig];
    if (s.kind == SignalKind::kInput) throw ElaborationError(a.loc, "assignment to input '" + s.name + "'");
    if (s.declared_reg) throw ElaborationError(a.loc, "continuous assignment to reg '" + s.name + "'");
    Drive(sig, Eval(*a.rhs, nullptr), a.loc);
  }

  // --- Procedural blocks -----------------------------------------------------

  Value Merge(const Value& cond, const Value& then_v, const Value& else_v, SourceLoc loc) {
    if (then_v.SameAs(else_v)) return then_v;
    if (then_v.unassigned || else_v.unassigned) {
      Value u;
      u.unassigned = true;
      u.width = std::max(then_v.width, else_v.width);
      return u;
    }
    const auto key = std::make_tuple(cond.Key(), then_v.Key(), else_v.Key());
    if (auto it = mux_cache_.find(key); it != mux_cache_.end()) return it->second;
    Value v = Op(NodeType::kCond, std::max(then_v.width, else_v.width), {cond, then_v, else_v}, loc);
    mux_cache_[key] = v;
    return v;
  }

  void Exec(const Statement& s, ProcState& st, bool sequential) {
    switch (s.kind) {
      case StmtKind::kBlock:
        for (const StmtPtr& b : s.body) Exec(*b, st, sequential);
        return;
      case StmtKind::kAssign: {
        const int sig = Lookup(s.lhs, s.loc);
        if (!signals_[sig].declared_reg) {
          throw ElaborationError(s.loc, "procedural assignment to non-reg '" + s.lhs + "'");
        }
        const Value v = Eval(*s.rhs, &st);
        st.next[sig] = v;
        if (!s.nonblocking) {
          st.cur[sig] = v;
          st.version = ++version_counter_;
        }
        return;
      }
      case StmtKind::kIf: {
        const Value c = Eval(*s.cond, &st);
        ProcState then_st = st;
        Exec(*s.then_stmt, then_st, sequential);
        ProcState else_st = st;
        if (s.else_stmt) Exec(*s.else_stmt, else_st, sequential);

        ProcState merged;
        for (const auto& [sig, tv] : then_st.next) {
          merged.next[sig] = Merge(c, tv, else_st.next.at(sig), s.loc);
        }
        std::set<int> keys;
        for (const auto& kv : then_st.cur) keys.insert(kv.first);
        for (const auto& kv : else_st.cur) keys.insert(kv.first);
        for (int sig : keys) {
          auto ti = then_st.cur.find(sig);
          auto ei = else_st.cur.find(sig);
          if (ti != then_st.cur.end() && ei != else_st.cur.end()) {
            merged.cur[sig] = Merge(c, ti->second, ei->second, s.loc);
          } else if (sequential) {
            const Value tv = ti != then_st.cur.end() ? ti->second : Read(sig);
            const Value ev = ei != else_st.cur.end() ? ei->second : Read(sig);
            merged.cur[sig] = Merge(c, tv, ev, s.loc);
          }
        }
        merged.version = (then_st.version == st.version && else_st.version == st.version)
                             ? st.version
                             : ++version_counter_;
        st = std::move(merged);
        return;
      }
    }
  }

  void ElaborateAlways(const AlwaysBlock& b, size_t block_index) {
    std::vector<std::pair<std::string, SourceLoc>> targets;
    CollectTargets(*b.body, targets);
    const bool sequential = b.clock.has_value();
    if (sequential) Lookup(*b.clock, b.loc);
    for (const std::string& e : b.other_edges) Lookup(e, b.loc);

    ProcState st;
    st.version = ++version_counter_;
    std::vector<int> order;
    for (const auto& [name, loc] : targets) {
      const int sig = Lookup(name, loc);
      if (st.next.contains(sig)) continue;
      auto [it, fresh] = block_of_target_.emplace(sig, block_index);
      if (!fresh && it->second != block_index) {
        throw ElaborationError(loc, "multiply-driven net '" + name + "'");
      }
      order.push_back(sig);
      if (sequential) {
        st.next[sig] = Read(sig);
      } else {
        Value u;
        u.unassigned = true;
        u.width = signals_[sig].width();
        st.next[sig] = u;
      }
    }
    Exec(*b.body, st, sequential);

    for (int sig : order) {
      Signal& s = signals_[sig];
      const Value v = st.next.at(sig);
      if (sequential) {
        if (s.kind != SignalKind::kReg && s.kind != SignalKind::kStoredOutput) {
          throw ElaborationError(b.loc, "'" + s.name + "' is not a register");
        }
        g_.mutable_node(s.value_node).attrs.clock = *b.clock;
        Drive(sig, v, b.loc);
      } else {
        if (v.unassigned) {
          throw ElaborationError(b.loc, "latch inferred: '" + s.name +
                                            "' is not assigned on every path");
        }
        Drive(sig, v, b.loc);
      }
    }
  }

  const AstModule& ast_;
  cdfg::Cdfg g_;
  std::vector<Signal> signals_;
  std::unordered_map<std::string, int> index_;
  std::vector<PendingEdge> pending_;
  std::map<std::pair<const Expr*, int>, Value> memo_;
  std::map<std::tuple<std::tuple<int, int, bool>, std::tuple<int, int, bool>,
                      std::tuple<int, int, bool>>,
           Value>
      mux_cache_;
  std::map<int, size_t> block_of_target_;
  int version_counter_ = 0;
};

}  // namespace

cdfg::Cdfg Elaborate(const AstModule& ast) { return Elaborator(ast).Run(); }

cdfg::Cdfg CompileVerilog(std::string_view source) { return Elaborate(ParseModule(source)); }

}  // namespace structrtl::rtl
