#include "structrtl/data/generator.h"

#include <sstream>
#include <vector>

#include "structrtl/rtl/elaborate.h"
#include "structrtl/util/error.h"

namespace structrtl::data {

SizeBounds Bounds(SizeClass cls) {
  switch (cls) {
    case SizeClass::kTiny: return {4, 30};
    case SizeClass::kSmall: return {31, 200};
    case SizeClass::kMedium: return {201, 600};
  }
  return {0, 0};
}

std::string SizeClassName(SizeClass cls) {
  switch (cls) {
    case SizeClass::kTiny: return "tiny";
    case SizeClass::kSmall: return "small";
    case SizeClass::kMedium: return "medium";
  }
  return "";
}

SizeClass ParseSizeClass(std::string_view name) {
  if (name == "tiny") return SizeClass::kTiny;
  if (name == "small") return SizeClass::kSmall;
  if (name == "medium") return SizeClass::kMedium;
  throw Error("unknown size class '" + std::string(name) + "'");
}

namespace {

struct Signal {
  std::string name;
  int width;
};

struct Expr {
  std::string text;
  int width;
  int nodes;
};

std::string Range(int width) { return width > 1 ? "[" + std::to_string(width - 1) + ":0] " : ""; }

class Drafter {
 public:
  Drafter(Rng& rng, SizeClass cls, int target) : rng_(rng), target_(target) {
    switch (cls) {
      case SizeClass::kTiny: widths_ = {1, 1, 2, 4}; break;
      case SizeClass::kSmall: widths_ = {1, 2, 4, 8, 8}; break;
      case SizeClass::kMedium: widths_ = {1, 4, 8, 8, 16}; break;
    }
  }

  std::string Draft(const std::string& module_name) {
    const int num_inputs = 1 + static_cast<int>(rng_.Below(std::min(6, 2 + target_ / 25)));
    const int num_regs = target_ < 8 ? 0 : static_cast<int>(rng_.Below(1 + target_ / 12));
    const int num_outputs = 1 + static_cast<int>(rng_.Below(std::min(4, 1 + target_ / 40)));

    std::vector<std::string> ports;
    if (num_regs > 0) {
      ports.push_back("input clk");
      ++est_;
    }
    for (int i = 0; i < num_inputs; ++i) {
      const Signal s{"in" + std::to_string(i), Width()};
      ports.push_back("input " + Range(s.width) + s.name);
      pool_.push_back(s);
      ++est_;
    }
    std::vector<Signal> regs;
    for (int i = 0; i < num_regs; ++i) {
      regs.push_back({"r" + std::to_string(i), Width()});
      decls_ << "  reg " << Range(regs.back().width) << regs.back().name << ";\n";
      ++est_;
    }
    pool_.insert(pool_.end(), regs.begin(), regs.end());
    est_ += num_outputs * 2;

    const int budget = target_ - num_regs * 3;
    int wires = 0, combs = 0;
    while (est_ < budget) {
      if (rng_.Bernoulli(0.12)) {
        CombBlock("t" + std::to_string(combs++));
      } else {
        WireAssign("w" + std::to_string(wires++));
      }
    }
    if (!regs.empty()) ClockedBlocks(regs);

    for (int i = 0; i < num_outputs; ++i) {
      const Expr e = rng_.Bernoulli(0.5) ? Leaf(false) : Operation(1);
      const std::string name = "o" + std::to_string(i);
      ports.push_back("output " + Range(e.width) + name);
      body_ << "  assign " << name << " = " << e.text << ";\n";
    }

    std::ostringstream out;
    out << "module " << module_name << "(";
    for (size_t i = 0; i < ports.size(); ++i) out << (i ? ",\n    " : "") << ports[i];
    out << ");\n" << decls_.str() << body_.str() << "endmodule\n";
    return out.str();
  }

 private:
  int Width() { return widths_[rng_.Below(widths_.size())]; }

  const Signal& Pick() { return pool_[rng_.Below(pool_.size())]; }

  Expr Constant(int width) {
    const uint64_t value = rng_.Below(uint64_t{1} << std::min(width, 16));
    return {std::to_string(width) + "'d" + std::to_string(value), width, 1};
  }

  Expr Leaf(bool allow_const = true) {
    if (allow_const && rng_.Bernoulli(0.12)) return Constant(Width());
    const Signal& s = Pick();
    return {s.name, s.width, 0};
  }

  Expr Operand(int depth) { return depth > 1 && rng_.Bernoulli(0.35) ? Operation(depth - 1) : Leaf(); }

  Expr Operation(int depth) {
    static const char* kBitwise[] = {"&", "|", "^", "~^"};
    static const char* kArith[] = {"+", "-"};
    static const char* kCompare[] = {"<", "<=", ">", ">=", "==", "!="};
    static const char* kHeavy[] = {"*", "/", "%"};
    static const char* kShift[] = {"<<", ">>"};
    static const char* kLogic[] = {"&&", "||"};
    static const char* kUnary[] = {"~", "!", "&", "|", "^"};
    const double r = rng_.Uniform();
    auto binary = [&](const char* op, bool one_bit) {
      const Expr a = Operand(depth), b = Operand(depth);
      return Expr{"(" + a.text + " " + op + " " + b.text + ")", one_bit ? 1 : std::max(a.width, b.width),
                  a.nodes + b.nodes + 1};
    };
    if (r < 0.26) return binary(kBitwise[rng_.Below(4)], false);
    if (r < 0.42) return binary(kArith[rng_.Below(2)], false);
    if (r < 0.57) return binary(kCompare[rng_.Below(6)], true);
    if (r < 0.61) return binary(kHeavy[rng_.Below(3)], false);
    if (r < 0.65) {
      const Expr a = Operand(depth);
      const Expr b = Constant(2);
      return {"(" + a.text + " " + kShift[rng_.Below(2)] + " " + b.text + ")", a.width, a.nodes + 2};
    }
    if (r < 0.68) return binary(kLogic[rng_.Below(2)], true);
    if (r < 0.76) {
      const int k = static_cast<int>(rng_.Below(5));
      const Expr a = Operand(depth);
      return {std::string(kUnary[k]) + "(" + a.text + ")", k == 0 ? a.width : 1, a.nodes + 1};
    }
    if (r < 0.86) {
      const Expr c = Operand(depth), a = Operand(depth), b = Operand(depth);
      return {"(" + c.text + " ? " + a.text + " : " + b.text + ")", std::max(a.width, b.width),
              c.nodes + a.nodes + b.nodes + 1};
    }
    if (r < 0.92) {
      const Expr a = Leaf(), b = Leaf();
      return {"{" + a.text + ", " + b.text + "}", a.width + b.width, a.nodes + b.nodes + 1};
    }
    for (int tries = 0; tries < 8; ++tries) {
      const Signal& s = Pick();
      if (s.width < 2) continue;
      const int lsb = static_cast<int>(rng_.Below(s.width));
      const int msb = lsb + static_cast<int>(rng_.Below(s.width - lsb));
      if (msb == lsb) return {s.name + "[" + std::to_string(lsb) + "]", 1, 1};
      return {s.name + "[" + std::to_string(msb) + ":" + std::to_string(lsb) + "]", msb - lsb + 1, 1};
    }
    return binary(kBitwise[rng_.Below(4)], false);
  }

  Expr Condition() {
    const Expr e = rng_.Bernoulli(0.5) ? Leaf(false) : Operation(1);
    return e;
  }

  void WireAssign(const std::string& name) {
    const Expr e = Operation(rng_.Bernoulli(0.4) ? 2 : 1);
    decls_ << "  wire " << Range(e.width) << name << ";\n";
    body_ << "  assign " << name << " = " << e.text << ";\n";
    pool_.push_back({name, e.width});
    est_ += e.nodes + 1;
  }

  void CombBlock(const std::string& name) {
    const Expr c = Condition();
    const Expr a = Operation(1), b = Operand(1);
    const int width = std::max(a.width, b.width);
    decls_ << "  reg " << Range(width) << name << ";\n";
    body_ << "  always @(*) begin\n    if (" << c.text << ")\n      " << name << " = " << a.text
          << ";\n    else\n      " << name << " = " << b.text << ";\n  end\n";
    pool_.push_back({name, width});
    est_ += c.nodes + a.nodes + b.nodes + 2;
  }

  void ClockedBlocks(const std::vector<Signal>& regs) {
    body_ << "  always @(posedge clk) begin\n";
    for (const Signal& r : regs) {
      const double kind = rng_.Uniform();
      if (kind < 0.4) {
        const Expr e = Operation(1);
        body_ << "    " << r.name << " <= " << e.text << ";\n";
        est_ += e.nodes;
      } else if (kind < 0.75) {
        const Expr c = Condition();
        const Expr e = Operation(1);
        body_ << "    if (" << c.text << ")\n      " << r.name << " <= " << e.text << ";\n";
        if (rng_.Bernoulli(0.5)) {
          const Expr f = Leaf();
          body_ << "    else\n      " << r.name << " <= " << f.text << ";\n";
          est_ += f.nodes;
        }
        est_ += c.nodes + e.nodes + 1;
      } else {
        const Signal& sel = Pick();
        const int arms = std::min(1 << std::min(sel.width, 2), 3);
        body_ << "    case (" << sel.name << ")\n";
        for (int a = 0; a < arms; ++a) {
          const Expr e = Leaf();
          body_ << "      " << sel.width << "'d" << a << ": " << r.name << " <= " << e.text << ";\n";
          est_ += e.nodes + 3;
        }
        const Expr d = Leaf();
        body_ << "      default: " << r.name << " <= " << d.text << ";\n    endcase\n";
        est_ += d.nodes;
      }
    }
    body_ << "  end\n";
  }

  Rng& rng_;
  int target_;
  int est_ = 0;
  std::vector<int> widths_;
  std::vector<Signal> pool_;
  std::ostringstream decls_;
  std::ostringstream body_;
};

}  // namespace

std::string GenerateDesign(Rng& rng, SizeClass cls, const std::string& module_name) {
  const SizeBounds b = Bounds(cls);
  for (int attempt = 0; attempt < 200; ++attempt) {
    const int span = b.max_nodes - b.min_nodes;
    const int target = b.min_nodes + static_cast<int>(rng.Below(span * 3 / 4 + 1));
    std::string text = Drafter(rng, cls, target).Draft(module_name);
    const int nodes = rtl::CompileVerilog(text).num_nodes();
    if (nodes >= b.min_nodes && nodes <= b.max_nodes) return text;
  }
  throw Error("could not draw a " + SizeClassName(cls) + " design within its node bounds");
}

}  // namespace structrtl::data
