#include <gtest/gtest.h>

#include "structrtl/cdfg/analysis.h"
#include "structrtl/cdfg/serialize.h"
#include "structrtl/rtl/ast.h"
#include "structrtl/rtl/elaborate.h"
#include "structrtl/rtl/parser.h"
#include "structrtl/rtl/token.h"

namespace structrtl::rtl {
namespace {

using cdfg::NodeType;

int CountType(const cdfg::Cdfg& g, NodeType t) {
  int n = 0;
  for (const auto& node : g.nodes()) n += node.type == t;
  return n;
}

TEST(LexerTest, TokenizesContinuousAssign) {
  auto toks = Tokenize("assign y = a & b;");
  ASSERT_EQ(toks.size(), 8u);
  EXPECT_EQ(toks[0].kind, TokenKind::kKeyword);
  EXPECT_EQ(toks[1].kind, TokenKind::kIdentifier);
  EXPECT_EQ(toks[2].text, "=");
  EXPECT_EQ(toks[4].text, "&");
  EXPECT_EQ(toks[6].kind, TokenKind::kPunctuation);
  EXPECT_EQ(toks[7].kind, TokenKind::kEof);
}

TEST(LexerTest, SizedBinaryLiteral) {
  auto toks = Tokenize("4'b1010");
  ASSERT_EQ(toks[0].kind, TokenKind::kNumber);
  EXPECT_EQ(toks[0].number->width, 4);
  EXPECT_EQ(toks[0].number->value(), 10u);
}

TEST(LexerTest, StripsComments) {
  auto toks = Tokenize("a // line\n /* block\n */ b");
  ASSERT_EQ(toks.size(), 3u);
  EXPECT_EQ(toks[1].text, "b");
  EXPECT_EQ(toks[1].line, 3);
}

TEST(LexerTest, RejectsIllegalCharacterWithPosition) {
  try {
    Tokenize("a\n  \x7f b");
    FAIL();
  } catch (const LexError& e) {
    EXPECT_EQ(e.line(), 2);
    EXPECT_EQ(e.column(), 3);
  }
}

TEST(ParserTest, MinimalModule) {
  auto m = ParseModule("module m(input a, output y); assign y = a; endmodule");
  EXPECT_EQ(m.name, "m");
  ASSERT_EQ(m.ports.size(), 2u);
  EXPECT_EQ(m.ports[1].dir, Direction::kOutput);
  ASSERT_EQ(m.assigns.size(), 1u);
  EXPECT_EQ(ToString(*m.assigns[0].rhs), "a");
}

TEST(ParserTest, MissingSemicolonReportsLocation) {
  try {
    ParseModule("module m(input a, output y);\nassign y = a\nendmodule");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3);
  }
}

TEST(ParserTest, UnsupportedInstantiation) {
  EXPECT_THROW(ParseModule("module m(input a, output y); sub u(.a(a)); endmodule"),
               UnsupportedConstruct);
}

TEST(ElaborateTest, InverterHasThreeNodes) {
  auto g = CompileVerilog("module m(input a, output b); assign b = ~a; endmodule");
  EXPECT_EQ(g.num_nodes(), 3);
  EXPECT_EQ(g.num_edges(), 2);
  EXPECT_EQ(CountType(g, NodeType::kNot), 1);
}

TEST(ElaborateTest, AndGate) {
  auto g = CompileVerilog("module m(input a, input b, output y); assign y = a & b; endmodule");
  EXPECT_EQ(g.num_nodes(), 4);
  EXPECT_EQ(CountType(g, NodeType::kBitAnd), 1);
}

TEST(ElaborateTest, TernaryOperandOrder) {
  auto g = CompileVerilog(
      "module m(input s, input [3:0] a, input [3:0] b, output [3:0] y);"
      " assign y = s ? a : b; endmodule");
  int cond = -1;
  for (const auto& n : g.nodes()) if (n.type == NodeType::kCond) cond = n.id;
  ASSERT_GE(cond, 0);
  EXPECT_EQ(g.node(cond).width, 4);
  std::map<int, std::string> by_op;
  for (const auto& e : g.edges()) {
    if (e.dst == cond) by_op[e.operand_index] = *g.node(e.src).attrs.name;
  }
  EXPECT_EQ(by_op[0], "s");
  EXPECT_EQ(by_op[1], "a");
  EXPECT_EQ(by_op[2], "b");
}

TEST(ElaborateTest, CounterFormsRegisterCycle) {
  auto g = CompileVerilog(
      "module c(input clk, output reg [7:0] q);"
      " always @(posedge clk) q <= q + 1; endmodule");
  EXPECT_EQ(CountType(g, NodeType::kReg), 1);
  EXPECT_EQ(CountType(g, NodeType::kAdd), 1);
  EXPECT_TRUE(cdfg::Validate(g).empty());
  int reg = -1;
  for (const auto& n : g.nodes()) if (n.type == NodeType::kReg) reg = n.id;
  EXPECT_EQ(*g.node(reg).attrs.clock, "clk");
  // clk carries no data edge.
  for (const auto& e : g.edges()) EXPECT_NE(g.node(e.src).attrs.name.value_or(""), "clk");
}

TEST(ElaborateTest, CaseWithTwoArmsHasTwoComparisons) {
  auto g = CompileVerilog(
      "module m(input [1:0] s, input a, input b, output reg y);"
      " always @(*) case (s) 2'd0: y = a; 2'd1: y = b; default: y = 1'b0; endcase"
      " endmodule");
  EXPECT_EQ(CountType(g, NodeType::kEq), 2);
  EXPECT_EQ(CountType(g, NodeType::kCond), 2);
}

TEST(ElaborateTest, IfWithoutElseInRegisterHolds) {
  auto g = CompileVerilog(
      "module m(input clk, input en, input [3:0] d, output reg [3:0] q);"
      " always @(posedge clk) if (en) q <= d; endmodule");
  ASSERT_EQ(CountType(g, NodeType::kCond), 1);
  int reg = -1, cond = -1;
  for (const auto& n : g.nodes()) {
    if (n.type == NodeType::kReg) reg = n.id;
    if (n.type == NodeType::kCond) cond = n.id;
  }
  bool hold = false;
  for (const auto& e : g.edges()) hold |= e.src == reg && e.dst == cond && e.operand_index == 2;
  EXPECT_TRUE(hold);
}

TEST(ElaborateTest, LatchIsRejected) {
  EXPECT_THROW(CompileVerilog("module m(input en, input d, output reg q);"
                              " always @(*) if (en) q = d; endmodule"),
               ElaborationError);
}

TEST(ElaborateTest, UndrivenOutputIsRejected) {
  EXPECT_THROW(CompileVerilog("module m(input a, output y); endmodule"), ElaborationError);
}

TEST(ElaborateTest, MultiplyDrivenIsRejected) {
  EXPECT_THROW(CompileVerilog("module m(input a, input b, output y);"
                              " assign y = a; assign y = b; endmodule"),
               ElaborationError);
}

TEST(ElaborateTest, CombinationalLoopIsRejected) {
  EXPECT_THROW(CompileVerilog("module m(input a, output y); wire w;"
                              " assign w = w & a; assign y = w; endmodule"),
               ElaborationError);
}

TEST(ElaborateTest, UndeclaredIdentifier) {
  EXPECT_THROW(CompileVerilog("module m(input a, output y); assign y = z; endmodule"),
               ElaborationError);
}

TEST(ElaborateTest, PartSelectAttributes) {
  auto g = CompileVerilog("module m(input [7:0] a, output [3:0] y); assign y = a[6:3]; endmodule");
  for (const auto& n : g.nodes()) {
    if (n.type == NodeType::kPartSelect) {
      EXPECT_EQ(n.width, 4);
      EXPECT_EQ(*n.attrs.msb, 6);
      EXPECT_EQ(*n.attrs.lsb, 3);
    }
  }
  EXPECT_THROW(CompileVerilog("module m(input [7:0] a, output y); assign y = a[9]; endmodule"),
               ElaborationError);
}

TEST(ElaborateTest, ReadOfOutputResolvesToDriver) {
  auto g = CompileVerilog(
      "module m(input a, input b, output x, output y);"
      " assign y = x | b; assign x = a & b; endmodule");
  EXPECT_TRUE(cdfg::Validate(g).empty());
  int and_id = -1, or_id = -1;
  for (const auto& n : g.nodes()) {
    if (n.type == NodeType::kBitAnd) and_id = n.id;
    if (n.type == NodeType::kBitOr) or_id = n.id;
  }
  bool linked = false;
  for (const auto& e : g.edges()) linked |= e.src == and_id && e.dst == or_id;
  EXPECT_TRUE(linked);
}

TEST(ElaborateTest, DeterministicSerialization) {
  const char* src =
      "module m(input clk, input [3:0] a, input [3:0] b, output reg [3:0] q, output z);"
      " wire [3:0] s; assign s = a + b; assign z = ^s;"
      " always @(posedge clk) begin if (a < b) q <= s; else q <= q - 1; end endmodule";
  EXPECT_EQ(cdfg::ToJson(CompileVerilog(src)), cdfg::ToJson(CompileVerilog(src)));
}

TEST(ElaborateTest, BlockingAssignmentsChainInsideClockedBlock) {
  auto g = CompileVerilog(
      "module m(input clk, input [3:0] a, output reg [3:0] q); reg [3:0] t;"
      " always @(posedge clk) begin t = a + 1; q <= t + 1; end endmodule");
  EXPECT_EQ(CountType(g, NodeType::kAdd), 2);
  EXPECT_EQ(CountType(g, NodeType::kReg), 2);
}

}  // namespace
}  // namespace structrtl::rtl
