#include <algorithm>
#include <filesystem>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "structrtl/cdfg/analysis.h"
#include "structrtl/data/dataset.h"
#include "structrtl/data/generator.h"
#include "structrtl/data/label_oracle.h"
#include "structrtl/data/lowering.h"
#include "structrtl/pm/netlist.h"
#include "structrtl/rtl/elaborate.h"
#include "structrtl/util/io.h"
#include "structrtl/util/rng.h"

namespace structrtl::data {
namespace {

using cdfg::NodeType;

// Every path in the graph where each Reg is split into a source copy
// (out-edges, flop delay) and a sink copy (in-edges, weight 0), enumerated
// exhaustively by DFS.
double BruteForceDelay(const cdfg::Cdfg& g, const OracleCosts& costs) {
  const int n = g.num_nodes();
  // split ids: v for the original / source copy, n + v for a Reg's sink copy
  std::vector<std::vector<int>> succ(2 * n);
  for (const cdfg::Edge& e : g.edges()) {
    const int dst = g.node(e.dst).type == NodeType::kReg ? n + e.dst : e.dst;
    succ[e.src].push_back(dst);
  }
  auto weight = [&](int s) { return s >= n ? 0.0 : costs.delay[static_cast<int>(g.node(s).type)]; };
  double best = 0.0;
  std::function<void(int, double)> walk = [&](int s, double acc) {
    acc += weight(s);
    best = std::max(best, acc);
    for (int t : succ[s]) walk(t, acc);
  };
  for (int v = 0; v < n; ++v) walk(v, 0.0);
  return costs.base_delay + best;
}

// Random graph whose only cycles pass through Reg nodes.
cdfg::Cdfg RandomGraph(Rng& rng, int n) {
  static const std::vector<NodeType> kTypes = {
      NodeType::kInput, NodeType::kAdd, NodeType::kMul, NodeType::kBitAnd, NodeType::kWire,
      NodeType::kReg,   NodeType::kEq,  NodeType::kCond, NodeType::kNot,   NodeType::kOutput};
  cdfg::Cdfg g;
  for (int v = 0; v < n; ++v) g.AddNode(kTypes[rng.Below(kTypes.size())], static_cast<int>(1 + rng.Below(4)));
  std::vector<int> slot(n, 0);
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) {
      if (rng.Uniform() < 0.3) g.AddEdge(u, v, slot[v]++);
    }
    for (int v = 0; v < u; ++v) {
      if (g.node(v).type == NodeType::kReg && rng.Uniform() < 0.3) g.AddEdge(u, v, slot[v]++);
    }
  }
  return g;
}

TEST(LabelOracleTest, WireThroughIsMinimal) {
  const pm::CellLibrary lib = pm::CellLibrary::Default();
  const cdfg::Cdfg g = rtl::CompileVerilog("module m(input a, output y); assign y = a; endmodule");
  const QualityLabels q = LabelOracle(g, lib);
  EXPECT_GT(q.area, 0.0);
  EXPECT_DOUBLE_EQ(q.area, 2 * lib.at("BUF").area);
  EXPECT_DOUBLE_EQ(q.delay, kBaseWireDelay);
}

TEST(LabelOracleTest, AddingAddIncreasesArea) {
  const pm::CellLibrary lib = pm::CellLibrary::Default();
  cdfg::Cdfg g = rtl::CompileVerilog(
      "module m(input [3:0] a, input [3:0] b, output [3:0] y); assign y = a & b; endmodule");
  const double before = LabelOracle(g, lib).area;
  g.AddNode(NodeType::kAdd, 1);
  EXPECT_GT(LabelOracle(g, lib).area, before);
}

TEST(LabelOracleTest, DelayMatchesBruteForce) {
  const OracleCosts costs = DeriveCosts(pm::CellLibrary::Default());
  Rng rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    const cdfg::Cdfg g = RandomGraph(rng, static_cast<int>(1 + rng.Below(12)));
    ASSERT_NEAR(OracleDelay(g, costs), BruteForceDelay(g, costs), 1e-9) << "trial " << trial;
  }
}

TEST(LabelOracleTest, DelayMatchesBruteForceOnTinyDesigns) {
  const OracleCosts costs = DeriveCosts(pm::CellLibrary::Default());
  Rng rng(12);
  int checked = 0;
  for (int i = 0; i < 200 && checked < 40; ++i) {
    const cdfg::Cdfg g = rtl::CompileVerilog(GenerateDesign(rng, SizeClass::kTiny));
    if (g.num_nodes() > 12) continue;
    ++checked;
    EXPECT_NEAR(OracleDelay(g, costs), BruteForceDelay(g, costs), 1e-9);
  }
  EXPECT_GT(checked, 0);
}

TEST(LabelOracleTest, RegisterCutsLoop) {
  const pm::CellLibrary lib = pm::CellLibrary::Default();
  const cdfg::Cdfg g = rtl::CompileVerilog(R"(
    module c(input clk, output [3:0] q);
      reg [3:0] r;
      always @(posedge clk) r <= r + 4'd1;
      assign q = r;
    endmodule)");
  const OracleCosts costs = DeriveCosts(lib);
  const double expected = costs.base_delay + costs.delay[static_cast<int>(NodeType::kReg)] +
                          costs.delay[static_cast<int>(NodeType::kAdd)];
  EXPECT_NEAR(LabelOracle(g, lib).delay, expected, 1e-12);
}

TEST(LoweringTest, NetlistAreaEqualsOracleArea) {
  const pm::CellLibrary lib = pm::CellLibrary::Default();
  Rng rng(13);
  for (int i = 0; i < 30; ++i) {
    const cdfg::Cdfg g = rtl::CompileVerilog(GenerateDesign(rng, i % 3 == 0 ? SizeClass::kSmall : SizeClass::kTiny));
    const pm::Netlist n = LowerToNetlist(g, lib);
    double area = 0.0;
    for (const pm::Cell& c : n.cells) area += lib.at(c.type).area;
    const double oracle = OracleArea(g, DeriveCosts(lib));
    EXPECT_NEAR(area, oracle, 1e-9 * std::max(1.0, oracle));
    // the lowered netlist is valid under the parser's checks
    EXPECT_NO_THROW(pm::ParseNetlist(pm::ToJson(n), lib));
  }
}

TEST(SplitTest, TenRecords) {
  const std::vector<Split> s = AssignSplit(10, 0.8, 1);
  EXPECT_EQ(std::count(s.begin(), s.end(), Split::kTrain), 8);
  EXPECT_EQ(std::count(s.begin(), s.end(), Split::kVal), 2);
  EXPECT_EQ(AssignSplit(10, 0.8, 1), s);
}

TEST(SplitTest, SeedsDiffer) {
  int same = 0;
  for (uint64_t seed = 0; seed < 50; ++seed) same += AssignSplit(20, 0.8, seed) == AssignSplit(20, 0.8, seed + 1000);
  EXPECT_EQ(same, 0);
}

TEST(GeneratorTest, Deterministic) {
  for (SizeClass cls : {SizeClass::kTiny, SizeClass::kSmall, SizeClass::kMedium}) {
    Rng a(21), b(21);
    EXPECT_EQ(GenerateDesign(a, cls), GenerateDesign(b, cls));
  }
  EXPECT_EQ(GenerateSources(5, 3), GenerateSources(5, 3));
  EXPECT_NE(GenerateSources(5, 3), GenerateSources(5, 4));
}

TEST(GeneratorTest, SizeClassBoundsAndPositiveLabels) {
  const pm::CellLibrary lib = pm::CellLibrary::Default();
  Rng rng(22);
  for (SizeClass cls : {SizeClass::kTiny, SizeClass::kSmall, SizeClass::kMedium}) {
    for (int i = 0; i < 5; ++i) {
      const cdfg::Cdfg g = rtl::CompileVerilog(GenerateDesign(rng, cls));
      EXPECT_GE(g.num_nodes(), Bounds(cls).min_nodes);
      EXPECT_LE(g.num_nodes(), Bounds(cls).max_nodes);
      const QualityLabels q = LabelOracle(g, lib);
      EXPECT_GT(q.area, 0.0);
      EXPECT_GT(q.delay, 0.0);
    }
  }
}

TEST(GeneratorTest, WireIsMostFrequentType) {
  std::vector<cdfg::Cdfg> corpus;
  for (const std::string& src : GenerateSources(100, 5)) corpus.push_back(rtl::CompileVerilog(src));
  const cdfg::NodeTypeHistogram h = cdfg::ComputeHistogram(corpus);
  const auto top = std::max_element(h.counts.begin(), h.counts.end()) - h.counts.begin();
  EXPECT_EQ(static_cast<NodeType>(top), NodeType::kWire);
}

TEST(SizeClassTest, Names) {
  for (SizeClass cls : {SizeClass::kTiny, SizeClass::kSmall, SizeClass::kMedium}) {
    EXPECT_EQ(ParseSizeClass(SizeClassName(cls)), cls);
  }
  EXPECT_THROW(ParseSizeClass("huge"), Error);
}

class CorpusTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() / "structrtl_corpus_test";
    std::filesystem::remove_all(dir_);
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }
  std::filesystem::path dir_;
};

TEST_F(CorpusTest, GenerateAndLoad) {
  const pm::CellLibrary lib = pm::CellLibrary::Default();
  const std::string manifest = GenerateCorpus(dir_.string(), 10, 7, lib);
  const Dataset ds = LoadDataset(manifest, lib);
  ASSERT_EQ(ds.records.size(), 10u);
  EXPECT_EQ(ds.train.size(), 8u);
  EXPECT_EQ(ds.val.size(), 2u);
  for (size_t i = 0; i < 10; ++i) {
    const QualityLabels q = LabelOracle(ds.graphs[i], lib);
    EXPECT_DOUBLE_EQ(ds.area[i], q.area);
    EXPECT_DOUBLE_EQ(ds.delay[i], q.delay);
    EXPECT_EQ(ds.netlists[i].num_nodes(), static_cast<int>(LowerToNetlist(ds.graphs[i], lib).cells.size()));
  }
}

TEST_F(CorpusTest, ManifestRoundTripAndMissingLabels) {
  std::filesystem::create_directories(dir_);
  WriteFile((dir_ / "a.v").string(), "module a(input x, output y); assign y = ~x; endmodule\n");
  std::vector<DesignRecord> recs(2);
  recs[0] = {"a", "a.v", "", 3.25, 1.5, Split::kTrain};
  recs[1] = {"b", "a.v", "", std::nullopt, std::nullopt, Split::kTrain};
  const std::string path = (dir_ / "m.csv").string();
  WriteManifest(path, recs);
  const std::vector<DesignRecord> back = ReadManifest(path);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].area, 3.25);
  EXPECT_EQ(back[0].delay, 1.5);
  EXPECT_FALSE(back[1].area.has_value());
  const pm::CellLibrary lib = pm::CellLibrary::Default();
  const Dataset ds = LoadDataset(path, lib);
  EXPECT_EQ(ds.area[0], 3.25);
  EXPECT_DOUBLE_EQ(ds.area[1], LabelOracle(ds.graphs[1], lib).area);
}

TEST_F(CorpusTest, RejectsBadManifests) {
  std::filesystem::create_directories(dir_);
  const std::string path = (dir_ / "m.csv").string();
  WriteFile(path, "id,verilog\n");
  EXPECT_THROW(ReadManifest(path), Error);
  WriteFile((dir_ / "a.v").string(), "module a(input x, output y); assign y = x; endmodule\n");
  WriteFile(path, "design_id,verilog,netlist,area,delay\na,a.v,,-1,2\n");
  EXPECT_THROW(ReadManifest(path), Error);
}

}  // namespace
}  // namespace structrtl::data
