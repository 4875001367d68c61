#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "structrtl/data/graph_input.h"
#include "structrtl/data/lowering.h"
#include "structrtl/distill/distill.h"
#include "structrtl/nn/checkpoint.h"
#include "structrtl/pm/netlist.h"
#include "structrtl/pm/teacher.h"
#include "structrtl/quality/regressor.h"
#include "structrtl/rtl/elaborate.h"
#include "structrtl/util/rng.h"

namespace structrtl::distill {
namespace {

TEST(KdLossTest, HandExamples) {
  EXPECT_DOUBLE_EQ(KdLossValue({0.3, -1.2, 2.0}, {0.3, -1.2, 2.0}), 0.0);
  EXPECT_DOUBLE_EQ(KdLossValue({1, 0}, {0, 1}), 1.0);
  EXPECT_NEAR(KdLossValue({1, 0}, {2, 0}), 0.15, 1e-15);
}

TEST(KdLossTest, SymmetricAndNonNegative) {
  Rng rng(1);
  for (int t = 0; t < 50; ++t) {
    std::vector<double> a(6), b(6);
    for (double& x : a) x = rng.Normal();
    for (double& x : b) x = rng.Normal();
    EXPECT_NEAR(KdLossValue(a, b), KdLossValue(b, a), 1e-15);
    EXPECT_GE(KdLossValue(a, b), 0.0);
  }
}

TEST(KdLossTest, ZeroVectorCosineIsOne) {
  // cosine term 1, mse term mean(a^2) = 0.5
  EXPECT_NEAR(KdLossValue({0, 0}, {1, 0}), 0.7 + 0.3 * 0.5, 1e-15);
}

TEST(DistillConfigTest, JsonRoundTripAndValidation) {
  DistillConfig c;
  c.mu = 0.25;
  c.regressor.epochs = 7;
  const DistillConfig back = DistillConfigFromJson(ToJson(c));
  EXPECT_EQ(back.mu, 0.25);
  EXPECT_EQ(back.tau, kKdTau);
  EXPECT_EQ(back.regressor.epochs, 7);
  nlohmann::json bad = ToJson(c);
  bad["mu"] = 1.5;
  EXPECT_THROW(DistillConfigFromJson(bad), Error);
}

class DistillTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const std::vector<std::string> sources = {
        "module a(input [3:0] x, input [3:0] y, output [3:0] z); assign z = x + y; endmodule",
        "module b(input [3:0] x, output z); assign z = ^x; endmodule",
        "module c(input [3:0] x, input [3:0] y, output z); assign z = x < y; endmodule",
        "module d(input clk, input [2:0] x, output [2:0] q); reg [2:0] r; always @(posedge clk) r <= r ^ x; assign q = r; endmodule",
    };
    for (const std::string& s : sources) {
      const cdfg::Cdfg g = rtl::CompileVerilog(s);
      graphs_.push_back(data::BuildGraphInput(g));
      netlists_.push_back(data::BuildNetlistInput(data::LowerToNetlist(g, lib_), lib_));
    }
    targets_ = {1.0, 0.2, 0.6, 1.4};
  }

  static nn::EncoderConfig Student() {
    nn::EncoderConfig c;
    c.hidden = 16;
    c.gin_layers = 1;
    c.transformer_layers = 1;
    c.heads = 2;
    c.ffn_multiplier = 2;
    return c;
  }
  static pm::TeacherConfig Teacher(int hidden) {
    pm::TeacherConfig c;
    c.hidden = hidden;
    c.layers = 2;
    return c;
  }

  pm::CellLibrary lib_ = pm::CellLibrary::Default();
  std::vector<nn::GraphInput> graphs_;
  std::vector<nn::GraphInput> netlists_;
  std::vector<double> targets_;
};

TEST_F(DistillTest, MuOneMatchesPlainRegression) {
  Rng trng(3);
  const pm::TeacherModel teacher(Teacher(16), trng);
  DistillConfig cfg;
  cfg.mu = 1.0;
  cfg.regressor.epochs = 20;
  cfg.regressor.batch_size = 2;

  Rng r1(4);
  nn::EncoderModel a(Student(), r1);
  const DistillResult kd = TrainStudentWithKd(teacher, a, graphs_, netlists_, targets_, cfg, 9);
  Rng r2(4);
  nn::EncoderModel b(Student(), r2);
  const std::vector<quality::EpochLoss> plain = quality::TrainRegressor(b, graphs_, targets_, cfg.regressor, 9);

  ASSERT_EQ(kd.log.size(), plain.size());
  for (size_t i = 0; i < plain.size(); ++i) {
    EXPECT_EQ(kd.log[i].l_qe, plain[i].l_qe) << "epoch " << i;
    EXPECT_EQ(kd.log[i].loss, plain[i].loss) << "epoch " << i;
  }
}

TEST_F(DistillTest, TeacherUnchangedAfterHundredSteps) {
  Rng trng(5);
  const pm::TeacherModel teacher(Teacher(16), trng);
  const uint64_t before = nn::ParameterChecksum(teacher.Parameters());
  DistillConfig cfg;
  cfg.regressor.epochs = 100;
  cfg.regressor.batch_size = 4;  // one step per epoch
  Rng r(6);
  nn::EncoderModel student(Student(), r);
  const DistillResult res = TrainStudentWithKd(teacher, student, graphs_, netlists_, targets_, cfg, 1);
  EXPECT_EQ(res.teacher_checksum_before, before);
  EXPECT_EQ(res.teacher_checksum_after, before);
  EXPECT_EQ(nn::ParameterChecksum(teacher.Parameters()), before);
  EXPECT_GT(res.log.back().l_kd, 0.0);
  EXPECT_LT(res.log.back().l_kd, res.log.front().l_kd);
}

TEST_F(DistillTest, WidthMismatchThrows) {
  Rng trng(7);
  const pm::TeacherModel teacher(Teacher(8), trng);
  Rng r(8);
  nn::EncoderModel student(Student(), r);
  DistillConfig cfg;
  cfg.regressor.epochs = 1;
  EXPECT_THROW(TrainStudentWithKd(teacher, student, graphs_, netlists_, targets_, cfg, 1), DimensionMismatch);
}

}  // namespace
}  // namespace structrtl::distill
