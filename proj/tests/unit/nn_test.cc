#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "structrtl/nn/checkpoint.h"
#include "structrtl/nn/encoder.h"
#include "structrtl/nn/gradcheck.h"
#include "structrtl/nn/layers.h"
#include "structrtl/nn/ops.h"
#include "structrtl/nn/optim.h"
#include "structrtl/util/error.h"

namespace structrtl::nn {
namespace {

Matrix RandomMatrix(int r, int c, Rng& rng, double scale = 1.0) {
  Matrix m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = scale * rng.Normal();
  return m;
}

// Contracts an arbitrary output with fixed random weights so every output
// entry contributes to the scalar being checked.
Tensor Contract(const Tensor& out, const Matrix& w) { return Sum(Mul(out, Constant(w))); }

constexpr double kTol = 1e-4;

TEST(TensorTest, SumGradientIsOne) {
  Tensor p = Parameter(Matrix::Constant(2, 3, 0.5));
  Sum(p).Backward();
  EXPECT_EQ(p.grad(), Matrix::Ones(2, 3));
}

TEST(TensorTest, SecondBackwardThrows) {
  Tensor p = Parameter(Matrix::Constant(1, 2, 1.0));
  Tensor loss = Sum(Mul(p, p));
  loss.Backward();
  EXPECT_THROW(loss.Backward(), Error);
}

TEST(TensorTest, DetachedReceivesNoGradient) {
  Tensor p = Parameter(Matrix::Constant(1, 2, 1.0));
  Tensor d = p.Detach();
  Tensor q = Parameter(Matrix::Constant(1, 2, 2.0));
  Sum(Mul(d, q)).Backward();
  EXPECT_FALSE(p.has_grad());
  EXPECT_FALSE(d.has_grad());
  EXPECT_EQ(q.grad(), Matrix::Ones(1, 2));
}

TEST(TensorTest, ReusedTensorAccumulates) {
  Tensor p = Parameter(Matrix::Constant(1, 1, 3.0));
  Add(p, p).Backward();
  EXPECT_DOUBLE_EQ(p.grad()(0, 0), 2.0);
}

TEST(GradCheckTest, ElementwiseAndMatrixOps) {
  Rng rng(1);
  for (int trial = 0; trial < 5; ++trial) {
    const int r = 1 + static_cast<int>(rng.Below(4));
    const int c = 1 + static_cast<int>(rng.Below(4));
    const int k = 1 + static_cast<int>(rng.Below(4));
    Tensor a = Parameter(RandomMatrix(r, c, rng));
    Tensor b = Parameter(RandomMatrix(c, k, rng));
    Tensor bias = Parameter(RandomMatrix(1, k, rng));
    Tensor same = Parameter(RandomMatrix(r, c, rng));
    const Matrix w1 = RandomMatrix(r, k, rng);
    const Matrix w2 = RandomMatrix(r, c, rng);
    auto loss = [&] {
      Tensor x = Add(MatMul(a, b), bias);
      Tensor y = Sub(Mul(a, same), Scale(Transpose(Transpose(same)), 0.3));
      return Add(Contract(Gelu(x), w1), Contract(Relu(y), w2));
    };
    auto res = CheckGradients(loss, {a, b, bias, same});
    EXPECT_LE(res.max_relative_error, kTol) << res.worst;
  }
}

TEST(GradCheckTest, SoftmaxLayerNormSlicingGather) {
  Rng rng(2);
  for (int trial = 0; trial < 5; ++trial) {
    const int r = 2 + static_cast<int>(rng.Below(4));
    const int c = 2 + static_cast<int>(rng.Below(5));
    Tensor x = Parameter(RandomMatrix(r, c, rng));
    Tensor gamma = Parameter(RandomMatrix(1, c, rng));
    Tensor beta = Parameter(RandomMatrix(1, c, rng));
    Tensor token = Parameter(RandomMatrix(1, c, rng));
    std::vector<bool> mask(r, false);
    mask[0] = true;
    const std::vector<int> rows = {r - 1, 0, r - 1};
    const Matrix w1 = RandomMatrix(r, c, rng);
    const Matrix w2 = RandomMatrix(3, c + 1, rng);
    auto loss = [&] {
      Tensor s = SoftmaxRows(x);
      Tensor n = LayerNorm(ReplaceRows(x, mask, token), gamma, beta);
      Tensor g = ConcatCols({GatherRows(n, rows), SliceCols(GatherRows(s, rows), 1, 1)});
      return Add(Contract(s, w1), Contract(g, w2));
    };
    auto res = CheckGradients(loss, {x, gamma, beta, token});
    EXPECT_LE(res.max_relative_error, kTol) << res.worst;
  }
}

TEST(GradCheckTest, PoolingAndAggregation) {
  Rng rng(3);
  for (int trial = 0; trial < 5; ++trial) {
    const int n = 2 + static_cast<int>(rng.Below(5));
    const int c = 1 + static_cast<int>(rng.Below(4));
    Tensor h = Parameter(RandomMatrix(n, c, rng));
    Tensor eps = Parameter(RandomMatrix(1, 1, rng, 0.1));
    EdgeList e;
    for (int i = 0; i < 2 * n; ++i) {
      e.src.push_back(static_cast<int>(rng.Below(n)));
      e.dst.push_back(static_cast<int>(rng.Below(n)));
    }
    const Matrix w = RandomMatrix(1, 2 * c, rng);
    const Matrix w2 = RandomMatrix(n, c, rng);
    auto loss = [&] {
      Tensor agg = GinAggregate(h, eps, e.src, e.dst);
      return Add(Contract(MeanMaxPool(agg), w), Add(Contract(agg, w2), Mean(ConcatRows({h, agg}))));
    };
    auto res = CheckGradients(loss, {h, eps});
    EXPECT_LE(res.max_relative_error, kTol) << res.worst;
  }
}

TEST(GradCheckTest, Losses) {
  Rng rng(4);
  for (int trial = 0; trial < 5; ++trial) {
    const int b = 1 + static_cast<int>(rng.Below(5));
    Tensor logits = Parameter(RandomMatrix(b, 5, rng));
    std::vector<int> labels;
    std::vector<double> targets;
    for (int i = 0; i < b; ++i) {
      labels.push_back(static_cast<int>(rng.Below(5)));
      targets.push_back(static_cast<double>(rng.Below(2)));
    }
    std::vector<double> weights = {0.5, 1.2, 0.3, 2.0, 1.0};
    Tensor col = Parameter(RandomMatrix(b, 1, rng));
    Tensor target = Parameter(RandomMatrix(b, 1, rng));
    Tensor za = Parameter(RandomMatrix(b, 4, rng));
    Tensor zb = Parameter(RandomMatrix(b, 4, rng));
    auto loss = [&] {
      Tensor l1 = ClassBalancedFocalLoss(logits, labels, weights, 2.0);
      Tensor l2 = BceWithLogits(col, targets);
      Tensor l3 = LogCoshLoss(col, target);
      Tensor l4 = KdLoss(za, zb, 0.7);
      return Add(Add(l1, l2), Add(l3, l4));
    };
    auto res = CheckGradients(loss, {logits, col, target, za, zb});
    EXPECT_LE(res.max_relative_error, kTol) << res.worst;
  }
}

TEST(GradCheckTest, GinAndTransformerLayers) {
  Rng rng(5);
  for (int trial = 0; trial < 3; ++trial) {
    const int n = 2 + static_cast<int>(rng.Below(4));
    GinLayer gin(3, 4, rng);
    TransformerLayer tl(4, 2, 8, rng);
    Mlp head({8, 4, 4, 1}, Activation::kRelu, rng);
    Tensor x = Parameter(RandomMatrix(n, 3, rng));
    EdgeList e;
    for (int i = 0; i + 1 < n; ++i) {
      e.src.push_back(i);
      e.dst.push_back(i + 1);
    }
    ParameterList params;
    gin.Collect("gin.", params);
    tl.Collect("tl.", params);
    head.Collect("head.", params);
    std::vector<Tensor> inputs = Tensors(params);
    inputs.push_back(x);
    auto loss = [&] { return Sum(head.Forward(MeanMaxPool(tl.Forward(gin.Forward(x, e))))); };
    auto res = CheckGradients(loss, inputs);
    EXPECT_LE(res.max_relative_error, kTol) << res.worst;
  }
}

TEST(GinLayerTest, EmptySumWithIdentityMlp) {
  Rng rng(0);
  GinLayer gin(2, 2, rng);
  for (Linear& l : gin.mlp.layers) {
    l.weight.mutable_value() = Matrix::Identity(2, 2);
    l.bias.mutable_value().setZero();
  }
  Matrix h(3, 2);
  h << 1, 0, 0, 1, 1, 1;
  EdgeList edges{{0, 1}, {2, 2}};
  Tensor out = gin.Forward(Constant(h), edges);
  // Nodes 0 and 1 have no in-edges; node 2 sums [1,1] + [1,0] + [0,1].
  EXPECT_EQ(out.value().row(0), h.row(0));
  EXPECT_EQ(out.value().row(1), h.row(1));
  EXPECT_DOUBLE_EQ(out.value()(2, 0), 2.0);
  EXPECT_DOUBLE_EQ(out.value()(2, 1), 2.0);
}

TEST(PoolTest, MeanMax) {
  Matrix h(2, 2);
  h << 1, 2, 3, 0;
  Tensor p = MeanMaxPool(Constant(h));
  Matrix expected(1, 4);
  expected << 2, 1, 3, 2;
  EXPECT_EQ(p.value(), expected);
}

TEST(NumericsTest, SoftmaxAndLayerNormProperties) {
  Rng rng(9);
  Matrix x = RandomMatrix(6, 9, rng, 3.0);
  Tensor s = SoftmaxRows(Constant(x));
  for (int r = 0; r < 6; ++r) EXPECT_NEAR(s.value().row(r).sum(), 1.0, 1e-12);
  Tensor n = LayerNorm(Constant(x), Constant(Matrix::Ones(1, 9)), Constant(Matrix::Zero(1, 9)));
  for (int r = 0; r < 6; ++r) {
    const double mean = n.value().row(r).mean();
    const double var = (n.value().row(r).array() - mean).square().mean();
    EXPECT_LE(std::abs(mean), 1e-10);
    EXPECT_NEAR(var, 1.0, 1e-6);
  }
}

TEST(TransformerTest, SingleNodeAttentionIsValueProjection) {
  Rng rng(6);
  MultiHeadAttention mha(4, 2, rng);
  Tensor x = Constant(RandomMatrix(1, 4, rng));
  Tensor out = mha.Forward(x);
  Tensor expected = mha.output.Forward(mha.value.Forward(x));
  EXPECT_LE((out.value() - expected.value()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(TransformerTest, PermutationEquivariance) {
  Rng rng(7);
  EncoderConfig cfg;
  cfg.hidden = 8;
  cfg.heads = 2;
  cfg.gin_layers = 1;
  cfg.transformer_layers = 2;
  EncoderModel model(cfg, rng);
  const int n = 5;
  Matrix h = RandomMatrix(n, 8, rng);
  Matrix pe = RandomMatrix(n, 16, rng);
  const std::vector<int> perm = {3, 0, 4, 1, 2};
  Matrix hp(n, 8), pep(n, 16);
  for (int i = 0; i < n; ++i) {
    hp.row(i) = h.row(perm[i]);
    pep.row(i) = pe.row(perm[i]);
  }
  Matrix out = model.EncodeTransformer(Constant(h), Constant(pe)).value();
  Matrix outp = model.EncodeTransformer(Constant(hp), Constant(pep)).value();
  for (int i = 0; i < n; ++i) {
    EXPECT_LE((outp.row(i) - out.row(perm[i])).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(AdamTest, ZeroGradientNoDecayLeavesParameters) {
  Tensor p = Parameter(Matrix::Constant(2, 2, 1.5));
  Adam opt({{{p}, 0.1, 0.0}}, {});
  for (int i = 0; i < 5; ++i) opt.Step();
  EXPECT_EQ(p.value(), Matrix::Constant(2, 2, 1.5));
}

TEST(AdamTest, StepOnSquareDescends) {
  Tensor x = Parameter(Matrix::Constant(1, 1, 1.0));
  Adam opt({{{x}, 0.01, 0.0}}, {});
  Mul(x, x).Backward();
  opt.Step();
  EXPECT_LT(x.item(), 1.0);
}

TEST(AdamTest, QuadraticConverges) {
  for (WeightDecayMode mode : {WeightDecayMode::kCoupled, WeightDecayMode::kDecoupled}) {
    Tensor x = Parameter(Matrix(Eigen::RowVector2d(1.0, -2.0)));
    AdamOptions o;
    o.mode = mode;
    Adam opt({{{x}, 0.05, 1e-4}}, o);
    Matrix scale(1, 2);
    scale << 1.0, 3.0;
    for (int i = 0; i < 200; ++i) {
      opt.ZeroGrad();
      Sum(Mul(Mul(x, x), Constant(scale))).Backward();
      opt.Step();
    }
    EXPECT_LE(x.value().norm(), 1e-3);
  }
}

TEST(AdamTest, DecoupledDecayShrinksWithoutGradient) {
  Tensor p = Parameter(Matrix::Constant(1, 1, 2.0));
  AdamOptions o;
  o.mode = WeightDecayMode::kDecoupled;
  Adam opt({{{p}, 0.1, 0.5}}, o);
  opt.Step();
  EXPECT_DOUBLE_EQ(p.item(), 2.0 - 0.1 * 0.5 * 2.0);
}

TEST(CheckpointTest, RoundTripWithOptimizerState) {
  Rng rng(8);
  EncoderConfig cfg;
  cfg.hidden = 8;
  cfg.heads = 2;
  cfg.gin_layers = 2;
  cfg.transformer_layers = 1;
  EncoderModel a(cfg, rng);
  Adam opt({{Tensors(a.Parameters()), 1e-3, 0.0}}, {});
  Sum(a.mask_token).Backward();
  opt.Step();

  Checkpoint ckpt;
  ckpt.kind = "encoder";
  ckpt.meta["config"] = ToJson(cfg);
  StoreParameters(a.Parameters(), ckpt);
  opt.SaveState(ckpt);
  const std::string path = (std::filesystem::temp_directory_path() / "structrtl_ckpt_test.bin").string();
  SaveCheckpoint(ckpt, path);

  Checkpoint back = LoadCheckpoint(path);
  EXPECT_EQ(back.kind, "encoder");
  Rng other(99);
  EncoderModel b(EncoderConfigFromJson(back.meta["config"]), other);
  RestoreParameters(back, b.Parameters());
  EXPECT_EQ(ParameterChecksum(a.Parameters()), ParameterChecksum(b.Parameters()));
  Adam opt2({{Tensors(b.Parameters()), 1e-3, 0.0}}, {});
  opt2.LoadState(back);
  EXPECT_EQ(opt2.step_count(), 1);
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace structrtl::nn
