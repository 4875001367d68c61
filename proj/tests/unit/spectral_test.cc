#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include "structrtl/spectral/laplacian.h"

namespace structrtl::spectral {
namespace {

using cdfg::NodeType;

cdfg::Cdfg Chain(int n) {
  cdfg::Cdfg g;
  for (int i = 0; i < n; ++i) g.AddNode(NodeType::kWire, 1);
  for (int i = 0; i + 1 < n; ++i) g.AddEdge(i, i + 1, 0);
  return g;
}

cdfg::Cdfg RandomGraph(int n, double p, Rng& rng) {
  cdfg::Cdfg g;
  for (int i = 0; i < n; ++i) g.AddNode(NodeType::kWire, 1);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i != j && rng.Bernoulli(p)) g.AddEdge(i, j, 0);
    }
  }
  return g;
}

TEST(LaplacianTest, TwoNodePath) {
  Matrix l = NormalizedLaplacian(Chain(2));
  Matrix expected(2, 2);
  expected << 1, -1, -1, 1;
  EXPECT_LT((l - expected).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(LaplacianTest, TriangleSpectrumMatchesDenseSolver) {
  cdfg::Cdfg g = Chain(3);
  g.AddEdge(2, 0, 0);
  Matrix l = NormalizedLaplacian(g);
  Eigen::SelfAdjointEigenSolver<Matrix> oracle(l);
  EigenDecomposition eig = EigenDecompose(l);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(eig.values[i], oracle.eigenvalues()[i], 1e-10);
  EXPECT_NEAR(eig.values[0], 0.0, 1e-10);
  EXPECT_NEAR(eig.values[1], 1.5, 1e-10);
  EXPECT_NEAR(eig.values[2], 1.5, 1e-10);
}

TEST(LaplacianTest, IsolatedNode) {
  cdfg::Cdfg g;
  g.AddNode(NodeType::kInput, 1);
  Matrix l = NormalizedLaplacian(g);
  ASSERT_EQ(l.rows(), 1);
  EXPECT_EQ(l(0, 0), 1.0);
}

TEST(EigenTest, IdentityAndTwoByTwo) {
  EigenDecomposition id = EigenDecompose(Matrix::Identity(3, 3));
  for (int i = 0; i < 3; ++i) EXPECT_DOUBLE_EQ(id.values[i], 1.0);

  Matrix m(2, 2);
  m << 1, -1, -1, 1;
  EigenDecomposition eig = EigenDecompose(m);
  EXPECT_NEAR(eig.values[0], 0.0, 1e-12);
  EXPECT_NEAR(eig.values[1], 2.0, 1e-12);
  const double h = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(eig.vectors(0, 0), h, 1e-12);
  EXPECT_NEAR(eig.vectors(1, 0), h, 1e-12);
  EXPECT_NEAR(eig.vectors(0, 1), h, 1e-12);
  EXPECT_NEAR(eig.vectors(1, 1), -h, 1e-12);
}

TEST(EigenTest, RandomSymmetricResiduals) {
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    Matrix a(8, 8);
    for (int i = 0; i < 8; ++i)
      for (int j = 0; j <= i; ++j) a(i, j) = a(j, i) = rng.Uniform(-1, 1);
    EigenDecomposition eig = EigenDecompose(a);
    Eigen::SelfAdjointEigenSolver<Matrix> oracle(a);
    for (int k = 0; k < 8; ++k) {
      EXPECT_LE((a * eig.vectors.col(k) - eig.values[k] * eig.vectors.col(k)).norm(), 1e-8);
      EXPECT_NEAR(eig.values[k], oracle.eigenvalues()[k], 1e-9);
    }
    EXPECT_LE((eig.vectors.transpose() * eig.vectors - Matrix::Identity(8, 8)).cwiseAbs().maxCoeff(),
              1e-8);
  }
}

TEST(EigenTest, SweepBudgetExhaustion) {
  Matrix a(3, 3);
  a << 2, 1, 0.5, 1, 3, 0.2, 0.5, 0.2, 1;
  JacobiOptions opt;
  opt.max_sweeps = 0;
  EXPECT_THROW(EigenDecompose(a, opt), ConvergenceError);
}

TEST(PositionalEmbeddingsTest, PadsSmallGraphsWithZeros) {
  PositionalEmbeddings pe = ComputePositionalEmbeddings(Chain(3));
  ASSERT_EQ(pe.matrix.rows(), 3);
  ASSERT_EQ(pe.matrix.cols(), 16);
  EXPECT_EQ(pe.eigenvalues.size(), 3u);
  for (int j = 0; j < 3; ++j) EXPECT_NEAR(pe.matrix.col(j).norm(), 1.0, 1e-12);
  for (int j = 3; j < 16; ++j) EXPECT_EQ(pe.matrix.col(j).cwiseAbs().maxCoeff(), 0.0);
}

TEST(PositionalEmbeddingsTest, SingleNode) {
  cdfg::Cdfg g;
  cdfg::NodeAttrs one;
  one.value = "1";
  g.AddNode(NodeType::kConst, 1, one);
  PositionalEmbeddings pe = ComputePositionalEmbeddings(g);
  EXPECT_EQ(pe.matrix(0, 0), 1.0);
  EXPECT_EQ(pe.matrix.row(0).tail(15).cwiseAbs().maxCoeff(), 0.0);
}

TEST(PositionalEmbeddingsTest, LargerGraphResiduals) {
  Rng rng(3);
  cdfg::Cdfg g = RandomGraph(20, 0.15, rng);
  Matrix l = NormalizedLaplacian(g);
  PositionalEmbeddings pe = ComputePositionalEmbeddings(g);
  ASSERT_EQ(pe.eigenvalues.size(), 16u);
  for (int j = 0; j < 16; ++j) {
    EXPECT_LE((l * pe.matrix.col(j) - pe.eigenvalues[j] * pe.matrix.col(j)).norm(), 1e-8);
  }
}

TEST(PositionalEmbeddingsTest, SignFlipKeepsNormsAndZeros) {
  PositionalEmbeddings pe = ComputePositionalEmbeddings(Chain(5));
  Matrix a = pe.matrix, b = pe.matrix;
  Rng r1(11), r2(11);
  SignFlip(a, r1);
  SignFlip(b, r2);
  EXPECT_EQ(a, b);
  for (int j = 0; j < 16; ++j) {
    EXPECT_NEAR(a.col(j).norm(), pe.matrix.col(j).norm(), 1e-15);
    EXPECT_TRUE(a.col(j) == pe.matrix.col(j) || a.col(j) == -pe.matrix.col(j));
  }
}

TEST(PositionalEmbeddingsTest, JsonRoundTrip) {
  PositionalEmbeddings pe = ComputePositionalEmbeddings(Chain(4));
  PositionalEmbeddings back = PositionalEmbeddingsFromJson(ToJson(pe));
  EXPECT_EQ(back.matrix, pe.matrix);
  EXPECT_EQ(back.eigenvalues, pe.eigenvalues);
}

}  // namespace
}  // namespace structrtl::spectral
