#include "structrtl/spectral/laplacian.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "json.hpp"

namespace structrtl::spectral {

Matrix NormalizedLaplacian(const cdfg::Cdfg& g) {
  const int n = g.num_nodes();
  Matrix adj = Matrix::Zero(n, n);
  for (const cdfg::Edge& e : g.edges()) {
    if (e.src == e.dst) continue;
    adj(e.src, e.dst) = 1.0;
    adj(e.dst, e.src) = 1.0;
  }
  Vector inv_sqrt_deg(n);
  for (int i = 0; i < n; ++i) {
    const double d = adj.row(i).sum();
    inv_sqrt_deg[i] = d > 0 ? 1.0 / std::sqrt(d) : 0.0;
  }
  Matrix lap = Matrix::Identity(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (adj(i, j) != 0.0) lap(i, j) -= inv_sqrt_deg[i] * inv_sqrt_deg[j];
    }
  }
  return lap;
}

namespace {

double OffDiagonalNorm(const Matrix& a) {
  double sum = 0.0;
  for (int p = 0; p < a.rows(); ++p) {
    for (int q = p + 1; q < a.cols(); ++q) sum += a(p, q) * a(p, q);
  }
  return std::sqrt(2.0 * sum);
}

void Rotate(Matrix& a, Matrix& v, int p, int q) {
  const double apq = a(p, q);
  const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
  const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;
  const int n = static_cast<int>(a.rows());
  for (int k = 0; k < n; ++k) {
    const double akp = a(k, p);
    const double akq = a(k, q);
    a(k, p) = c * akp - s * akq;
    a(k, q) = s * akp + c * akq;
  }
  for (int k = 0; k < n; ++k) {
    const double apk = a(p, k);
    const double aqk = a(q, k);
    a(p, k) = c * apk - s * aqk;
    a(q, k) = s * apk + c * aqk;
  }
  a(p, q) = 0.0;
  a(q, p) = 0.0;
  for (int k = 0; k < n; ++k) {
    const double vkp = v(k, p);
    const double vkq = v(k, q);
    v(k, p) = c * vkp - s * vkq;
    v(k, q) = s * vkp + c * vkq;
  }
}

void NormalizeSign(Matrix& v, int col) {
  // Order-independent choices first so relabeling nodes keeps the signs.
  const double skew = v.col(col).array().cube().sum();
  if (std::abs(skew) > 1e-9) {
    if (skew < 0) v.col(col) *= -1.0;
    return;
  }
  const double total = v.col(col).sum();
  if (std::abs(total) > 1e-9) {
    if (total < 0) v.col(col) *= -1.0;
    return;
  }
  for (int r = 0; r < v.rows(); ++r) {
    if (std::abs(v(r, col)) > 1e-12) {
      if (v(r, col) < 0) v.col(col) *= -1.0;
      return;
    }
  }
}

}  // namespace

EigenDecomposition EigenDecompose(const Matrix& symmetric, const JacobiOptions& options) {
  const int n = static_cast<int>(symmetric.rows());
  Matrix a = symmetric;
  Matrix v = Matrix::Identity(n, n);
  bool converged = OffDiagonalNorm(a) <= options.tolerance;
  for (int sweep = 0; sweep < options.max_sweeps && !converged; ++sweep) {
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        if (a(p, q) != 0.0) Rotate(a, v, p, q);
      }
    }
    converged = OffDiagonalNorm(a) <= options.tolerance;
  }
  if (!converged) {
    throw ConvergenceError("Jacobi eigensolver did not converge in " +
                           std::to_string(options.max_sweeps) + " sweeps");
  }
  for (int j = 0; j < n; ++j) NormalizeSign(v, j);

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int x, int y) { return a(x, x) < a(y, y); });
  // Within runs of (numerically) equal eigenvalues, order by eigenvector.
  for (int start = 0; start < n;) {
    int end = start + 1;
    while (end < n && a(order[end], order[end]) - a(order[end - 1], order[end - 1]) <= 1e-9) ++end;
    std::sort(order.begin() + start, order.begin() + end, [&](int x, int y) {
      for (int r = 0; r < n; ++r) {
        if (v(r, x) != v(r, y)) return v(r, x) < v(r, y);
      }
      return x < y;
    });
    start = end;
  }

  EigenDecomposition out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (int j = 0; j < n; ++j) {
    out.values[j] = a(order[j], order[j]);
    out.vectors.col(j) = v.col(order[j]);
  }
  return out;
}

PositionalEmbeddings ComputePositionalEmbeddings(const cdfg::Cdfg& g, int k) {
  const int n = g.num_nodes();
  PositionalEmbeddings pe;
  pe.matrix = Matrix::Zero(n, k);
  if (n == 0) return pe;
  const EigenDecomposition eig = EigenDecompose(NormalizedLaplacian(g));
  const int used = std::min(n, k);
  for (int j = 0; j < used; ++j) {
    pe.matrix.col(j) = eig.vectors.col(j);
    pe.eigenvalues.push_back(eig.values[j]);
  }
  return pe;
}

void SignFlip(Matrix& pe, Rng& rng) {
  for (int j = 0; j < pe.cols(); ++j) {
    if (pe.col(j).cwiseAbs().maxCoeff() == 0.0) continue;
    if (rng.Bernoulli(0.5)) pe.col(j) *= -1.0;
  }
}

std::string ToJson(const PositionalEmbeddings& pe) {
  nlohmann::json j;
  j["eigenvalues"] = pe.eigenvalues;
  j["rows"] = pe.matrix.rows();
  j["cols"] = pe.matrix.cols();
  std::vector<double> flat(pe.matrix.data(), pe.matrix.data() + pe.matrix.size());
  j["matrix"] = flat;
  return j.dump() + "\n";
}

PositionalEmbeddings PositionalEmbeddingsFromJson(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError("", e.what());
  }
  for (const char* key : {"eigenvalues", "rows", "cols", "matrix"}) {
    if (!j.contains(key)) throw SchemaError(std::string("/") + key, "missing required field");
  }
  PositionalEmbeddings pe;
  pe.eigenvalues = j["eigenvalues"].get<std::vector<double>>();
  const int rows = j["rows"].get<int>();
  const int cols = j["cols"].get<int>();
  const auto flat = j["matrix"].get<std::vector<double>>();
  if (static_cast<int64_t>(flat.size()) != static_cast<int64_t>(rows) * cols) {
    throw SchemaError("/matrix", "expected rows*cols entries");
  }
  pe.matrix = Eigen::Map<const Matrix>(flat.data(), rows, cols);
  return pe;
}

}  // namespace structrtl::spectral
