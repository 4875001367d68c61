#ifndef STRUCTRTL_SPECTRAL_LAPLACIAN_H_
#define STRUCTRTL_SPECTRAL_LAPLACIAN_H_

#include <string>
#include <string_view>
#include <vector>

#include "structrtl/cdfg/cdfg.h"
#include "structrtl/util/error.h"
#include "structrtl/util/matrix.h"
#include "structrtl/util/rng.h"

namespace structrtl::spectral {

inline constexpr int kNumEigenvectors = 16;

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

// L = I - D^-1/2 A D^-1/2 over the symmetrized, loop-free, binarized
// adjacency A = (A_dir | A_dir^T). Zero-degree rows use 0^-1/2 = 0, so an
// isolated node has L_ii = 1. Exactly symmetric by construction.
Matrix NormalizedLaplacian(const cdfg::Cdfg& g);

struct EigenDecomposition {
  Vector values;   // ascending
  Matrix vectors;  // column j pairs with values[j]; unit norm
};

struct JacobiOptions {
  double tolerance = 1e-10;  // on the Frobenius norm of the off-diagonal
  int max_sweeps = 100;
};

// Cyclic Jacobi rotations on a dense symmetric matrix. Each eigenvector is
// sign-normalized: sum of cubes positive, else sum positive, else first
// entry with |x| > 1e-12 positive. Eigenvalues
// within 1e-9 of each other are ordered by lexicographic comparison of
// their eigenvectors. Throws ConvergenceError when the sweep budget runs
// out.
EigenDecomposition EigenDecompose(const Matrix& symmetric, const JacobiOptions& options = {});

struct PositionalEmbeddings {
  // N x k; column j is the eigenvector of the j-th smallest eigenvalue.
  // Columns j >= N are zero.
  Matrix matrix;
  std::vector<double> eigenvalues;  // min(N, k) entries
};

PositionalEmbeddings ComputePositionalEmbeddings(const cdfg::Cdfg& g, int k = kNumEigenvectors);

// Multiplies each nonzero column of `pe` by an independent random sign.
// Training-time augmentation only.
void SignFlip(Matrix& pe, Rng& rng);

std::string ToJson(const PositionalEmbeddings& pe);
PositionalEmbeddings PositionalEmbeddingsFromJson(std::string_view text);

}  // namespace structrtl::spectral

#endif  // STRUCTRTL_SPECTRAL_LAPLACIAN_H_
