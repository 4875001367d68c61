#ifndef STRUCTRTL_NN_OPS_H_
#define STRUCTRTL_NN_OPS_H_

#include <vector>

#include "structrtl/nn/tensor.h"

namespace structrtl::nn {

Tensor MatMul(const Tensor& a, const Tensor& b);
// Elementwise; `b` may also be a 1 x cols row broadcast over a's rows.
Tensor Add(const Tensor& a, const Tensor& b);
Tensor Sub(const Tensor& a, const Tensor& b);
Tensor Mul(const Tensor& a, const Tensor& b);
Tensor Scale(const Tensor& a, double s);
Tensor Transpose(const Tensor& a);

Tensor Relu(const Tensor& a);
// Exact (erf) form.
Tensor Gelu(const Tensor& a);
Tensor SoftmaxRows(const Tensor& a);
// Per-row normalization with affine gamma/beta (both 1 x cols).
Tensor LayerNorm(const Tensor& x, const Tensor& gamma, const Tensor& beta, double eps = 1e-10);

Tensor SliceCols(const Tensor& a, int start, int count);
Tensor ConcatCols(const std::vector<Tensor>& parts);
Tensor ConcatRows(const std::vector<Tensor>& parts);
Tensor GatherRows(const Tensor& a, const std::vector<int>& rows);

// (1 + eps) * h_i + sum of h_j over edges j -> i.
Tensor GinAggregate(const Tensor& h, const Tensor& eps, const std::vector<int>& src,
                    const std::vector<int>& dst);
// Rows with mask[i] set are replaced by `token` (1 x cols).
Tensor ReplaceRows(const Tensor& h, const std::vector<bool>& mask, const Tensor& token);

Tensor MeanRows(const Tensor& a);  // 1 x cols
Tensor MaxRows(const Tensor& a);   // 1 x cols; ties route to the first row
Tensor Sum(const Tensor& a);       // 1 x 1
Tensor Mean(const Tensor& a);      // 1 x 1

// Class-balanced focal loss over rows of `logits` with integer labels:
// mean_i w[y_i] * (1 - p_t)^gamma * ce_i, p_t = exp(-ce_i).
Tensor ClassBalancedFocalLoss(const Tensor& logits, const std::vector<int>& labels,
                              const std::vector<double>& class_weights, double gamma);
// Mean binary cross-entropy on an n x 1 logit column.
Tensor BceWithLogits(const Tensor& logits, const std::vector<double>& targets);
// Mean log(cosh(pred - target)) over an n x 1 column.
Tensor LogCoshLoss(const Tensor& pred, const Tensor& target);
// Row-averaged tau * (1 - cos(a, b)) + (1 - tau) * mean((a - b)^2). The
// cosine term is 1 (with zero gradient) when either row has norm < 1e-12.
Tensor KdLoss(const Tensor& a, const Tensor& b, double tau);

// Overflow-safe scalar helpers shared with non-tape code.
double LogCosh(double d);

}  // namespace structrtl::nn

#endif  // STRUCTRTL_NN_OPS_H_
