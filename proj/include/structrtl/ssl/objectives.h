#ifndef STRUCTRTL_SSL_OBJECTIVES_H_
#define STRUCTRTL_SSL_OBJECTIVES_H_

#include <vector>

#include "structrtl/nn/encoder.h"
#include "structrtl/nn/tensor.h"
#include "structrtl/util/error.h"
#include "structrtl/util/rng.h"

namespace structrtl::ssl {

inline constexpr double kClassBalanceBeta = 0.9999;
inline constexpr double kFocalGamma = 2.0;

struct MaskConfig {
  double ratio = 0.2;
  int min_per_class = 1;
};

// Raised when a masking draw selects no node; callers redraw.
class DegenerateBatch : public Error {
 public:
  using Error::Error;
};

// Bernoulli(ratio) base mask, then every class (in ascending label order)
// with fewer than min_per_class masked members gets min(m, |class|)
// members drawn without replacement and forced into the mask.
std::vector<bool> StratifiedMask(const std::vector<int>& labels, const MaskConfig& config, Rng& rng);

// w_c = (1 - beta) / (1 - beta^S_c + 1e-8), rescaled so sum(w) = len(S).
std::vector<double> ClassBalancedWeights(const std::vector<double>& samples_per_class,
                                         double beta = kClassBalanceBeta);

// Weights for the full label space computed over the classes that occur
// in `counts` only; classes with a zero count get weight 0. Keeps absent
// classes from swamping the normalization.
std::vector<double> PresentClassWeights(const std::vector<double>& counts,
                                        double beta = kClassBalanceBeta);

// Class-balanced focal loss with weights derived from `samples_per_class`.
nn::Tensor CbFocalLoss(const std::vector<double>& samples_per_class, const nn::Tensor& logits,
                       const std::vector<int>& labels, double beta = kClassBalanceBeta,
                       double gamma = kFocalGamma);

struct EdgeSample {
  std::vector<int> src;
  std::vector<int> dst;
  std::vector<double> labels;  // 1 for positives, then 0 for negatives
  int num_positive = 0;
  // Fewer non-edges existed than positives were drawn.
  bool insufficient_negatives = false;
};

// ceil(ratio * |E|) distinct edges (duplicate src/dst pairs collapsed) and
// as many distinct ordered non-edges (u != v) drawn uniformly. Reverse
// directions of true edges count as non-edges.
EdgeSample SampleEdges(const nn::EdgeList& edges, int num_nodes, double ratio, Rng& rng);

// Every distinct edge plus an equal number of uniformly drawn non-edges.
EdgeSample AllEdgesWithNegatives(const nn::EdgeList& edges, int num_nodes, Rng& rng);

struct TaskResult {
  nn::Tensor loss;
  int correct = 0;
  int total = 0;
  double accuracy() const { return total ? static_cast<double>(correct) / total : 0.0; }
};

// Replaces masked rows of the post-GIN embeddings `h_gin` with the [MASK]
// parameter, encodes with the Transformer and classifies masked rows.
TaskResult MaskedNodeModeling(const nn::EncoderModel& model, const nn::GraphInput& g,
                              const nn::Tensor& h_gin, const Matrix& pe,
                              const std::vector<bool>& mask,
                              const std::vector<double>& class_weights, double gamma = kFocalGamma);

// Draws a stratified mask (redrawing up to 16 times on an empty mask)
// and runs MaskedNodeModeling. Throws DegenerateBatch if every draw is
// empty.
TaskResult MaskedNodeModelingStep(const nn::EncoderModel& model, const nn::GraphInput& g,
                                  const nn::Tensor& h_gin, const Matrix& pe,
                                  const MaskConfig& config,
                                  const std::vector<double>& class_weights, Rng& rng);

// Binary cross-entropy on edge-MLP logits of (unmasked) final embeddings.
TaskResult EdgePrediction(const nn::EncoderModel& model, const nn::Tensor& h_final,
                          const EdgeSample& sample);

inline double PretrainLoss(double l_mnm, double l_ep, double alpha) {
  return alpha * l_mnm + (1.0 - alpha) * l_ep;
}

}  // namespace structrtl::ssl

#endif  // STRUCTRTL_SSL_OBJECTIVES_H_
