#include "structrtl/ssl/objectives.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "structrtl/nn/ops.h"

namespace structrtl::ssl {

std::vector<bool> StratifiedMask(const std::vector<int>& labels, const MaskConfig& config, Rng& rng) {
  const size_t n = labels.size();
  std::vector<bool> mask(n);
  for (size_t i = 0; i < n; ++i) mask[i] = rng.Bernoulli(config.ratio);

  std::map<int, std::vector<size_t>> members;
  for (size_t i = 0; i < n; ++i) members[labels[i]].push_back(i);
  for (const auto& [label, idx] : members) {
    int masked = 0;
    for (size_t i : idx) masked += mask[i];
    if (masked < config.min_per_class) {
      const size_t take = std::min<size_t>(config.min_per_class, idx.size());
      for (size_t pick : rng.SampleWithoutReplacement(idx.size(), take)) mask[idx[pick]] = true;
    }
  }
  return mask;
}

std::vector<double> ClassBalancedWeights(const std::vector<double>& samples_per_class, double beta) {
  std::vector<double> w;
  w.reserve(samples_per_class.size());
  double total = 0.0;
  for (double s : samples_per_class) {
    const double effective = 1.0 - std::pow(beta, s);
    w.push_back((1.0 - beta) / (effective + 1e-8));
    total += w.back();
  }
  for (double& x : w) x = x / total * static_cast<double>(samples_per_class.size());
  return w;
}

std::vector<double> PresentClassWeights(const std::vector<double>& counts, double beta) {
  std::vector<double> present;
  for (double c : counts) {
    if (c > 0) present.push_back(c);
  }
  std::vector<double> out(counts.size(), 0.0);
  if (present.empty()) return out;
  const std::vector<double> w = ClassBalancedWeights(present, beta);
  size_t j = 0;
  for (size_t c = 0; c < counts.size(); ++c) {
    if (counts[c] > 0) out[c] = w[j++];
  }
  return out;
}

nn::Tensor CbFocalLoss(const std::vector<double>& samples_per_class, const nn::Tensor& logits,
                       const std::vector<int>& labels, double beta, double gamma) {
  return nn::ClassBalancedFocalLoss(logits, labels, ClassBalancedWeights(samples_per_class, beta), gamma);
}

namespace {

std::vector<std::pair<int, int>> DistinctPairs(const nn::EdgeList& edges) {
  std::set<std::pair<int, int>> s;
  for (size_t e = 0; e < edges.src.size(); ++e) s.emplace(edges.src[e], edges.dst[e]);
  return {s.begin(), s.end()};
}

void AddNegatives(const std::set<std::pair<int, int>>& present, int num_nodes, size_t want,
                  Rng& rng, EdgeSample& out) {
  size_t loops = 0;
  for (const auto& [u, v] : present) loops += u == v;
  const uint64_t n = static_cast<uint64_t>(num_nodes);
  const uint64_t available = n * (n - (n > 0 ? 1 : 0)) - (present.size() - loops);
  if (available < want) out.insufficient_negatives = true;
  if (available <= 4 * want) {
    std::vector<std::pair<int, int>> all;
    for (int u = 0; u < num_nodes; ++u)
      for (int v = 0; v < num_nodes; ++v)
        if (u != v && !present.contains({u, v})) all.emplace_back(u, v);
    const size_t take = std::min(want, all.size());
    for (size_t pick : rng.SampleWithoutReplacement(all.size(), take)) {
      out.src.push_back(all[pick].first);
      out.dst.push_back(all[pick].second);
      out.labels.push_back(0.0);
    }
    return;
  }
  std::set<std::pair<int, int>> chosen;
  while (chosen.size() < want) {
    const int u = static_cast<int>(rng.Below(n));
    const int v = static_cast<int>(rng.Below(n));
    if (u == v || present.contains({u, v}) || !chosen.insert({u, v}).second) continue;
    out.src.push_back(u);
    out.dst.push_back(v);
    out.labels.push_back(0.0);
  }
}

}  // namespace

EdgeSample SampleEdges(const nn::EdgeList& edges, int num_nodes, double ratio, Rng& rng) {
  const auto pairs = DistinctPairs(edges);
  EdgeSample out;
  if (pairs.empty()) return out;
  const size_t k = static_cast<size_t>(std::ceil(ratio * static_cast<double>(pairs.size()) - 1e-12));
  for (size_t pick : rng.SampleWithoutReplacement(pairs.size(), k)) {
    out.src.push_back(pairs[pick].first);
    out.dst.push_back(pairs[pick].second);
    out.labels.push_back(1.0);
  }
  out.num_positive = static_cast<int>(k);
  AddNegatives({pairs.begin(), pairs.end()}, num_nodes, k, rng, out);
  return out;
}

EdgeSample AllEdgesWithNegatives(const nn::EdgeList& edges, int num_nodes, Rng& rng) {
  const auto pairs = DistinctPairs(edges);
  EdgeSample out;
  for (const auto& [u, v] : pairs) {
    out.src.push_back(u);
    out.dst.push_back(v);
    out.labels.push_back(1.0);
  }
  out.num_positive = static_cast<int>(pairs.size());
  AddNegatives({pairs.begin(), pairs.end()}, num_nodes, pairs.size(), rng, out);
  return out;
}

TaskResult MaskedNodeModeling(const nn::EncoderModel& model, const nn::GraphInput& g,
                              const nn::Tensor& h_gin, const Matrix& pe,
                              const std::vector<bool>& mask,
                              const std::vector<double>& class_weights, double gamma) {
  std::vector<int> rows;
  std::vector<int> labels;
  for (int i = 0; i < g.num_nodes(); ++i) {
    if (mask[i]) {
      rows.push_back(i);
      labels.push_back(g.node_types[i]);
    }
  }
  if (rows.empty()) throw DegenerateBatch("no node was masked");
  const nn::Tensor masked = nn::ReplaceRows(h_gin, mask, model.mask_token);
  const nn::Tensor h = model.EncodeTransformer(masked, nn::Constant(pe));
  const nn::Tensor logits = model.NodeTypeLogits(nn::GatherRows(h, rows));
  TaskResult r;
  r.loss = nn::ClassBalancedFocalLoss(logits, labels, class_weights, gamma);
  r.total = static_cast<int>(rows.size());
  for (size_t i = 0; i < rows.size(); ++i) {
    Eigen::Index best;
    logits.value().row(i).maxCoeff(&best);
    r.correct += best == labels[i];
  }
  return r;
}

TaskResult MaskedNodeModelingStep(const nn::EncoderModel& model, const nn::GraphInput& g,
                                  const nn::Tensor& h_gin, const Matrix& pe,
                                  const MaskConfig& config,
                                  const std::vector<double>& class_weights, Rng& rng) {
  for (int attempt = 0; attempt < 16; ++attempt) {
    const std::vector<bool> mask = StratifiedMask(g.node_types, config, rng);
    if (std::find(mask.begin(), mask.end(), true) != mask.end()) {
      return MaskedNodeModeling(model, g, h_gin, pe, mask, class_weights);
    }
  }
  throw DegenerateBatch("masking selected no node in 16 draws");
}

TaskResult EdgePrediction(const nn::EncoderModel& model, const nn::Tensor& h_final,
                          const EdgeSample& sample) {
  const nn::Tensor logits = model.EdgeLogits(h_final, sample.src, sample.dst);
  TaskResult r;
  r.loss = nn::BceWithLogits(logits, sample.labels);
  r.total = static_cast<int>(sample.labels.size());
  for (int i = 0; i < r.total; ++i) {
    const bool predicted = logits.value()(i, 0) > 0.0;
    r.correct += predicted == (sample.labels[i] > 0.5);
  }
  return r;
}

}  // namespace structrtl::ssl
