#include "structrtl/quality/metrics.h"

#include <cmath>

#include "structrtl/nn/ops.h"

namespace structrtl::quality {

double LogTransform(double y) {
  if (!(y > 0.0)) throw DomainError("log transform needs a positive value, got " + std::to_string(y));
  return std::log(y);
}

double InverseLogTransform(double z) { return std::exp(z); }

double LogCoshLossValue(const std::vector<double>& preds, const std::vector<double>& targets) {
  if (preds.size() != targets.size() || preds.empty()) throw Error("log-cosh needs equal, non-empty inputs");
  double sum = 0.0;
  for (size_t i = 0; i < preds.size(); ++i) sum += nn::LogCosh(preds[i] - targets[i]);
  return sum / static_cast<double>(preds.size());
}

MetricReport ComputeMetrics(const std::vector<double>& preds, const std::vector<double>& targets) {
  if (preds.size() != targets.size()) throw Error("prediction and target counts differ");
  const size_t n = targets.size();
  if (n < 2) throw UndefinedMetric("metrics need at least two samples");
  double mean = 0.0;
  for (double y : targets) mean += y;
  mean /= static_cast<double>(n);

  double abs_err = 0.0, pct_err = 0.0, sse = 0.0, sst = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double d = targets[i] - preds[i];
    if (targets[i] == 0.0) throw UndefinedMetric("MAPE is undefined for a zero target");
    abs_err += std::abs(d);
    pct_err += std::abs(d / targets[i]);
    sse += d * d;
    sst += (targets[i] - mean) * (targets[i] - mean);
  }
  if (sst == 0.0) throw UndefinedMetric("R2 and RRSE are undefined when all targets are equal");
  MetricReport r;
  r.n_samples = static_cast<int>(n);
  r.mae = abs_err / static_cast<double>(n);
  r.mape = pct_err / static_cast<double>(n);
  const double ratio = sse / sst;
  r.r2 = 1.0 - ratio;
  r.rrse = std::sqrt(ratio);
  return r;
}

nlohmann::json ToJson(const MetricReport& r) {
  return {{"mae", r.mae}, {"mape", r.mape}, {"r2", r.r2}, {"rrse", r.rrse}, {"n_samples", r.n_samples}};
}

MetricReport MetricReportFromJson(const nlohmann::json& j) {
  MetricReport r;
  r.mae = j.at("mae").get<double>();
  r.mape = j.at("mape").get<double>();
  r.r2 = j.at("r2").get<double>();
  r.rrse = j.at("rrse").get<double>();
  r.n_samples = j.at("n_samples").get<int>();
  return r;
}

}  // namespace structrtl::quality
