#ifndef STRUCTRTL_QUALITY_METRICS_H_
#define STRUCTRTL_QUALITY_METRICS_H_

#include <string>
#include <vector>

#include "json.hpp"
#include "structrtl/util/error.h"

namespace structrtl::quality {

// Natural log; DomainError for y <= 0.
double LogTransform(double y);
double InverseLogTransform(double z);

// Mean of log(cosh(pred - target)).
double LogCoshLossValue(const std::vector<double>& preds, const std::vector<double>& targets);

class UndefinedMetric : public Error {
 public:
  using Error::Error;
};

// All four metrics in the (log-)space the values are given in.
struct MetricReport {
  double mae = 0.0;
  double mape = 0.0;
  double r2 = 0.0;
  double rrse = 0.0;
  int n_samples = 0;
};

// MAE, MAPE, R^2 = 1 - SSE/SST and RRSE = sqrt(SSE/SST). Throws
// UndefinedMetric for fewer than two samples, SST = 0, or a zero target.
MetricReport ComputeMetrics(const std::vector<double>& preds, const std::vector<double>& targets);

nlohmann::json ToJson(const MetricReport& r);
MetricReport MetricReportFromJson(const nlohmann::json& j);

}  // namespace structrtl::quality

#endif  // STRUCTRTL_QUALITY_METRICS_H_
