#ifndef STRUCTRTL_UTIL_MATRIX_H_
#define STRUCTRTL_UTIL_MATRIX_H_

#include <Eigen/Dense>

namespace structrtl {

// Row-major so that node-feature rows are contiguous.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

}  // namespace structrtl

#endif  // STRUCTRTL_UTIL_MATRIX_H_
