#pragma once

#include <Eigen/Dense>

namespace spikedeig {

// All dense matrices in the public interface are row-major doubles.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

}  // namespace spikedeig
