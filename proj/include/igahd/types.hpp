#pragma once

#include <Eigen/Dense>

namespace igahd {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

}  // namespace igahd
