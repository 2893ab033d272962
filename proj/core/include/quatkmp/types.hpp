#pragma once

#include <Eigen/Core>

namespace quatkmp {

using Vector6d = Eigen::Matrix<double, 6, 1>;
using Matrix6d = Eigen::Matrix<double, 6, 6>;

}  // namespace quatkmp
