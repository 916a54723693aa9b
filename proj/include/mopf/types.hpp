#pragma once

#include <Eigen/Dense>
#include <vector>

namespace mopf {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using Index = Eigen::Index;

/// Ascending, duplicate-free list of row/column indices.
using IndexList = std::vector<int>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace mopf
