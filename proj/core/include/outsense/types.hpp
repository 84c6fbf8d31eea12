#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace outsense {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

// Observation mask; true marks an observed entry.
using Mask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

using IndexList = std::vector<Index>;

}  // namespace outsense
