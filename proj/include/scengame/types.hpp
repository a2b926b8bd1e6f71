#pragma once

#include <Eigen/Dense>

namespace scengame {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// One row per scenario; rows are contiguous so the consensus kernels can
// stream them.
using ScenarioMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Stacked decisions of all players, x = (x_1, ..., x_N), block i has the
// player's decision_dim entries.
using JointDecision = Vector;

}  // namespace scengame
