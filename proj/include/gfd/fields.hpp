#pragma once

#include <Eigen/Dense>

namespace gfd {

/// Discrete fields at one time level: u (cell density) and v (chemical
/// concentration), one value per cloud node.
struct FieldState {
    Eigen::VectorXd u;
    Eigen::VectorXd v;
    double time = 0.0;
    long step = 0;
};

}  // namespace gfd
