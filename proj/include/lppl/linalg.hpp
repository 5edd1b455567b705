#pragma once

#include <Eigen/Core>

namespace lppl {

struct SymmetricEigen {
  Eigen::VectorXd values;   // descending
  Eigen::MatrixXd vectors;  // column i pairs with values(i)
  int sweeps = 0;
};

/// Cyclic Jacobi rotations on a symmetric matrix, stopped once the
/// off-diagonal Frobenius mass drops below rel_tol * ||a||_F. Only the
/// upper triangle is trusted to mirror the lower; callers check symmetry.
SymmetricEigen jacobi_eigen(const Eigen::MatrixXd& a, double rel_tol = 1e-13,
                            int max_sweeps = 100);

}  // namespace lppl
