#ifndef SPINCHAIN_LANCZOS_HPP
#define SPINCHAIN_LANCZOS_HPP

#include <functional>

#include <Eigen/Dense>

namespace spinchain {

struct LanczosResult {
  double energy = 0.0;
  Eigen::VectorXd vector;
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
};

/// Lowest eigenpair of a symmetric operator given as y = A(x).
/// Full reorthogonalization against all stored Krylov vectors; deterministic
/// for a fixed start vector.
LanczosResult lanczos_ground(
    long dim, const std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)>& apply,
    const Eigen::VectorXd& start, double tol, int max_iter);

/// Deterministic random start vector for a given seed.
Eigen::VectorXd lanczos_random_start(long dim, unsigned long seed);

}  // namespace spinchain

#endif
