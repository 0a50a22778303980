#ifndef SPINCHAIN_DMRG_HPP
#define SPINCHAIN_DMRG_HPP

#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "spinchain/model.hpp"
#include "spinchain/mps.hpp"

namespace spinchain {

struct SweepDiagnostics {
  int sweep = 0;
  double energy = 0.0;
  double max_discarded_weight = 0.0;
};

struct DmrgConfig {
  int max_kept_m = 128;
  int n_sweeps_max = 20;
  double energy_tol = 1e-10;
  double local_solver_tol = 1e-11;
  unsigned long seed = 12345;
  double degeneracy_tol = 1e-12;
  std::optional<MatrixProductState> warm_start;
  std::function<void(const SweepDiagnostics&)> on_sweep;

  void validate() const;
};

struct GroundStateResult {
  double energy = 0.0;
  MatrixProductState state;
  double max_discarded_weight = 0.0;
  std::vector<double> sweep_energies;
  bool converged = false;
};

/// Two-site effective eigenproblem: left/right contracted operator blocks
/// (one matrix per MPO bond index) and the MPO tensors of the two open sites.
struct TwoSiteProblem {
  std::vector<Eigen::MatrixXd> left;
  std::vector<Eigen::MatrixXd> right;
  MpoSite w1;
  MpoSite w2;

  int dim_left() const { return left.empty() ? 0 : static_cast<int>(left[0].rows()); }
  int dim_right() const { return right.empty() ? 0 : static_cast<int>(right[0].rows()); }
  long dim() const { return 4L * dim_left() * dim_right(); }

  /// y = H_eff * x on the flattened (left, s1, s2, right) tensor.
  void apply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const;
};

struct LocalSolveResult {
  double local_energy = 0.0;
  Eigen::VectorXd optimized_tensor;
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
};

/// Lowest eigenpair of the effective two-site Hamiltonian, matrix-free
/// Lanczos started from `start` when nonempty, else a seeded random vector.
LocalSolveResult solve_effective(const TwoSiteProblem& problem,
                                 const Eigen::VectorXd& start, double tol,
                                 int max_iter = 200, unsigned long seed = 12345);

/// Two-site finite-system DMRG from a Neel-seeded (or warm-started) MPS.
GroundStateResult run_dmrg(const ModelParams& params, const DmrgConfig& config);

/// run_dmrg at new_delta_f warm-started from a previous result, keeping both
/// states on the same branch.
GroundStateResult continue_in_delta(const ModelParams& params,
                                    const GroundStateResult& previous,
                                    double new_delta_f, const DmrgConfig& config);

/// <state|mpo|state> / <state|state>
double expectation_value(const MatrixProductState& state,
                         const MatrixProductOperator& mpo);

}  // namespace spinchain

#endif
