// Test-only oracles, kept independent of the library's Hamiltonian paths:
// the dense chain Hamiltonian is assembled directly from Kronecker products
// of single-site spin matrices.
#ifndef SPINCHAIN_TESTS_ORACLE_HPP
#define SPINCHAIN_TESTS_ORACLE_HPP

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include "spinchain/exact.hpp"
#include "spinchain/model.hpp"

namespace oracle {

inline Eigen::MatrixXd site_op(int n, int site_1based, const Eigen::Matrix2d& op) {
  Eigen::MatrixXd acc = Eigen::MatrixXd::Ones(1, 1);
  for (int i = 1; i <= n; ++i) {
    const Eigen::Matrix2d m =
        (i == site_1based) ? op : Eigen::Matrix2d::Identity().eval();
    acc = Eigen::kroneckerProduct(acc, m).eval();
  }
  return acc;
}

/// Full 2^N Hamiltonian, site 1 most significant. SxSx + SySy enters as
/// (S+S- + S-S+)/2, so everything stays real.
inline Eigen::MatrixXd dense_hamiltonian(const spinchain::ModelParams& p) {
  const int n = p.n_sites;
  Eigen::Matrix2d sp, sm, sz;
  sp << 0, 1, 0, 0;
  sm << 0, 0, 1, 0;
  sz << 0.5, 0, 0, -0.5;

  const long dim = 1L << n;
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
  for (int i = 1; i < n; ++i) {
    const bool af = i % 2 == 1;
    const double j = af ? p.j_af : p.j_f;
    const double d = af ? p.delta_af : p.delta_f;
    h += 0.5 * j * (site_op(n, i, sp) * site_op(n, i + 1, sm) +
                    site_op(n, i, sm) * site_op(n, i + 1, sp));
    h += j * d * site_op(n, i, sz) * site_op(n, i + 1, sz);
  }
  return h;
}

/// Dense Hamiltonian projected onto a sector basis (rows/cols picked out of
/// the full matrix).
inline Eigen::MatrixXd dense_sector(const spinchain::ModelParams& p,
                                    const spinchain::SectorBasis& basis) {
  const Eigen::MatrixXd full = dense_hamiltonian(p);
  const long m = basis.size();
  Eigen::MatrixXd h(m, m);
  for (long a = 0; a < m; ++a)
    for (long b = 0; b < m; ++b) h(a, b) = full(basis.states[a], basis.states[b]);
  return h;
}

/// Ground pair of a dense symmetric matrix.
inline std::pair<double, Eigen::VectorXd> dense_ground(const Eigen::MatrixXd& h) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
  return {es.eigenvalues()[0], es.eigenvectors().col(0)};
}

/// Entropy in bits of the right-hand l-site block from an explicit reduced
/// density matrix (partial trace + dense eigensolve).
inline double entropy_partial_trace(const Eigen::VectorXd& full_amplitudes, int n,
                                    int l) {
  const long rows = 1L << (n - l);
  const long cols = 1L << l;
  Eigen::MatrixXd rho = Eigen::MatrixXd::Zero(cols, cols);
  for (long a = 0; a < cols; ++a)
    for (long b = 0; b < cols; ++b)
      for (long r = 0; r < rows; ++r)
        rho(a, b) += full_amplitudes[r * cols + a] * full_amplitudes[r * cols + b];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(rho);
  double e = 0.0;
  for (double p : es.eigenvalues())
    if (p > 1e-16) e -= p * std::log2(p);
  return e;
}

/// Scatter a sector state into the full 2^N space.
inline Eigen::VectorXd to_full(const spinchain::DenseState& state) {
  const long dim = 1L << state.basis->n_sites;
  Eigen::VectorXd full = Eigen::VectorXd::Zero(dim);
  for (long i = 0; i < state.basis->size(); ++i)
    full[state.basis->states[i]] = state.amplitudes[i];
  return full;
}

}  // namespace oracle

#endif
