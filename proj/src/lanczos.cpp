#include "spinchain/lanczos.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

namespace spinchain {

Eigen::VectorXd lanczos_random_start(long dim, unsigned long seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Eigen::VectorXd v(dim);
  for (long i = 0; i < dim; ++i) v[i] = dist(rng);
  v.normalize();
  return v;
}

LanczosResult lanczos_ground(
    long dim, const std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)>& apply,
    const Eigen::VectorXd& start, double tol, int max_iter) {
  if (start.size() != dim) throw std::invalid_argument("lanczos: start dim mismatch");
  if (dim == 1) {
    Eigen::VectorXd e = Eigen::VectorXd::Ones(1);
    Eigen::VectorXd y(1);
    apply(e, y);
    return {y[0], e, 1, 0.0, true};
  }

  std::vector<Eigen::VectorXd> basis;
  std::vector<double> alpha, beta;  // beta[j] couples v_j and v_{j+1}
  basis.push_back(start.normalized());

  Eigen::VectorXd w(dim);
  LanczosResult res;
  const double breakdown = 1e-14;

  for (int j = 0; j < max_iter; ++j) {
    apply(basis[j], w);
    const double a = basis[j].dot(w);
    alpha.push_back(a);

    w -= a * basis[j];
    if (j > 0) w -= beta[j - 1] * basis[j - 1];
    // full reorthogonalization, twice for numerical safety
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& v : basis) w -= v.dot(w) * v;

    const int k = j + 1;
    Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(k, k);
    for (int i = 0; i < k; ++i) tri(i, i) = alpha[i];
    for (int i = 0; i + 1 < k; ++i) {
      tri(i, i + 1) = beta[i];
      tri(i + 1, i) = beta[i];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tri);
    const double energy = es.eigenvalues()[0];
    const Eigen::VectorXd ritz = es.eigenvectors().col(0);

    const double b = w.norm();
    const double resid_est = b * std::abs(ritz[k - 1]);
    res.energy = energy;
    res.iterations = k;
    res.residual = resid_est;

    const double scale = std::max(1.0, std::abs(energy));
    if (resid_est <= tol * scale || b < breakdown || k >= dim) {
      res.vector = Eigen::VectorXd::Zero(dim);
      for (int i = 0; i < k; ++i) res.vector += ritz[i] * basis[i];
      res.vector.normalize();
      res.converged = resid_est <= std::max(tol, 1e-10) * scale || b < breakdown;
      return res;
    }
    beta.push_back(b);
    basis.push_back(w / b);
  }

  // ran out of iterations: return the best Ritz pair so far
  const int k = static_cast<int>(alpha.size());
  Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(k, k);
  for (int i = 0; i < k; ++i) tri(i, i) = alpha[i];
  for (int i = 0; i + 1 < k; ++i) {
    tri(i, i + 1) = beta[i];
    tri(i + 1, i) = beta[i];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tri);
  res.vector = Eigen::VectorXd::Zero(dim);
  for (int i = 0; i < k; ++i) res.vector += es.eigenvectors()(i, 0) * basis[i];
  res.vector.normalize();
  res.energy = es.eigenvalues()[0];
  res.converged = false;
  return res;
}

}  // namespace spinchain
