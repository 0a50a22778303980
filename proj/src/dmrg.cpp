#include "spinchain/dmrg.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include <Eigen/SVD>

#include "spinchain/lanczos.hpp"

namespace spinchain {

namespace {

using EnvBlock = std::vector<Eigen::MatrixXd>;  // one matrix per MPO bond index

EnvBlock trivial_env() { return {Eigen::MatrixXd::Ones(1, 1)}; }

// absorb site tensor a into a left environment across MPO site w
EnvBlock absorb_left(const EnvBlock& env, const MpoSite& w, const SiteTensor& a) {
  EnvBlock out(w.right_dim, Eigen::MatrixXd::Zero(a.right, a.right));
  for (const MpoEntry& e : w.entries) {
    for (int sb = 0; sb < 2; ++sb)
      for (int sk = 0; sk < 2; ++sk) {
        const double c = e.op(sb, sk);
        if (c == 0.0) continue;
        out[e.right].noalias() +=
            c * (a.phys_slice(sb).transpose() * env[e.left] * a.phys_slice(sk));
      }
  }
  return out;
}

EnvBlock absorb_right(const EnvBlock& env, const MpoSite& w, const SiteTensor& a) {
  EnvBlock out(w.left_dim, Eigen::MatrixXd::Zero(a.left, a.left));
  for (const MpoEntry& e : w.entries) {
    for (int sb = 0; sb < 2; ++sb)
      for (int sk = 0; sk < 2; ++sk) {
        const double c = e.op(sb, sk);
        if (c == 0.0) continue;
        out[e.left].noalias() +=
            c * (a.phys_slice(sb) * env[e.right] * a.phys_slice(sk).transpose());
      }
  }
  return out;
}

// shared Schmidt-value keep rule: at most max_kept, expanded so a multiplet
// within degeneracy_tol of the cut is not split (hard cap 2*max_kept); values
// below the 1e-14 noise floor always dropped
long choose_kept(const Eigen::VectorXd& sigma, int max_kept, double degeneracy_tol) {
  const long rank = sigma.size();
  long floor_rank = 0;
  while (floor_rank < rank && sigma[floor_rank] >= 1e-14) ++floor_rank;
  floor_rank = std::max<long>(floor_rank, 1);
  long kept = std::min<long>(max_kept, floor_rank);
  const long hard_cap = std::min<long>(floor_rank, 2L * max_kept);
  while (kept < hard_cap && sigma[kept] >= sigma[kept - 1] - degeneracy_tol) ++kept;
  return kept;
}

struct SplitResult {
  double discarded_weight = 0.0;
  int kept = 0;
};

// split an optimized two-site tensor (dl,2,2,dr) at the middle bond; if
// move_right the left factor becomes orthonormal and the center lands on the
// right site, and vice versa
SplitResult split_two_site(MatrixProductState& mps, int bond, const Eigen::VectorXd& psi,
                           int dl, int dr, int max_kept, double degeneracy_tol,
                           bool move_right) {
  Eigen::Map<const RowMat> m(psi.data(), 2L * dl, 2L * dr);
  Eigen::BDCSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Eigen::MatrixXd u = svd.matrixU();
  Eigen::MatrixXd v = svd.matrixV();
  const Eigen::VectorXd sigma = svd.singularValues();

  const long kept = choose_kept(sigma, max_kept, degeneracy_tol);
  double kept_weight = 0.0, total_weight = 0.0;
  for (long i = 0; i < sigma.size(); ++i) total_weight += sigma[i] * sigma[i];
  for (long i = 0; i < kept; ++i) kept_weight += sigma[i] * sigma[i];
  const Eigen::VectorXd sig = sigma.head(kept) / std::sqrt(kept_weight);

  for (long j = 0; j < kept; ++j) {
    long imax = 0;
    u.col(j).cwiseAbs().maxCoeff(&imax);
    if (u(imax, j) < 0) {
      u.col(j) = -u.col(j);
      v.col(j) = -v.col(j);
    }
  }

  SiteTensor tl(dl, static_cast<int>(kept));
  SiteTensor tr(static_cast<int>(kept), dr);
  if (move_right) {
    tl.fused_left() = u.leftCols(kept);
    tr.fused_right() = sig.asDiagonal() * v.leftCols(kept).transpose();
    mps.canonical_center = bond + 1;
  } else {
    tl.fused_left() = u.leftCols(kept) * sig.asDiagonal();
    tr.fused_right() = v.leftCols(kept).transpose();
    mps.canonical_center = bond;
  }
  mps.sites[bond - 1] = std::move(tl);
  mps.sites[bond] = std::move(tr);

  SplitResult res;
  res.kept = static_cast<int>(kept);
  res.discarded_weight = std::max(0.0, total_weight - kept_weight);
  return res;
}

Eigen::VectorXd merge_two_site(const MatrixProductState& mps, int bond) {
  const SiteTensor& a = mps.site(bond);
  const SiteTensor& b = mps.site(bond + 1);
  Eigen::VectorXd psi(4L * a.left * b.right);
  Eigen::Map<RowMat> out(psi.data(), 2L * a.left, 2L * b.right);
  out.noalias() = a.fused_left() * b.fused_right();
  return psi;
}

MatrixProductState neel_state(int n_sites) {
  std::vector<Spin> cfg(n_sites);
  for (int i = 0; i < n_sites; ++i) cfg[i] = (i % 2 == 0) ? Spin::Up : Spin::Down;
  return product_mps(n_sites, cfg);
}

}  // namespace

void DmrgConfig::validate() const {
  if (max_kept_m < 2) throw std::invalid_argument("DmrgConfig: max_kept_m >= 2 required");
  if (energy_tol <= 0) throw std::invalid_argument("DmrgConfig: energy_tol > 0 required");
  if (n_sweeps_max < 1) throw std::invalid_argument("DmrgConfig: n_sweeps_max >= 1 required");
}

void TwoSiteProblem::apply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const {
  const int dl = dim_left();
  const int dr = dim_right();
  const long wl = static_cast<long>(left.size());
  const long wr = static_cast<long>(right.size());
  Eigen::Map<const RowMat> xm(x.data(), dl, 4L * dr);
  y.setZero(x.size());
  Eigen::Map<RowMat> ym(y.data(), 4L * dl, dr);

  // fused middle-operator blocks keyed by (left-bond a, right-bond c)
  std::vector<Eigen::Matrix4d> kernels(wl * wr, Eigen::Matrix4d::Zero());
  std::vector<bool> used(wl * wr, false);
  for (const MpoEntry& e1 : w1.entries)
    for (const MpoEntry& e2 : w2.entries) {
      if (e1.right != e2.left) continue;
      Eigen::Matrix4d k;
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          k.block<2, 2>(2 * a, 2 * b) = e1.op(a, b) * e2.op;
      kernels[e1.left * wr + e2.right] += k;
      used[e1.left * wr + e2.right] = true;
    }

  Eigen::VectorXd ybuf(4L * dl * dr);
  Eigen::VectorXd zbuf(4L * dl * dr);
  for (long a = 0; a < wl; ++a) {
    bool any = false;
    for (long c = 0; c < wr; ++c) any = any || used[a * wr + c];
    if (!any) continue;
    Eigen::Map<RowMat> yw(ybuf.data(), dl, 4L * dr);
    yw.noalias() = left[a] * xm;
    for (long c = 0; c < wr; ++c) {
      if (!used[a * wr + c]) continue;
      const Eigen::Matrix4d& k = kernels[a * wr + c];
      for (int l = 0; l < dl; ++l) {
        Eigen::Map<RowMat> zb(zbuf.data() + 4L * l * dr, 4, dr);
        Eigen::Map<const RowMat> yb(ybuf.data() + 4L * l * dr, 4, dr);
        zb.noalias() = k * yb;
      }
      Eigen::Map<const RowMat> zm(zbuf.data(), 4L * dl, dr);
      ym.noalias() += zm * right[c].transpose();
    }
  }
}

LocalSolveResult solve_effective(const TwoSiteProblem& problem,
                                 const Eigen::VectorXd& start, double tol,
                                 int max_iter, unsigned long seed) {
  const long dim = problem.dim();
  Eigen::VectorXd x0 = (start.size() == dim && start.norm() > 0)
                           ? Eigen::VectorXd(start.normalized())
                           : lanczos_random_start(dim, seed);
  auto apply = [&](const Eigen::VectorXd& x, Eigen::VectorXd& y) {
    problem.apply(x, y);
  };
  LanczosResult lr = lanczos_ground(dim, apply, x0, tol, max_iter);
  return {lr.energy, std::move(lr.vector), lr.iterations, lr.residual, lr.converged};
}

GroundStateResult run_dmrg(const ModelParams& params, const DmrgConfig& config) {
  params.validate();
  config.validate();
  const int n = params.n_sites;
  const MatrixProductOperator mpo = build_mpo(params);

  const bool cold_start = !config.warm_start.has_value();
  MatrixProductState mps;
  if (config.warm_start) {
    if (config.warm_start->n_sites() != n)
      throw std::invalid_argument("run_dmrg: warm_start size mismatch");
    mps = *config.warm_start;
  } else {
    mps = neel_state(n);
  }
  canonicalize_inplace(mps, 1);

  std::vector<EnvBlock> left(n + 2), right(n + 2);
  left[0] = trivial_env();
  right[n + 1] = trivial_env();
  for (int i = n; i >= 3; --i)
    right[i] = absorb_right(right[i + 1], mpo.sites[i - 1], mps.site(i));

  std::mt19937_64 noise_rng(config.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  GroundStateResult res;
  double prev_energy = 0.0;

  for (int sweep = 1; sweep <= config.n_sweeps_max; ++sweep) {
    double max_dw = 0.0;
    double energy = 0.0;

    auto optimize = [&](int bond, bool move_right) {
      TwoSiteProblem prob{left[bond - 1], right[bond + 2], mpo.sites[bond - 1],
                          mpo.sites[bond]};
      Eigen::VectorXd psi0 = merge_two_site(mps, bond);
      if (cold_start && sweep <= 2) {
        // small deterministic kick helps the bond dimensions grow out of the
        // product-state subspace
        for (long k = 0; k < psi0.size(); ++k) psi0[k] += 1e-5 * gauss(noise_rng);
      }
      LocalSolveResult local =
          solve_effective(prob, psi0, config.local_solver_tol, 200, config.seed);
      energy = local.local_energy;
      SplitResult split =
          split_two_site(mps, bond, local.optimized_tensor, mps.site(bond).left,
                         mps.site(bond + 1).right, config.max_kept_m,
                         config.degeneracy_tol, move_right);
      max_dw = std::max(max_dw, split.discarded_weight);
      if (move_right)
        left[bond] = absorb_left(left[bond - 1], mpo.sites[bond - 1], mps.site(bond));
      else
        right[bond + 1] = absorb_right(right[bond + 2], mpo.sites[bond], mps.site(bond + 1));
    };

    for (int bond = 1; bond <= n - 2; ++bond) optimize(bond, true);
    for (int bond = n - 1; bond >= 1; --bond) optimize(bond, false);

    res.sweep_energies.push_back(energy);
    res.max_discarded_weight = max_dw;
    if (config.on_sweep) config.on_sweep({sweep, energy, max_dw});

    if (sweep >= 2 && std::abs(energy - prev_energy) < config.energy_tol) {
      res.converged = true;
      prev_energy = energy;
      break;
    }
    prev_energy = energy;
  }

  res.energy = res.sweep_energies.back();
  res.state = std::move(mps);
  return res;
}

GroundStateResult continue_in_delta(const ModelParams& params,
                                    const GroundStateResult& previous,
                                    double new_delta_f, const DmrgConfig& config) {
  if (previous.state.n_sites() != params.n_sites)
    throw std::invalid_argument("continue_in_delta: size mismatch");
  ModelParams next = params;
  next.delta_f = new_delta_f;
  DmrgConfig warm = config;
  warm.warm_start = previous.state;
  return run_dmrg(next, warm);
}

double expectation_value(const MatrixProductState& state,
                         const MatrixProductOperator& mpo) {
  if (state.n_sites() != mpo.n_sites())
    throw std::invalid_argument("expectation_value: size mismatch");
  EnvBlock env = trivial_env();
  Eigen::MatrixXd norm_env = Eigen::MatrixXd::Ones(1, 1);
  for (int i = 1; i <= state.n_sites(); ++i) {
    const SiteTensor& t = state.site(i);
    env = absorb_left(env, mpo.sites[i - 1], t);
    Eigen::MatrixXd nn = Eigen::MatrixXd::Zero(t.right, t.right);
    for (int s = 0; s < 2; ++s)
      nn.noalias() += t.phys_slice(s).transpose() * norm_env * t.phys_slice(s);
    norm_env = std::move(nn);
  }
  return env[0](0, 0) / norm_env(0, 0);
}

}  // namespace spinchain
