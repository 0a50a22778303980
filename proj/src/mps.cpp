#include "spinchain/mps.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include <Eigen/QR>
#include <Eigen/SVD>

namespace spinchain {

namespace {

// Thin QR with the diagonal of R forced nonnegative, so repeated
// canonicalization is deterministic.
void signed_thin_qr(const Eigen::MatrixXd& m, Eigen::MatrixXd& q, Eigen::MatrixXd& r) {
  const long k = std::min(m.rows(), m.cols());
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
  q = qr.householderQ() * Eigen::MatrixXd::Identity(m.rows(), k);
  r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  for (long j = 0; j < k; ++j) {
    if (r(j, j) < 0) {
      r.row(j) = -r.row(j);
      q.col(j) = -q.col(j);
    }
  }
}

void require_valid_center(const MatrixProductState& state, int center) {
  if (center < 1 || center > state.n_sites())
    throw std::invalid_argument("canonicalize: center out of range");
}

}  // namespace

std::vector<int> MatrixProductState::bond_dims() const {
  std::vector<int> dims;
  dims.reserve(sites.size() + 1);
  dims.push_back(sites.empty() ? 1 : sites.front().left);
  for (const auto& t : sites) dims.push_back(t.right);
  return dims;
}

MatrixProductState product_mps(int n_sites, const std::vector<Spin>& configuration) {
  if (static_cast<int>(configuration.size()) != n_sites)
    throw std::invalid_argument("product_mps: configuration length mismatch");
  MatrixProductState mps;
  mps.sites.reserve(n_sites);
  for (int i = 0; i < n_sites; ++i) {
    SiteTensor t(1, 1);
    t.at(0, configuration[i] == Spin::Up ? 0 : 1, 0) = 1.0;
    mps.sites.push_back(std::move(t));
  }
  mps.canonical_center = 1;
  return mps;
}

MatrixProductState random_mps(int n_sites, int max_bond, unsigned long seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  MatrixProductState mps;
  int dl = 1;
  for (int i = 0; i < n_sites; ++i) {
    const long cap_left = 1L << std::min(i, 30);
    const long cap_right = 1L << std::min(n_sites - 1 - i, 30);
    const int dr = (i == n_sites - 1)
                       ? 1
                       : static_cast<int>(std::min<long>(max_bond, std::min(2 * cap_left, cap_right)));
    SiteTensor t(dl, dr);
    for (long k = 0; k < t.data.size(); ++k) t.data[k] = dist(rng);
    mps.sites.push_back(std::move(t));
    dl = dr;
  }
  canonicalize_inplace(mps, 1);
  // normalize at the center
  SiteTensor& c = mps.sites.front();
  const double norm = c.data.norm();
  if (norm > 0) c.data /= norm;
  return mps;
}

void canonicalize_inplace(MatrixProductState& state, int center) {
  require_valid_center(state, center);
  const int n = state.n_sites();
  Eigen::MatrixXd q, r;

  for (int i = 1; i < center; ++i) {
    SiteTensor& t = state.site(i);
    signed_thin_qr(t.fused_left(), q, r);
    const int k = static_cast<int>(q.cols());
    SiteTensor nt(t.left, k);
    nt.fused_left() = q;
    state.sites[i - 1] = std::move(nt);
    SiteTensor& next = state.site(i + 1);
    SiteTensor nn(k, next.right);
    nn.fused_right() = r * next.fused_right();
    state.sites[i] = std::move(nn);
  }
  for (int i = n; i > center; --i) {
    SiteTensor& t = state.site(i);
    signed_thin_qr(t.fused_right().transpose(), q, r);
    const int k = static_cast<int>(q.cols());
    SiteTensor nt(k, t.right);
    nt.fused_right() = q.transpose();
    state.sites[i - 1] = std::move(nt);
    SiteTensor& prev = state.site(i - 1);
    SiteTensor np(prev.left, k);
    np.fused_left() = prev.fused_left() * r.transpose();
    state.sites[i - 2] = std::move(np);
  }
  state.canonical_center = center;
}

MatrixProductState canonicalize(const MatrixProductState& state, int center) {
  MatrixProductState out = state;
  canonicalize_inplace(out, center);
  return out;
}

double overlap(const MatrixProductState& a, const MatrixProductState& b) {
  if (a.n_sites() != b.n_sites())
    throw std::invalid_argument("overlap: length mismatch");
  Eigen::MatrixXd env = Eigen::MatrixXd::Ones(1, 1);
  for (int i = 1; i <= a.n_sites(); ++i) {
    const SiteTensor& ta = a.site(i);
    const SiteTensor& tb = b.site(i);
    Eigen::MatrixXd next = Eigen::MatrixXd::Zero(ta.right, tb.right);
    for (int s = 0; s < 2; ++s)
      next.noalias() += ta.phys_slice(s).transpose() * env * tb.phys_slice(s);
    env = std::move(next);
  }
  return std::abs(env(0, 0));
}

SchmidtSpectrum schmidt_spectrum(const MatrixProductState& state, int cut_bond) {
  if (cut_bond < 1 || cut_bond > state.n_sites() - 1)
    throw std::invalid_argument("schmidt_spectrum: cut out of range");
  MatrixProductState work = canonicalize(state, cut_bond);
  Eigen::BDCSVD<Eigen::MatrixXd> svd(work.site(cut_bond).fused_left());
  SchmidtSpectrum spec;
  spec.cut_bond = cut_bond;
  const auto& sv = svd.singularValues();
  spec.values.assign(sv.data(), sv.data() + sv.size());
  return spec;
}

double entropy_bits(const SchmidtSpectrum& spectrum) {
  double entropy = 0.0;
  for (double v : spectrum.values) {
    const double p = v * v;
    if (p > 1e-16) entropy -= p * std::log2(p);
  }
  return entropy;
}

TruncationRecord truncate_bond_inplace(MatrixProductState& state, int bond,
                                       int max_kept, double degeneracy_tol) {
  const int n = state.n_sites();
  if (bond < 1 || bond > n - 1)
    throw std::invalid_argument("truncate_bond: bond out of range");
  if (max_kept < 1) throw std::invalid_argument("truncate_bond: max_kept >= 1 required");
  if (!state.canonical_center ||
      (*state.canonical_center != bond && *state.canonical_center != bond + 1))
    throw std::invalid_argument("truncate_bond: canonical center must be adjacent to bond");

  const bool from_left = *state.canonical_center == bond;
  Eigen::MatrixXd m = from_left
                          ? Eigen::MatrixXd(state.site(bond).fused_left())
                          : Eigen::MatrixXd(state.site(bond + 1).fused_right());
  Eigen::BDCSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Eigen::MatrixXd u = svd.matrixU();
  Eigen::MatrixXd v = svd.matrixV();
  const Eigen::VectorXd sigma = svd.singularValues();
  const long rank = sigma.size();

  // noise floor, but never drop everything
  long floor_rank = 0;
  while (floor_rank < rank && sigma[floor_rank] >= 1e-14) ++floor_rank;
  floor_rank = std::max<long>(floor_rank, 1);

  long kept = std::min<long>(max_kept, floor_rank);
  const long hard_cap = std::min<long>(floor_rank, 2L * max_kept);
  while (kept < hard_cap && sigma[kept] >= sigma[kept - 1] - degeneracy_tol) ++kept;

  double kept_weight = 0.0, total_weight = 0.0;
  for (long i = 0; i < rank; ++i) total_weight += sigma[i] * sigma[i];
  for (long i = 0; i < kept; ++i) kept_weight += sigma[i] * sigma[i];

  TruncationRecord rec;
  rec.bond = bond;
  rec.kept = static_cast<int>(kept);
  rec.discarded_weight = std::max(0.0, total_weight - kept_weight);

  Eigen::VectorXd sig = sigma.head(kept) / std::sqrt(kept_weight);

  // gauge fix: largest-magnitude entry of each left singular vector positive
  for (long j = 0; j < kept; ++j) {
    long imax = 0;
    u.col(j).cwiseAbs().maxCoeff(&imax);
    if (u(imax, j) < 0) {
      u.col(j) = -u.col(j);
      v.col(j) = -v.col(j);
    }
  }

  if (from_left) {
    SiteTensor& t = state.site(bond);
    SiteTensor nt(t.left, static_cast<int>(kept));
    nt.fused_left() = u.leftCols(kept);
    SiteTensor& next = state.site(bond + 1);
    SiteTensor nn(static_cast<int>(kept), next.right);
    nn.fused_right() = sig.asDiagonal() * v.leftCols(kept).transpose() * next.fused_right();
    state.sites[bond - 1] = std::move(nt);
    state.sites[bond] = std::move(nn);
    state.canonical_center = bond + 1;
  } else {
    SiteTensor& t = state.site(bond + 1);
    SiteTensor nt(static_cast<int>(kept), t.right);
    nt.fused_right() = v.leftCols(kept).transpose();
    SiteTensor& prev = state.site(bond);
    SiteTensor np(prev.left, static_cast<int>(kept));
    np.fused_left() = prev.fused_left() * u.leftCols(kept) * sig.asDiagonal();
    state.sites[bond] = std::move(nt);
    state.sites[bond - 1] = std::move(np);
    state.canonical_center = bond;
  }
  return rec;
}

std::pair<MatrixProductState, TruncationRecord> truncate_bond(
    const MatrixProductState& state, int bond, int max_kept, double degeneracy_tol) {
  MatrixProductState out = state;
  TruncationRecord rec = truncate_bond_inplace(out, bond, max_kept, degeneracy_tol);
  return {std::move(out), rec};
}

Eigen::VectorXd mps_to_dense(const MatrixProductState& state) {
  const int n = state.n_sites();
  if (n > 16) throw std::invalid_argument("mps_to_dense: n_sites <= 16 required");
  Eigen::MatrixXd c = Eigen::MatrixXd::Ones(1, 1);
  for (int i = 1; i <= n; ++i) {
    const SiteTensor& t = state.site(i);
    const long rows = c.rows();
    Eigen::MatrixXd next(2 * rows, t.right);
    for (int s = 0; s < 2; ++s) {
      const Eigen::MatrixXd tmp = c * t.phys_slice(s);
      for (long row = 0; row < rows; ++row) next.row(2 * row + s) = tmp.row(row);
    }
    c = std::move(next);
  }
  return Eigen::VectorXd(c.col(0));
}

double total_sz(const MatrixProductState& state) {
  const int n = state.n_sites();
  std::vector<Eigen::MatrixXd> rights(n + 1);
  rights[n] = Eigen::MatrixXd::Ones(1, 1);
  for (int i = n; i >= 1; --i) {
    const SiteTensor& t = state.site(i);
    Eigen::MatrixXd r = Eigen::MatrixXd::Zero(t.left, t.left);
    for (int s = 0; s < 2; ++s)
      r.noalias() += t.phys_slice(s) * rights[i] * t.phys_slice(s).transpose();
    rights[i - 1] = std::move(r);
  }
  const double norm2 = rights[0](0, 0);

  double total = 0.0;
  Eigen::MatrixXd left = Eigen::MatrixXd::Ones(1, 1);
  for (int i = 1; i <= n; ++i) {
    const SiteTensor& t = state.site(i);
    for (int s = 0; s < 2; ++s) {
      const double w = (s == 0) ? 0.5 : -0.5;
      total += w * (t.phys_slice(s).transpose() * left * t.phys_slice(s) * rights[i]).trace();
    }
    Eigen::MatrixXd nl = Eigen::MatrixXd::Zero(t.right, t.right);
    for (int s = 0; s < 2; ++s)
      nl.noalias() += t.phys_slice(s).transpose() * left * t.phys_slice(s);
    left = std::move(nl);
  }
  return total / norm2;
}

}  // namespace spinchain
