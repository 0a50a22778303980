#include "spinchain/model.hpp"

#include <stdexcept>

#include <unsupported/Eigen/KroneckerProduct>

namespace spinchain {

namespace ops {

Eigen::Matrix2d identity() { return Eigen::Matrix2d::Identity(); }

Eigen::Matrix2d sz() {
  Eigen::Matrix2d m;
  m << 0.5, 0.0, 0.0, -0.5;
  return m;
}

Eigen::Matrix2d splus() {
  Eigen::Matrix2d m;
  m << 0.0, 1.0, 0.0, 0.0;
  return m;
}

Eigen::Matrix2d sminus() {
  Eigen::Matrix2d m;
  m << 0.0, 0.0, 1.0, 0.0;
  return m;
}

}  // namespace ops

void ModelParams::validate() const {
  if (n_sites < 2) throw std::invalid_argument("n_sites must be >= 2");
  if (n_sites % 2 != 0)
    throw std::invalid_argument("n_sites must be even (complete AF dimers)");
}

std::vector<BondTerm> build_bond_terms(const ModelParams& params) {
  params.validate();
  std::vector<BondTerm> bonds;
  bonds.reserve(params.n_sites - 1);
  for (int left = 1; left < params.n_sites; ++left) {
    BondTerm b;
    b.left_site = left;
    b.right_site = left + 1;
    if (left % 2 == 1) {
      b.kind = BondKind::AF;
      b.coupling = params.j_af;
      b.anisotropy = params.delta_af;
    } else {
      b.kind = BondKind::F;
      b.coupling = params.j_f;
      b.anisotropy = params.delta_f;
    }
    bonds.push_back(b);
  }
  return bonds;
}

Eigen::Matrix4d bond_matrix(double coupling, double anisotropy) {
  // J*(SxSx + SySy + D*SzSz) = J*(1/2(S+S- + S-S+) + D*SzSz); real in this basis.
  const double zz = coupling * anisotropy * 0.25;
  const double flip = coupling * 0.5;
  Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
  m(0, 0) = zz;
  m(1, 1) = -zz;
  m(2, 2) = -zz;
  m(3, 3) = zz;
  m(1, 2) = flip;
  m(2, 1) = flip;
  return m;
}

MatrixProductOperator build_mpo(const ModelParams& params) {
  const auto bonds = build_bond_terms(params);
  const int n = params.n_sites;

  MatrixProductOperator mpo;
  mpo.bond_dimension = 5;
  mpo.sites.resize(n);

  // W-matrix tracks: column 0 = bond completed, column 4 = nothing placed yet.
  // Row 4 of site i carries the couplings of bond (i, i+1).
  for (int i = 0; i < n; ++i) {
    MpoSite& site = mpo.sites[i];
    site.left_dim = (i == 0) ? 1 : 5;
    site.right_dim = (i == n - 1) ? 1 : 5;
    const int start_row = (i == 0) ? 0 : 4;

    if (i > 0) {
      site.entries.push_back({0, 0, ops::identity()});
      site.entries.push_back({1, 0, ops::sminus()});
      site.entries.push_back({2, 0, ops::splus()});
      site.entries.push_back({3, 0, ops::sz()});
    }
    if (i < n - 1) {
      const BondTerm& b = bonds[i];
      site.entries.push_back({start_row, 1, 0.5 * b.coupling * ops::splus()});
      site.entries.push_back({start_row, 2, 0.5 * b.coupling * ops::sminus()});
      site.entries.push_back(
          {start_row, 3, b.coupling * b.anisotropy * ops::sz()});
      site.entries.push_back({start_row, 4, ops::identity()});
    }
  }
  return mpo;
}

Eigen::MatrixXd mpo_to_dense(const MatrixProductOperator& mpo) {
  const int n = mpo.n_sites();
  if (n > 12) throw std::invalid_argument("mpo_to_dense limited to n_sites <= 12");

  // Accumulate per right-bond-index dense operators, site 1 most significant.
  std::vector<Eigen::MatrixXd> acc(mpo.sites[0].right_dim,
                                   Eigen::MatrixXd::Zero(2, 2));
  for (const MpoEntry& e : mpo.sites[0].entries) acc[e.right] += e.op;

  for (int i = 1; i < n; ++i) {
    const MpoSite& site = mpo.sites[i];
    const long dim = 1L << (i + 1);
    std::vector<Eigen::MatrixXd> next(site.right_dim,
                                      Eigen::MatrixXd::Zero(dim, dim));
    for (const MpoEntry& e : site.entries)
      next[e.right] += Eigen::kroneckerProduct(acc[e.left], e.op).eval();
    acc = std::move(next);
  }
  return acc[0];
}

}  // namespace spinchain
