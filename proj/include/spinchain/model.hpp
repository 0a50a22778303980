#ifndef SPINCHAIN_MODEL_HPP
#define SPINCHAIN_MODEL_HPP

#include <vector>

#include <Eigen/Dense>

namespace spinchain {

enum class Boundary { Open };

/// Parameters of the alternating-bond anisotropic Heisenberg chain.
/// Defaults follow the usual convention J_AF = -J_F = 1, Delta_AF = 1.
struct ModelParams {
  int n_sites = 2;
  double j_af = 1.0;
  double j_f = -1.0;
  double delta_af = 1.0;
  double delta_f = 1.0;
  Boundary boundary = Boundary::Open;

  /// Throws std::invalid_argument unless n_sites is even and >= 2.
  void validate() const;

  bool operator==(const ModelParams&) const = default;
};

enum class BondKind { AF, F };

/// One nearest-neighbor bond J*(SxSx + SySy + Delta*SzSz). Sites are 1-based.
struct BondTerm {
  int left_site = 0;
  int right_site = 0;
  double coupling = 0.0;
  double anisotropy = 0.0;
  BondKind kind = BondKind::AF;
};

/// AF bonds on (2i-1, 2i), F bonds on (2i, 2i+1); ascending by left_site.
std::vector<BondTerm> build_bond_terms(const ModelParams& params);

/// Two-site bond Hamiltonian on the basis {uu, ud, du, dd}, Sz = +1/2 for up.
Eigen::Matrix4d bond_matrix(double coupling, double anisotropy);

/// One nonzero block of an MPO site tensor: op sits at (left, right) of the
/// operator-valued matrix W.
struct MpoEntry {
  int left = 0;
  int right = 0;
  Eigen::Matrix2d op;
};

struct MpoSite {
  int left_dim = 1;
  int right_dim = 1;
  std::vector<MpoEntry> entries;
};

struct MatrixProductOperator {
  std::vector<MpoSite> sites;
  int bond_dimension = 5;

  int n_sites() const { return static_cast<int>(sites.size()); }
};

/// Standard bond-dimension-5 MPO for the alternating chain.
MatrixProductOperator build_mpo(const ModelParams& params);

/// Full 2^N x 2^N contraction of an MPO, site 1 on the most significant bit.
/// Guarded to n_sites <= 12.
Eigen::MatrixXd mpo_to_dense(const MatrixProductOperator& mpo);

namespace ops {
Eigen::Matrix2d identity();
Eigen::Matrix2d sz();
Eigen::Matrix2d splus();
Eigen::Matrix2d sminus();
}  // namespace ops

}  // namespace spinchain

#endif
