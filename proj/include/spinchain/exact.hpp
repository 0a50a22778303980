#ifndef SPINCHAIN_EXACT_HPP
#define SPINCHAIN_EXACT_HPP

#include <cstdint>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "spinchain/model.hpp"

namespace spinchain {

/// Enumerated basis of one total-Sz sector. Configurations are bit-encoded
/// with site 1 on the most significant of the n_sites bits; a set bit means
/// spin down, so the integer encoding matches the dense {uu, ud, du, dd}
/// ordering used everywhere else.
struct SectorBasis {
  int n_sites = 0;
  double total_sz = 0.0;
  std::vector<std::uint32_t> states;  // strictly ascending

  long size() const { return static_cast<long>(states.size()); }
  /// Ordinal of a configuration, -1 if outside the sector.
  long index_of(std::uint32_t config) const;

  bool same_sector(const SectorBasis& other) const {
    return n_sites == other.n_sites && total_sz == other.total_sz;
  }
};

struct DenseState {
  std::shared_ptr<const SectorBasis> basis;
  Eigen::VectorXd amplitudes;
};

/// Default memory-guard cap on n_sites.
inline constexpr int kExactSiteCap = 20;

std::shared_ptr<const SectorBasis> sector_basis(int n_sites, double total_sz,
                                                int site_cap = kExactSiteCap);

/// Matrix-free H*v restricted to the sector.
Eigen::VectorXd apply_hamiltonian(const ModelParams& params,
                                  const SectorBasis& basis,
                                  const Eigen::VectorXd& v);

/// Dense sector matrix, assembled column by column; |basis| <= 4096.
Eigen::MatrixXd dense_sector_hamiltonian(const ModelParams& params,
                                         const SectorBasis& basis);

struct ExactGroundState {
  double energy = 0.0;
  DenseState state;
  bool converged = false;
  double residual = 0.0;
  int iterations = 0;
};

/// Sector ground state via Lanczos with full reorthogonalization. A warm
/// start vector, when given, both speeds convergence and pins the branch
/// under quasi-degeneracy.
ExactGroundState ground_state_lanczos(
    const ModelParams& params, std::shared_ptr<const SectorBasis> basis,
    double tol = 1e-12, int max_iter = 500, unsigned long seed = 12345,
    const Eigen::VectorXd* warm_start = nullptr);

/// Von Neumann entropy (bits) of the right-hand l_sites block.
double exact_entropy(const DenseState& state, int l_sites);

/// |<a|b>| for states over the same sector basis.
double exact_overlap(const DenseState& a, const DenseState& b);

}  // namespace spinchain

#endif
