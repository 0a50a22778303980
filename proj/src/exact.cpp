#include "spinchain/exact.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include <Eigen/SVD>

#include "spinchain/lanczos.hpp"

namespace spinchain {

long SectorBasis::index_of(std::uint32_t config) const {
  auto it = std::lower_bound(states.begin(), states.end(), config);
  if (it == states.end() || *it != config) return -1;
  return it - states.begin();
}

std::shared_ptr<const SectorBasis> sector_basis(int n_sites, double total_sz,
                                                int site_cap) {
  if (n_sites < 1 || n_sites > site_cap)
    throw std::invalid_argument("sector_basis: n_sites outside [1, cap]");
  const double n_up_real = n_sites / 2.0 + total_sz;
  const double rounded = std::round(n_up_real);
  if (std::abs(n_up_real - rounded) > 1e-9)
    throw std::invalid_argument("sector_basis: non-integral up-spin count");
  const int n_up = static_cast<int>(rounded);
  if (n_up < 0 || n_up > n_sites)
    throw std::invalid_argument("sector_basis: total_sz out of range");

  auto basis = std::make_shared<SectorBasis>();
  basis->n_sites = n_sites;
  basis->total_sz = total_sz;
  const int n_down = n_sites - n_up;
  const std::uint32_t limit = 1u << n_sites;
  for (std::uint32_t c = 0; c < limit; ++c)
    if (std::popcount(c) == n_down) basis->states.push_back(c);
  return basis;
}

Eigen::VectorXd apply_hamiltonian(const ModelParams& params,
                                  const SectorBasis& basis,
                                  const Eigen::VectorXd& v) {
  if (v.size() != basis.size())
    throw std::invalid_argument("apply_hamiltonian: dimension mismatch");
  const auto bonds = build_bond_terms(params);
  const int n = params.n_sites;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(v.size());

  for (long idx = 0; idx < basis.size(); ++idx) {
    const std::uint32_t c = basis.states[idx];
    const double amp = v[idx];
    double diag = 0.0;
    for (const BondTerm& b : bonds) {
      // bit position: site i lives at bit (n - i); set bit = down
      const int bl = n - b.left_site;
      const int br = n - b.right_site;
      const bool dl = (c >> bl) & 1u;
      const bool dr = (c >> br) & 1u;
      const double zz = b.coupling * b.anisotropy * 0.25;
      diag += (dl == dr) ? zz : -zz;
      if (dl != dr) {
        const std::uint32_t flipped = c ^ ((1u << bl) | (1u << br));
        const long j = basis.index_of(flipped);
        out[j] += 0.5 * b.coupling * amp;
      }
    }
    out[idx] += diag * amp;
  }
  return out;
}

Eigen::MatrixXd dense_sector_hamiltonian(const ModelParams& params,
                                         const SectorBasis& basis) {
  const long dim = basis.size();
  if (dim > 4096)
    throw std::invalid_argument("dense_sector_hamiltonian: basis too large");
  Eigen::MatrixXd h(dim, dim);
  Eigen::VectorXd e = Eigen::VectorXd::Zero(dim);
  for (long j = 0; j < dim; ++j) {
    e[j] = 1.0;
    h.col(j) = apply_hamiltonian(params, basis, e);
    e[j] = 0.0;
  }
  return h;
}

ExactGroundState ground_state_lanczos(const ModelParams& params,
                                      std::shared_ptr<const SectorBasis> basis,
                                      double tol, int max_iter,
                                      unsigned long seed,
                                      const Eigen::VectorXd* warm_start) {
  if (!basis || basis->size() == 0)
    throw std::invalid_argument("ground_state_lanczos: empty basis");
  const long dim = basis->size();
  Eigen::VectorXd start = (warm_start && warm_start->size() == dim)
                              ? warm_start->normalized()
                              : lanczos_random_start(dim, seed);
  auto apply = [&](const Eigen::VectorXd& x, Eigen::VectorXd& y) {
    y = apply_hamiltonian(params, *basis, x);
  };
  LanczosResult lr = lanczos_ground(dim, apply, start, tol, max_iter);

  ExactGroundState gs;
  gs.energy = lr.energy;
  gs.state = DenseState{std::move(basis), std::move(lr.vector)};
  gs.converged = lr.converged;
  gs.residual = lr.residual;
  gs.iterations = lr.iterations;
  return gs;
}

double exact_entropy(const DenseState& state, int l_sites) {
  const SectorBasis& basis = *state.basis;
  const int n = basis.n_sites;
  if (l_sites < 1 || l_sites > n - 1)
    throw std::invalid_argument("exact_entropy: l_sites out of range");

  // scatter into the full 2^n space, then split off the right-hand block
  // (least significant l_sites bits)
  const long rows = 1L << (n - l_sites);
  const long cols = 1L << l_sites;
  Eigen::MatrixXd psi = Eigen::MatrixXd::Zero(rows, cols);
  for (long i = 0; i < basis.size(); ++i) {
    const std::uint32_t c = basis.states[i];
    psi(c >> l_sites, c & (cols - 1)) = state.amplitudes[i];
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(psi);
  double entropy = 0.0;
  for (double s : svd.singularValues()) {
    const double p = s * s;
    if (p > 1e-16) entropy -= p * std::log2(p);
  }
  return entropy;
}

double exact_overlap(const DenseState& a, const DenseState& b) {
  if (!a.basis || !b.basis || !a.basis->same_sector(*b.basis) ||
      a.amplitudes.size() != b.amplitudes.size())
    throw std::invalid_argument("exact_overlap: basis mismatch");
  return std::abs(a.amplitudes.dot(b.amplitudes));
}

}  // namespace spinchain
