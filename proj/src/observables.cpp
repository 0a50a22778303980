#include "spinchain/observables.hpp"

#include <stdexcept>

namespace spinchain {

double fidelity(const GroundState& a, const GroundState& b) {
  if (a.n_sites != b.n_sites)
    throw std::invalid_argument("fidelity: size mismatch");
  if (a.is_exact() != b.is_exact())
    throw std::invalid_argument("fidelity: backend representation mismatch");
  if (a.is_exact())
    return exact_overlap(std::get<DenseState>(a.repr), std::get<DenseState>(b.repr));
  return overlap(std::get<MatrixProductState>(a.repr),
                 std::get<MatrixProductState>(b.repr));
}

double fidelity_susceptibility(double f, int n_sites, double delta) {
  if (delta == 0.0)
    throw std::invalid_argument("fidelity_susceptibility: delta must be nonzero");
  return 2.0 * (1.0 - f) / (n_sites * delta * delta);
}

FidelityPoint make_fidelity_point(double lambda, double delta, double f, int n_sites) {
  FidelityPoint p;
  p.lambda = lambda;
  p.delta = delta;
  p.fidelity_value = f;
  p.n_sites = n_sites;
  p.susceptibility = fidelity_susceptibility(f, n_sites, delta);
  return p;
}

EntropyPoint entanglement_entropy(const GroundState& gs, int l_sites, double lambda) {
  if (l_sites < 1 || l_sites > gs.n_sites - 1)
    throw std::invalid_argument("entanglement_entropy: l_sites out of range");
  EntropyPoint p;
  p.lambda = lambda;
  p.l_sites = l_sites;
  p.n_sites = gs.n_sites;
  if (gs.is_exact()) {
    p.entropy_bits = exact_entropy(std::get<DenseState>(gs.repr), l_sites);
  } else {
    const auto& mps = std::get<MatrixProductState>(gs.repr);
    p.entropy_bits = entropy_bits(schmidt_spectrum(mps, gs.n_sites - l_sites));
  }
  return p;
}

}  // namespace spinchain
