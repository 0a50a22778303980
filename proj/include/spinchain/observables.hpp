#ifndef SPINCHAIN_OBSERVABLES_HPP
#define SPINCHAIN_OBSERVABLES_HPP

#include <variant>

#include "spinchain/exact.hpp"
#include "spinchain/mps.hpp"

namespace spinchain {

/// Backend-agnostic ground-state handle.
struct GroundState {
  int n_sites = 0;
  double energy = 0.0;
  double max_discarded_weight = 0.0;
  bool converged = true;
  std::variant<DenseState, MatrixProductState> repr;

  bool is_exact() const { return std::holds_alternative<DenseState>(repr); }
};

struct FidelityPoint {
  double lambda = 0.0;
  double delta = 0.0;
  double fidelity_value = 0.0;
  double susceptibility = 0.0;
  int n_sites = 0;
};

struct EntropyPoint {
  double lambda = 0.0;
  int l_sites = 0;
  double entropy_bits = 0.0;
  int n_sites = 0;
};

/// |<a|b>|. Both states must come from the same backend; no silent
/// cross-backend densification.
double fidelity(const GroundState& a, const GroundState& b);

/// 2(1-f)/(N delta^2); the finite-delta stand-in for the susceptibility limit.
double fidelity_susceptibility(double f, int n_sites, double delta);

FidelityPoint make_fidelity_point(double lambda, double delta, double f, int n_sites);

/// Entropy (bits) of the right-hand l_sites block.
EntropyPoint entanglement_entropy(const GroundState& gs, int l_sites,
                                  double lambda = 0.0);

}  // namespace spinchain

#endif
