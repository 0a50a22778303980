#ifndef SPINCHAIN_SCAN_HPP
#define SPINCHAIN_SCAN_HPP

#include <functional>
#include <optional>
#include <vector>

#include "spinchain/dmrg.hpp"
#include "spinchain/model.hpp"
#include "spinchain/observables.hpp"

namespace spinchain {

enum class ScanObservable { FidelitySusceptibility, Entropy, Both };
enum class Backend { ED, DMRG, Auto };

struct ScanConfig {
  ModelParams model;                 // delta_f is overwritten by the grid
  std::vector<double> delta_f_grid;  // strictly ascending, >= 3 points
  double delta_step = 0.001;
  ScanObservable observable = ScanObservable::Both;
  Backend backend = Backend::Auto;
  DmrgConfig dmrg;
  bool refine = false;
  double refine_width = 0.2;
  int refine_points = 21;
  /// Entropy scans default to n_sites % 4 == 0 so the L=N/2-1 cut lands on
  /// an AF bond; setting this lifts the restriction.
  bool allow_unaligned_entropy_cut = false;
  /// Re-check recorded fidelities at 3 grid points after the scan.
  bool verify_samples = true;

  void validate() const;
  bool uses_ed() const {
    return backend == Backend::ED ||
           (backend == Backend::Auto && model.n_sites <= 16);
  }
};

struct ScanSample {
  double delta_f = 0.0;
  double energy = 0.0;
  double fidelity = 0.0;        // F(delta_f, delta_f + delta_step)
  double susceptibility = 0.0;
  double entropy_bits = 0.0;    // right-hand L = N/2-1 block
  double max_discarded_weight = 0.0;
  bool converged = true;
};

struct PeakEstimate {
  double location = 0.0;
  double value = 0.0;
};

struct ScanResult {
  ScanConfig config;
  std::vector<ScanSample> samples;  // ascending in delta_f
  std::optional<PeakEstimate> susceptibility_peak;
  std::optional<PeakEstimate> entropy_peak;
};

/// Progress hook: called after each completed grid point with the sample and
/// the running count; used by the CLI for incremental checkpointing.
using ScanProgress = std::function<void(const ScanSample&, const MatrixProductState*)>;

/// Walks the grid in ascending order on one warm-start continuation chain;
/// at each point computes the ground state at lambda and lambda+delta and
/// records F, S and (when requested) the L=N/2-1 entropy.
/// `resume_samples` skips grid points already covered (matched by delta_f),
/// continuing the chain from `resume_state` when given.
ScanResult scan_delta_f(const ScanConfig& config,
                        const ScanProgress& progress = nullptr,
                        const std::vector<ScanSample>& resume_samples = {},
                        const std::optional<MatrixProductState>& resume_state = {});

/// Coarse argmax + quadratic fit through the 5 nearest samples. Throws if the
/// argmax sits on the grid boundary or fewer than 3 points are given.
PeakEstimate locate_peak(const std::vector<std::pair<double, double>>& points);

struct ScalingFit {
  std::vector<std::pair<double, double>> points;  // (1/N, delta_f_max)
  double slope = 0.0;
  double intercept = 0.0;  // extrapolated critical point
  double rms_residual = 0.0;
};

/// Ordinary least squares of delta_f_max against 1/N; duplicate N averaged.
ScalingFit finite_size_fit(const std::vector<std::pair<int, double>>& peaks);

}  // namespace spinchain

#endif
