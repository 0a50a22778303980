#include "spinchain/scan.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <stdexcept>

namespace spinchain {

namespace {

constexpr double kGridMatchTol = 1e-12;

bool grid_contains(const std::vector<ScanSample>& samples, double x) {
  for (const auto& s : samples)
    if (std::abs(s.delta_f - x) < kGridMatchTol) return true;
  return false;
}

// one warm-start continuation chain along delta_f, either backend
class ChainSolver {
 public:
  ChainSolver(const ScanConfig& config) : config_(config), use_ed_(config.uses_ed()) {
    if (use_ed_) basis_ = sector_basis(config.model.n_sites, 0.0);
  }

  GroundState solve(double delta_f) {
    ModelParams params = config_.model;
    params.delta_f = delta_f;
    GroundState gs;
    gs.n_sites = params.n_sites;
    if (use_ed_) {
      ExactGroundState ed = ground_state_lanczos(
          params, basis_, 1e-12, 500, config_.dmrg.seed,
          ed_chain_.size() > 0 ? &ed_chain_ : nullptr);
      ed_chain_ = ed.state.amplitudes;
      gs.energy = ed.energy;
      gs.converged = ed.converged;
      gs.repr = std::move(ed.state);
    } else {
      DmrgConfig cfg = config_.dmrg;
      if (mps_chain_) cfg.warm_start = *mps_chain_;
      GroundStateResult res = run_dmrg(params, cfg);
      mps_chain_ = res.state;
      gs.energy = res.energy;
      gs.converged = res.converged;
      gs.max_discarded_weight = res.max_discarded_weight;
      gs.repr = std::move(res.state);
    }
    return gs;
  }

  /// Partner state at lambda+delta, continued from the chain state at lambda
  /// so both sides of the fidelity sit on the same branch. Does not advance
  /// the chain.
  GroundState solve_partner(const GroundState& at_lambda, double partner_delta_f) {
    ModelParams params = config_.model;
    params.delta_f = partner_delta_f;
    GroundState gs;
    gs.n_sites = params.n_sites;
    if (use_ed_) {
      const auto& amps = std::get<DenseState>(at_lambda.repr).amplitudes;
      ExactGroundState ed =
          ground_state_lanczos(params, basis_, 1e-12, 500, config_.dmrg.seed, &amps);
      gs.energy = ed.energy;
      gs.converged = ed.converged;
      gs.repr = std::move(ed.state);
    } else {
      DmrgConfig cfg = config_.dmrg;
      cfg.warm_start = std::get<MatrixProductState>(at_lambda.repr);
      GroundStateResult res = run_dmrg(params, cfg);
      gs.energy = res.energy;
      gs.converged = res.converged;
      gs.max_discarded_weight = res.max_discarded_weight;
      gs.repr = std::move(res.state);
    }
    return gs;
  }

  void seed_from(const MatrixProductState& state) { mps_chain_ = state; }
  const std::optional<MatrixProductState>& chain_state() const { return mps_chain_; }
  bool uses_ed() const { return use_ed_; }

 private:
  const ScanConfig& config_;
  bool use_ed_;
  std::shared_ptr<const SectorBasis> basis_;
  Eigen::VectorXd ed_chain_;
  std::optional<MatrixProductState> mps_chain_;
};

}  // namespace

void ScanConfig::validate() const {
  model.validate();
  dmrg.validate();
  if (delta_f_grid.size() < 3)
    throw std::invalid_argument("ScanConfig: grid needs >= 3 points");
  for (size_t i = 1; i < delta_f_grid.size(); ++i)
    if (delta_f_grid[i] <= delta_f_grid[i - 1])
      throw std::invalid_argument("ScanConfig: grid must be strictly ascending");
  if (delta_step <= 0)
    throw std::invalid_argument("ScanConfig: delta_step > 0 required");
  const bool wants_entropy = observable != ScanObservable::FidelitySusceptibility;
  if (wants_entropy && model.n_sites % 4 != 0 && !allow_unaligned_entropy_cut)
    throw std::invalid_argument(
        "ScanConfig: entropy scans want n_sites % 4 == 0 (the L=N/2-1 cut then "
        "lands on an AF bond); set allow_unaligned_entropy_cut to override");
}

ScanResult scan_delta_f(const ScanConfig& config, const ScanProgress& progress,
                        const std::vector<ScanSample>& resume_samples,
                        const std::optional<MatrixProductState>& resume_state) {
  config.validate();
  const int n = config.model.n_sites;
  const int entropy_l = n / 2 - 1;
  const bool want_fidelity = config.observable != ScanObservable::Entropy;
  const bool want_entropy = config.observable != ScanObservable::FidelitySusceptibility;
  const double nan = std::numeric_limits<double>::quiet_NaN();

  ScanResult result;
  result.config = config;
  result.samples = resume_samples;
  std::sort(result.samples.begin(), result.samples.end(),
            [](const ScanSample& a, const ScanSample& b) { return a.delta_f < b.delta_f; });

  ChainSolver chain(config);
  if (resume_state && !chain.uses_ed()) chain.seed_from(*resume_state);

  // fidelity re-verification bookkeeping
  std::mt19937_64 pick_rng(config.dmrg.seed ^ 0x5ca11ab1u);
  std::vector<size_t> verify_at;
  if (config.verify_samples && want_fidelity) {
    std::uniform_int_distribution<size_t> dist(0, config.delta_f_grid.size() - 1);
    for (int k = 0; k < 3; ++k) verify_at.push_back(dist(pick_rng));
  }
  struct VerifyEntry {
    GroundState a, b;
    double recorded = 0.0;
  };
  std::vector<VerifyEntry> verify;

  long flagged = 0, processed = 0;

  auto run_point = [&](double lambda, size_t grid_index, bool track_verify) {
    GroundState a = chain.solve(lambda);
    ScanSample s;
    s.delta_f = lambda;
    s.energy = a.energy;
    s.converged = a.converged;
    s.max_discarded_weight = a.max_discarded_weight;
    s.fidelity = nan;
    s.susceptibility = nan;
    s.entropy_bits = nan;
    if (want_entropy) s.entropy_bits = entanglement_entropy(a, entropy_l, lambda).entropy_bits;
    if (want_fidelity) {
      GroundState b = chain.solve_partner(a, lambda + config.delta_step);
      s.converged = s.converged && b.converged;
      s.max_discarded_weight = std::max(s.max_discarded_weight, b.max_discarded_weight);
      const double f = fidelity(a, b);
      s.fidelity = f;
      s.susceptibility = fidelity_susceptibility(f, n, config.delta_step);
      if (track_verify &&
          std::count(verify_at.begin(), verify_at.end(), grid_index) > 0)
        verify.push_back({a, std::move(b), f});
    }
    ++processed;
    if (!s.converged) ++flagged;
    if (5 * flagged > processed)
      throw std::runtime_error("scan aborted: more than 20% of points failed to converge");
    result.samples.push_back(s);
    if (progress) {
      const MatrixProductState* cp =
          chain.chain_state() ? &*chain.chain_state() : nullptr;
      progress(s, cp);
    }
  };

  for (size_t i = 0; i < config.delta_f_grid.size(); ++i) {
    const double lambda = config.delta_f_grid[i];
    if (grid_contains(resume_samples, lambda)) continue;
    run_point(lambda, i, true);
  }

  std::sort(result.samples.begin(), result.samples.end(),
            [](const ScanSample& a, const ScanSample& b) { return a.delta_f < b.delta_f; });

  auto peak_points = [&](bool entropy) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& s : result.samples) {
      const double v = entropy ? s.entropy_bits : s.susceptibility;
      if (s.converged && std::isfinite(v)) pts.emplace_back(s.delta_f, v);
    }
    return pts;
  };

  if (config.refine) {
    // second pass across a window around the coarse argmax, continued from
    // the end of the coarse chain (walking the fine grid downward)
    const bool peak_on_entropy = !want_fidelity;
    auto pts = peak_points(peak_on_entropy);
    if (pts.size() < 3) throw std::runtime_error("scan: too few valid samples for refinement");
    size_t arg = 0;
    for (size_t i = 1; i < pts.size(); ++i)
      if (pts[i].second > pts[arg].second) arg = i;
    if (arg == 0 || arg + 1 == pts.size())
      throw std::runtime_error("scan: coarse maximum on grid boundary");
    const double center = pts[arg].first;
    const double lo = std::max(config.delta_f_grid.front(), center - config.refine_width / 2);
    const double hi = std::min(config.delta_f_grid.back(), center + config.refine_width / 2);
    std::vector<double> fine;
    for (int k = config.refine_points - 1; k >= 0; --k) {
      const double x = lo + (hi - lo) * k / (config.refine_points - 1);
      if (!grid_contains(result.samples, x)) fine.push_back(x);
    }
    for (double x : fine) run_point(x, 0, false);
    std::sort(result.samples.begin(), result.samples.end(),
              [](const ScanSample& a, const ScanSample& b) { return a.delta_f < b.delta_f; });
  }

  for (const auto& v : verify) {
    const double again = fidelity(v.a, v.b);
    if (std::abs(again - v.recorded) > 1e-9)
      throw std::logic_error("scan: recorded fidelity failed recomputation check");
  }

  if (want_fidelity) result.susceptibility_peak = locate_peak(peak_points(false));
  if (want_entropy) result.entropy_peak = locate_peak(peak_points(true));
  return result;
}

PeakEstimate locate_peak(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 3)
    throw std::invalid_argument("locate_peak: need at least 3 samples");
  size_t arg = 0;
  for (size_t i = 1; i < points.size(); ++i)
    if (points[i].second > points[arg].second) arg = i;
  if (arg == 0 || arg + 1 == points.size())
    throw std::runtime_error("locate_peak: maximum on grid boundary");

  // quadratic least squares through the 5 samples nearest the argmax
  size_t lo = arg >= 2 ? arg - 2 : 0;
  size_t hi = std::min(points.size() - 1, lo + 4);
  lo = hi >= 4 ? std::min(lo, hi - 4) : 0;
  const double x0 = points[arg].first;

  Eigen::MatrixXd a(hi - lo + 1, 3);
  Eigen::VectorXd y(hi - lo + 1);
  for (size_t i = lo; i <= hi; ++i) {
    const double x = points[i].first - x0;
    a(i - lo, 0) = x * x;
    a(i - lo, 1) = x;
    a(i - lo, 2) = 1.0;
    y(i - lo) = points[i].second;
  }
  Eigen::Vector3d coef = a.colPivHouseholderQr().solve(y);
  PeakEstimate peak;
  if (coef[0] < 0) {
    double v = -coef[1] / (2 * coef[0]);
    // keep the vertex between the argmax's neighbors
    v = std::clamp(v, points[arg - 1].first - x0, points[arg + 1].first - x0);
    peak.location = x0 + v;
    peak.value = coef[0] * v * v + coef[1] * v + coef[2];
  } else {
    peak.location = x0;
    peak.value = points[arg].second;
  }
  return peak;
}

ScalingFit finite_size_fit(const std::vector<std::pair<int, double>>& peaks) {
  std::map<int, std::pair<double, int>> grouped;
  for (const auto& [n, v] : peaks) {
    if (n <= 0) throw std::invalid_argument("finite_size_fit: n must be positive");
    auto& g = grouped[n];
    g.first += v;
    g.second += 1;
  }
  if (grouped.size() < 2)
    throw std::invalid_argument("finite_size_fit: need >= 2 distinct sizes");

  ScalingFit fit;
  for (const auto& [n, g] : grouped)
    fit.points.emplace_back(1.0 / n, g.first / g.second);
  std::sort(fit.points.begin(), fit.points.end());

  const size_t m = fit.points.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [x, y] : fit.points) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = m * sxx - sx * sx;
  fit.slope = (m * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / m;
  double ss = 0;
  for (const auto& [x, y] : fit.points) {
    const double r = y - (fit.intercept + fit.slope * x);
    ss += r * r;
  }
  fit.rms_residual = std::sqrt(ss / m);
  return fit;
}

}  // namespace spinchain
