// spinchain CLI: ground states, delta_F scans, finite-size fits, entropy
// profiles and the ED-vs-DMRG validation suite, driven by a key=value config
// file. Exit codes: 0 success, 1 runtime/validation failure, 2 bad usage or
// config.
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "spinchain/dmrg.hpp"
#include "spinchain/exact.hpp"
#include "spinchain/io.hpp"
#include "spinchain/log.hpp"
#include "spinchain/observables.hpp"
#include "spinchain/scan.hpp"

namespace fs = std::filesystem;
using namespace spinchain;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct CommonArgs {
  std::string config_path;
  std::string out_dir;  // overrides [run] output_dir when set
  int workers = -1;     // overrides [run] workers when >= 0
  bool resume = false;
};

RunConfig load_run_config(const CommonArgs& args) {
  RunConfig cfg = load_config(args.config_path);
  if (!args.out_dir.empty()) cfg.output_dir = args.out_dir;
  if (args.workers >= 0) cfg.workers = args.workers;
  return cfg;
}

bool use_ed_backend(const RunConfig& cfg, int n_sites) {
  return cfg.backend == Backend::ED ||
         (cfg.backend == Backend::Auto && n_sites <= 16);
}

GroundState solve_ground(const RunConfig& cfg, const ModelParams& params) {
  GroundState gs;
  gs.n_sites = params.n_sites;
  if (use_ed_backend(cfg, params.n_sites)) {
    auto basis = sector_basis(params.n_sites, 0.0);
    ExactGroundState ed =
        ground_state_lanczos(params, basis, 1e-12, 500, cfg.dmrg.seed);
    gs.energy = ed.energy;
    gs.converged = ed.converged;
    gs.repr = std::move(ed.state);
  } else {
    GroundStateResult res = run_dmrg(params, cfg.dmrg.to_config());
    gs.energy = res.energy;
    gs.converged = res.converged;
    gs.max_discarded_weight = res.max_discarded_weight;
    gs.repr = std::move(res.state);
  }
  return gs;
}

ScanConfig make_scan_config(const RunConfig& cfg, int n_sites) {
  if (!cfg.scan) throw ConfigError("config has no [scan] section");
  ScanConfig sc;
  sc.model = cfg.model;
  sc.model.n_sites = n_sites;
  sc.delta_f_grid = cfg.scan->grid();
  sc.delta_step = cfg.scan->delta_step;
  sc.observable = cfg.scan->observable;
  sc.backend = cfg.backend;
  sc.dmrg = cfg.dmrg.to_config();
  sc.refine = cfg.scan->refine;
  sc.refine_width = cfg.scan->refine_width;
  sc.refine_points = cfg.scan->refine_points;
  sc.allow_unaligned_entropy_cut = cfg.scan->allow_unaligned_entropy_cut;
  return sc;
}

std::vector<int> scan_sizes(const RunConfig& cfg) {
  if (cfg.scan && !cfg.scan->sizes.empty()) return cfg.scan->sizes;
  return {cfg.model.n_sites};
}

// ---------------------------------------------------------------- ground ---
int cmd_ground(const CommonArgs& args) {
  const RunConfig cfg = load_run_config(args);
  cfg.model.validate();
  const GroundState gs = solve_ground(cfg, cfg.model);
  fs::create_directories(cfg.output_dir);

  std::vector<std::pair<std::string, std::string>> kv = {
      {"n_sites", std::to_string(cfg.model.n_sites)},
      {"delta_f", format_full(cfg.model.delta_f)},
      {"backend", gs.is_exact() ? "ed" : "dmrg"},
      {"energy", format_full(gs.energy)},
      {"max_discarded_weight", format_full(gs.max_discarded_weight)},
      {"converged", gs.converged ? "true" : "false"},
  };
  const std::string record = summary_record(kv);
  std::cout << record << "\n";
  write_file_atomic(fs::path(cfg.output_dir) /
                        ("ground_N" + std::to_string(cfg.model.n_sites) + ".txt"),
                    record + "\n");
  if (cfg.checkpoint && !gs.is_exact())
    save_mps(fs::path(cfg.output_dir) /
                 ("ground_N" + std::to_string(cfg.model.n_sites) + ".mps"),
             std::get<MatrixProductState>(gs.repr));
  return gs.converged ? kExitOk : kExitRuntime;
}

// ------------------------------------------------------------------ scan ---
struct SizeScanOutcome {
  int n_sites = 0;
  bool ok = false;
  std::string error;
};

SizeScanOutcome run_size_scan(const RunConfig& cfg, int n, bool resume,
                              std::mutex& io_mutex) {
  SizeScanOutcome out;
  out.n_sites = n;
  const fs::path dir(cfg.output_dir);
  const std::string tag = "N" + std::to_string(n);
  const fs::path csv_path = dir / ("scan_" + tag + ".csv");
  const fs::path summary_path = dir / ("summary_" + tag + ".txt");
  const fs::path partial_path = dir / ("scan_" + tag + ".partial.csv");
  const fs::path ckpt_path = dir / ("scan_" + tag + ".ckpt.mps");

  try {
    ScanConfig sc = make_scan_config(cfg, n);
    sc.validate();

    std::vector<ScanSample> resume_samples;
    std::optional<MatrixProductState> resume_state;
    if (resume && fs::exists(partial_path)) {
      std::ifstream in(partial_path);
      std::string line;
      while (std::getline(in, line)) {
        if (line.empty() || line.rfind("n_sites", 0) == 0) continue;
        int row_n = 0;
        ScanSample s = parse_scan_csv_row(line, &row_n);
        if (row_n == n) resume_samples.push_back(s);
      }
      if (fs::exists(ckpt_path)) resume_state = load_mps(ckpt_path);
      log_info("scan " + tag + ": resuming with " +
               std::to_string(resume_samples.size()) + " checkpointed points");
    }

    std::ofstream partial;
    if (cfg.checkpoint) {
      const bool fresh = !resume || !fs::exists(partial_path);
      partial.open(partial_path, fresh ? std::ios::trunc : std::ios::app);
      if (fresh) partial << scan_csv_header() << "\n";
    }
    long done = 0;
    ScanProgress progress = [&](const ScanSample& s,
                                const MatrixProductState* chain) {
      ++done;
      if (cfg.checkpoint) {
        partial << scan_csv_row(n, s) << "\n";
        partial.flush();
        if (chain) save_mps(ckpt_path, *chain);
      }
      if (done % 5 == 0)
        log_info("scan " + tag + ": " + std::to_string(done) + " points done");
    };

    const ScanResult res = scan_delta_f(sc, progress, resume_samples, resume_state);

    std::ostringstream csv;
    csv << scan_csv_header() << "\n";
    for (const auto& s : res.samples) csv << scan_csv_row(n, s) << "\n";

    std::vector<std::pair<std::string, std::string>> kv = {
        {"n_sites", std::to_string(n)},
        {"samples", std::to_string(res.samples.size())},
    };
    if (res.susceptibility_peak) {
      kv.emplace_back("susceptibility_peak_location",
                      format_full(res.susceptibility_peak->location));
      kv.emplace_back("susceptibility_peak_value",
                      format_full(res.susceptibility_peak->value));
    }
    if (res.entropy_peak) {
      kv.emplace_back("entropy_peak_location",
                      format_full(res.entropy_peak->location));
      kv.emplace_back("entropy_peak_value", format_full(res.entropy_peak->value));
    }

    {
      std::lock_guard<std::mutex> lock(io_mutex);
      write_file_atomic(csv_path, csv.str());
      write_file_atomic(summary_path, summary_record(kv) + "\n");
      std::cout << summary_record(kv) << "\n";
    }
    std::error_code ec;
    fs::remove(partial_path, ec);
    fs::remove(ckpt_path, ec);
    out.ok = true;
  } catch (const std::exception& e) {
    out.error = e.what();
  }
  return out;
}

int cmd_scan(const CommonArgs& args) {
  const RunConfig cfg = load_run_config(args);
  const std::vector<int> sizes = scan_sizes(cfg);
  fs::create_directories(cfg.output_dir);

  int workers = cfg.workers > 0
                    ? cfg.workers
                    : static_cast<int>(std::thread::hardware_concurrency());
  if (workers < 1) workers = 1;
  workers = std::min<int>(workers, static_cast<int>(sizes.size()));

  std::mutex io_mutex;
  std::vector<SizeScanOutcome> outcomes(sizes.size());
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i = next.fetch_add(1); i < sizes.size(); i = next.fetch_add(1))
      outcomes[i] = run_size_scan(cfg, sizes[i], args.resume, io_mutex);
  };
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  bool all_ok = true;
  for (const auto& o : outcomes) {
    if (!o.ok) {
      all_ok = false;
      std::cerr << "scan N" << o.n_sites << " failed: " << o.error << "\n";
    }
  }
  return all_ok ? kExitOk : kExitRuntime;
}

// ------------------------------------------------------------------- fit ---
int cmd_fit(const CommonArgs& args, const std::vector<std::string>& files,
            bool use_entropy_peaks) {
  std::string out_dir = args.out_dir.empty() ? "out" : args.out_dir;
  if (!args.config_path.empty()) {
    const RunConfig cfg = load_run_config(args);
    out_dir = cfg.output_dir;
  }
  if (files.size() < 2) {
    std::cerr << "fit: need at least two peak summary files\n";
    return kExitUsage;
  }
  const std::string key = use_entropy_peaks ? "entropy_peak_location"
                                            : "susceptibility_peak_location";
  std::vector<std::pair<int, double>> peaks;
  for (const auto& f : files) {
    std::ifstream in(f);
    if (!in) {
      std::cerr << "fit: cannot read " << f << "\n";
      return kExitUsage;
    }
    std::string line;
    std::getline(in, line);
    int n = 0;
    double loc = std::numeric_limits<double>::quiet_NaN();
    for (const auto& [k, v] : parse_summary_record(line)) {
      if (k == "n_sites") n = std::stoi(v);
      if (k == key) loc = std::stod(v);
    }
    if (n <= 0 || !std::isfinite(loc)) {
      std::cerr << "fit: " << f << " has no n_sites/" << key << " record\n";
      return kExitUsage;
    }
    peaks.emplace_back(n, loc);
  }

  const ScalingFit fit = finite_size_fit(peaks);
  fs::create_directories(out_dir);
  const std::string record = summary_record({
      {"points", std::to_string(fit.points.size())},
      {"slope", format_full(fit.slope)},
      {"intercept", format_full(fit.intercept)},
      {"rms_residual", format_full(fit.rms_residual)},
  });
  std::cout << record << "\n";
  write_file_atomic(fs::path(out_dir) / "fit_summary.txt", record + "\n");
  std::ostringstream plot;
  plot << "# inverse_n delta_f_max\n";
  for (const auto& [x, y] : fit.points)
    plot << format_full(x) << " " << format_full(y) << "\n";
  write_file_atomic(fs::path(out_dir) / "fit_points.dat", plot.str());
  return kExitOk;
}

// ------------------------------------------------------- entropy-profile ---
int cmd_entropy_profile(const CommonArgs& args) {
  const RunConfig cfg = load_run_config(args);
  cfg.model.validate();
  const int n = cfg.model.n_sites;
  const GroundState gs = solve_ground(cfg, cfg.model);
  if (!gs.converged) {
    std::cerr << "entropy-profile: ground state did not converge\n";
    return kExitRuntime;
  }
  fs::create_directories(cfg.output_dir);
  std::ostringstream csv;
  csv << "n_sites,l_sites,entropy_bits\n";
  for (int l = 1; l < n; ++l) {
    const EntropyPoint p = entanglement_entropy(gs, l, cfg.model.delta_f);
    csv << n << "," << l << "," << format_full(p.entropy_bits) << "\n";
  }
  const fs::path path =
      fs::path(cfg.output_dir) / ("entropy_profile_N" + std::to_string(n) + ".csv");
  write_file_atomic(path, csv.str());
  std::cout << "wrote " << path.string() << "\n";
  return kExitOk;
}

// -------------------------------------------------------------- validate ---
int cmd_validate(const CommonArgs& args) {
  RunConfig cfg;
  if (!args.config_path.empty()) cfg = load_run_config(args);
  if (!args.out_dir.empty()) cfg.output_dir = args.out_dir;

  int failures = 0;
  auto report = [&](const std::string& name, bool ok, const std::string& detail) {
    std::cout << (ok ? "[PASS] " : "[FAIL] ") << name;
    if (!detail.empty()) std::cout << " (" << detail << ")";
    std::cout << "\n";
    if (!ok) ++failures;
  };

  for (int n : {8, 10, 12}) {
    for (double delta_f : {1.0, 2.32}) {
      ModelParams params = cfg.model;
      params.n_sites = n;
      params.delta_f = delta_f;
      auto basis = sector_basis(n, 0.0);
      ExactGroundState ed = ground_state_lanczos(params, basis);

      DmrgConfig dc = cfg.dmrg.to_config();
      dc.max_kept_m = 64;
      GroundStateResult dm = run_dmrg(params, dc);

      std::ostringstream tag;
      tag << "N=" << n << " delta_f=" << delta_f;
      const double de = dm.energy - ed.energy;
      report("energy ED vs DMRG " + tag.str(), std::abs(de) < 1e-8,
             "diff=" + format_full(de));
      report("variational bound " + tag.str(), dm.energy >= ed.energy - 1e-10, "");

      const int l = n / 2 - 1;
      GroundState ed_gs{n, ed.energy, 0.0, ed.converged, ed.state};
      GroundState dm_gs{n, dm.energy, dm.max_discarded_weight, dm.converged,
                        dm.state};
      const double se = entanglement_entropy(ed_gs, l).entropy_bits;
      const double sd = entanglement_entropy(dm_gs, l).entropy_bits;
      report("entropy ED vs DMRG " + tag.str(), std::abs(se - sd) < 1e-6,
             "diff=" + format_full(se - sd));
    }
  }
  std::cout << (failures == 0 ? "validate: all checks passed"
                              : "validate: " + std::to_string(failures) +
                                    " check(s) failed")
            << "\n";
  return failures == 0 ? kExitOk : kExitRuntime;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"alternating-chain spin-1/2 ground states, fidelity scans and "
               "finite-size fits"};
  app.require_subcommand(1);

  CommonArgs args;
  std::vector<std::string> fit_files;
  bool fit_entropy = false;

  auto add_common = [&](CLI::App* sub, bool config_required) {
    auto* c = sub->add_option("--config", args.config_path, "config file path");
    if (config_required) c->required();
    sub->add_option("--out", args.out_dir, "output directory (overrides config)");
    sub->add_option("--workers", args.workers, "worker pool size (0 = cores)");
    sub->add_flag("--resume", args.resume, "resume from checkpointed progress");
  };

  auto* ground = app.add_subcommand("ground", "compute one ground state");
  add_common(ground, true);
  auto* scan = app.add_subcommand("scan", "delta_F scan over configured sizes");
  add_common(scan, true);
  auto* fit = app.add_subcommand("fit", "finite-size fit of peak locations");
  add_common(fit, false);
  fit->add_option("files", fit_files, "peak summary files (from scan)");
  fit->add_flag("--entropy", fit_entropy, "fit entropy peaks instead of "
                                          "susceptibility peaks");
  auto* profile =
      app.add_subcommand("entropy-profile", "entropy vs cut at fixed delta_F");
  add_common(profile, true);
  auto* validate = app.add_subcommand("validate", "ED-vs-DMRG oracle suite");
  add_common(validate, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (ground->parsed()) return cmd_ground(args);
    if (scan->parsed()) return cmd_scan(args);
    if (fit->parsed()) return cmd_fit(args, fit_files, fit_entropy);
    if (profile->parsed()) return cmd_entropy_profile(args);
    if (validate->parsed()) return cmd_validate(args);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}
