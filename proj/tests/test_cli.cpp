#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "spinchain/exact.hpp"
#include "spinchain/io.hpp"
#include "spinchain/mps.hpp"

using namespace spinchain;
namespace fs = std::filesystem;

namespace {

#ifndef SPINCHAIN_CLI_PATH
#define SPINCHAIN_CLI_PATH "spinchain"
#endif

struct RunOutcome {
  int exit_code = -1;
  std::string output;
};

RunOutcome run_cli(const std::string& args, const fs::path& workdir) {
  const fs::path log = workdir / "cli_output.txt";
  const std::string cmd = "cd '" + workdir.string() + "' && '" SPINCHAIN_CLI_PATH
                          "' " + args + " > '" + log.string() + "' 2>&1";
  const int status = std::system(cmd.c_str());
  RunOutcome out;
  out.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(log);
  std::stringstream buf;
  buf << in.rdbuf();
  out.output = buf.str();
  return out;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("spinchain_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

RunConfig sample_config() {
  RunConfig cfg;
  cfg.model.n_sites = 8;
  cfg.model.delta_f = 2.25;
  cfg.backend = Backend::ED;
  cfg.output_dir = "out";
  cfg.dmrg.max_kept_m = 32;
  ScanSettings scan;
  scan.sizes = {8};
  scan.grid_min = 1.7;
  scan.grid_max = 2.2;
  scan.grid_step = 0.1;
  scan.observable = ScanObservable::FidelitySusceptibility;
  scan.refine = false;
  cfg.scan = scan;
  return cfg;
}

void write_config(const fs::path& path, const RunConfig& cfg) {
  std::ofstream out(path);
  out << serialize_config(cfg);
}

}  // namespace

TEST_CASE("config round-trips through serialize/parse") {
  RunConfig cfg = sample_config();
  cfg.workers = 3;
  cfg.checkpoint = true;
  cfg.scan->observable = ScanObservable::Both;
  cfg.scan->sizes = {12, 16, 20};
  CHECK(parse_config(serialize_config(cfg)) == cfg);

  RunConfig no_scan;
  no_scan.model.n_sites = 20;
  no_scan.backend = Backend::DMRG;
  CHECK(parse_config(serialize_config(no_scan)) == no_scan);
}

TEST_CASE("config parser reports errors with line numbers") {
  CHECK_THROWS_AS(parse_config("[model]\nn_sites = twelve\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[mystery]\nx = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[model]\nnope = 1\n"), ConfigError);
  try {
    parse_config("[model]\n\nn_sites = twelve\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("3") != std::string::npos);
  }
  // comments and blank lines are fine
  CHECK_NOTHROW(parse_config("# heading\n\n[model]\nn_sites = 8  # inline\n"));
}

TEST_CASE("ScanSettings::grid covers [grid_min, grid_max]") {
  ScanSettings s;
  s.grid_min = 1.6;
  s.grid_max = 3.0;
  s.grid_step = 0.05;
  const auto g = s.grid();
  REQUIRE(g.size() == 29);
  CHECK(g.front() == doctest::Approx(1.6));
  CHECK(g.back() == doctest::Approx(3.0));
}

TEST_CASE("MPS1 checkpoint round-trip preserves every tensor entry") {
  const fs::path dir = fresh_dir("mps_roundtrip");
  const MatrixProductState state = random_mps(10, 7, 42);
  const fs::path path = dir / "state.mps";
  save_mps(path, state);
  const MatrixProductState loaded = load_mps(path);
  REQUIRE(loaded.n_sites() == state.n_sites());
  for (int i = 1; i <= state.n_sites(); ++i) {
    const auto& a = state.site(i);
    const auto& b = loaded.site(i);
    REQUIRE(a.left == b.left);
    REQUIRE(a.right == b.right);
    for (long k = 0; k < a.data.size(); ++k) CHECK(a.data[k] == b.data[k]);
  }
  // the magic tag is literally at the front of the file
  CHECK(read_file(path).substr(0, 4) == "MPS1");
}

TEST_CASE("MPS1 loader rejects corruption") {
  const fs::path dir = fresh_dir("mps_corrupt");
  const MatrixProductState state = random_mps(6, 4, 7);
  const fs::path path = dir / "state.mps";
  save_mps(path, state);
  const std::string raw = read_file(path);

  SUBCASE("flipped payload byte fails the checksum") {
    std::string bad = raw;
    bad[bad.size() / 2] = static_cast<char>(bad[bad.size() / 2] ^ 0x40);
    const fs::path p = dir / "flipped.mps";
    std::ofstream(p, std::ios::binary) << bad;
    CHECK_THROWS(load_mps(p));
  }
  SUBCASE("truncated file") {
    const fs::path p = dir / "short.mps";
    std::ofstream(p, std::ios::binary) << raw.substr(0, raw.size() - 9);
    CHECK_THROWS(load_mps(p));
  }
  SUBCASE("wrong magic") {
    std::string bad = raw;
    bad[0] = 'X';
    const fs::path p = dir / "magic.mps";
    std::ofstream(p, std::ios::binary) << bad;
    CHECK_THROWS(load_mps(p));
  }
  SUBCASE("missing file") { CHECK_THROWS(load_mps(dir / "absent.mps")); }
}

TEST_CASE("write_file_atomic leaves no temp file behind") {
  const fs::path dir = fresh_dir("atomic");
  const fs::path target = dir / "nested" / "value.txt";
  write_file_atomic(target, "payload\n");
  CHECK(read_file(target) == "payload\n");
  int entries = 0;
  for (auto& e : fs::directory_iterator(target.parent_path())) {
    (void)e;
    ++entries;
  }
  CHECK(entries == 1);
}

TEST_CASE("format_full round-trips doubles exactly") {
  for (double v : {0.1, 2.32, -1.0 / 3.0, 1e-13, 123456.789012345678}) {
    CHECK(std::stod(format_full(v)) == v);
  }
}

TEST_CASE("scan CSV rows round-trip") {
  CHECK(scan_csv_header() ==
        "n_sites,delta_f,energy,fidelity,susceptibility,entropy_bits,"
        "max_discarded_weight,converged");
  ScanSample s;
  s.delta_f = 2.35;
  s.energy = -13.123456789012345;
  s.fidelity = 0.99999987654321;
  s.susceptibility = 0.0123456789;
  s.entropy_bits = 1.4426950408889634;
  s.max_discarded_weight = 3e-14;
  s.converged = true;
  const std::string row = scan_csv_row(38, s);
  int n = 0;
  const ScanSample back = parse_scan_csv_row(row, &n);
  CHECK(n == 38);
  CHECK(back.delta_f == s.delta_f);
  CHECK(back.energy == s.energy);
  CHECK(back.fidelity == s.fidelity);
  CHECK(back.susceptibility == s.susceptibility);
  CHECK(back.entropy_bits == s.entropy_bits);
  CHECK(back.max_discarded_weight == s.max_discarded_weight);
  CHECK(back.converged == s.converged);
}

TEST_CASE("summary records round-trip") {
  const auto kv = std::vector<std::pair<std::string, std::string>>{
      {"n_sites", "38"}, {"susceptibility_peak_location", "2.35"}};
  CHECK(parse_summary_record(summary_record(kv)) == kv);
}

TEST_CASE("cli: usage errors exit with code 2") {
  const fs::path dir = fresh_dir("cli_usage");
  CHECK(run_cli("", dir).exit_code == 2);
  CHECK(run_cli("frobnicate", dir).exit_code == 2);
  CHECK(run_cli("ground", dir).exit_code == 2);  // --config is required
  CHECK(run_cli("ground --config does_not_exist.conf", dir).exit_code == 2);

  std::ofstream(dir / "bad.conf") << "[model]\nn_sites = twelve\n";
  CHECK(run_cli("ground --config bad.conf", dir).exit_code == 2);
}

TEST_CASE("cli: ground computes the ED energy" * doctest::timeout(300)) {
  const fs::path dir = fresh_dir("cli_ground");
  write_config(dir / "run.conf", sample_config());
  const RunOutcome out = run_cli("ground --config run.conf", dir);
  CHECK(out.exit_code == 0);

  const auto kv = parse_summary_record(out.output.substr(0, out.output.find('\n')));
  double energy = 0.0;
  std::string backend;
  for (const auto& [k, v] : kv) {
    if (k == "energy") energy = std::stod(v);
    if (k == "backend") backend = v;
  }
  CHECK(backend == "ed");

  ModelParams params;
  params.n_sites = 8;
  params.delta_f = 2.25;
  const auto ed = ground_state_lanczos(params, sector_basis(8, 0.0));
  CHECK(energy == doctest::Approx(ed.energy).epsilon(1e-10));
  CHECK(fs::exists(dir / "out" / "ground_N8.txt"));
}

TEST_CASE("cli: scan writes a deterministic CSV" * doctest::timeout(600)) {
  const fs::path dir = fresh_dir("cli_scan");
  write_config(dir / "run.conf", sample_config());

  const RunOutcome first = run_cli("scan --config run.conf --out run1", dir);
  REQUIRE(first.exit_code == 0);
  const std::string csv1 = read_file(dir / "run1" / "scan_N8.csv");

  // header + 6 grid rows
  int lines = 0;
  for (char c : csv1)
    if (c == '\n') ++lines;
  CHECK(lines == 7);
  CHECK(csv1.rfind(scan_csv_header(), 0) == 0);
  CHECK(fs::exists(dir / "run1" / "summary_N8.txt"));

  const RunOutcome second = run_cli("scan --config run.conf --out run2", dir);
  REQUIRE(second.exit_code == 0);
  CHECK(read_file(dir / "run2" / "scan_N8.csv") == csv1);  // bit-identical
}

TEST_CASE("cli: scan --resume completes from a partial checkpoint" *
          doctest::timeout(600)) {
  const fs::path dir = fresh_dir("cli_resume");
  RunConfig cfg = sample_config();
  cfg.checkpoint = true;
  write_config(dir / "run.conf", cfg);

  const RunOutcome full = run_cli("scan --config run.conf --out full", dir);
  REQUIRE(full.exit_code == 0);
  const std::string full_csv = read_file(dir / "full" / "scan_N8.csv");
  // the partial checkpoint is cleaned up after success
  CHECK_FALSE(fs::exists(dir / "full" / "scan_N8.partial.csv"));

  // fake an interrupted run: header + the first three completed rows
  fs::create_directories(dir / "resumed");
  std::istringstream in(full_csv);
  std::string line, partial;
  for (int i = 0; i < 4 && std::getline(in, line); ++i) partial += line + "\n";
  std::ofstream(dir / "resumed" / "scan_N8.partial.csv") << partial;

  const RunOutcome resumed =
      run_cli("scan --config run.conf --out resumed --resume", dir);
  REQUIRE(resumed.exit_code == 0);
  const std::string resumed_csv = read_file(dir / "resumed" / "scan_N8.csv");

  // same grid, same peaks to high accuracy (ED chain warm starts differ
  // slightly after the seam, so compare values numerically)
  std::istringstream a(full_csv), b(resumed_csv);
  std::string la, lb;
  std::getline(a, la);
  std::getline(b, lb);
  CHECK(la == lb);
  while (std::getline(a, la) && std::getline(b, lb)) {
    int na = 0, nb = 0;
    const ScanSample sa = parse_scan_csv_row(la, &na);
    const ScanSample sb = parse_scan_csv_row(lb, &nb);
    CHECK(na == nb);
    CHECK(sa.delta_f == sb.delta_f);
    CHECK(sa.energy == doctest::Approx(sb.energy).epsilon(1e-10));
    CHECK(sa.susceptibility ==
          doctest::Approx(sb.susceptibility).epsilon(1e-6));
  }
}

TEST_CASE("cli: runtime failures exit with code 1" * doctest::timeout(300)) {
  // grid that cannot bracket the N=8 peak near 1.95 -> boundary error
  const fs::path dir = fresh_dir("cli_boundary");
  RunConfig cfg = sample_config();
  cfg.scan->grid_min = 2.5;
  cfg.scan->grid_max = 3.0;
  write_config(dir / "run.conf", cfg);
  const RunOutcome out = run_cli("scan --config run.conf", dir);
  CHECK(out.exit_code == 1);
}

TEST_CASE("cli: fit recovers a linear extrapolation" * doctest::timeout(300)) {
  const fs::path dir = fresh_dir("cli_fit");
  // synthetic peak summaries on an exact 2.3 + 1.8/N line
  std::vector<std::string> files;
  for (int n : {20, 40, 60, 80}) {
    const fs::path p = dir / ("summary_N" + std::to_string(n) + ".txt");
    std::ofstream(p) << summary_record(
                            {{"n_sites", std::to_string(n)},
                             {"susceptibility_peak_location",
                              format_full(2.3 + 1.8 / n)}})
                     << "\n";
    files.push_back(p.filename().string());
  }
  std::string args = "fit --out fitout";
  for (const auto& f : files) args += " " + f;
  const RunOutcome out = run_cli(args, dir);
  REQUIRE(out.exit_code == 0);

  const auto kv = parse_summary_record(out.output.substr(0, out.output.find('\n')));
  double intercept = 0.0, slope = 0.0;
  for (const auto& [k, v] : kv) {
    if (k == "intercept") intercept = std::stod(v);
    if (k == "slope") slope = std::stod(v);
  }
  CHECK(intercept == doctest::Approx(2.3).epsilon(1e-10));
  CHECK(slope == doctest::Approx(1.8).epsilon(1e-10));
  CHECK(fs::exists(dir / "fitout" / "fit_summary.txt"));
  CHECK(fs::exists(dir / "fitout" / "fit_points.dat"));

  // one file is not enough
  CHECK(run_cli("fit " + files[0], dir).exit_code == 2);
}

TEST_CASE("cli: entropy-profile writes one row per cut" *
          doctest::timeout(300)) {
  const fs::path dir = fresh_dir("cli_profile");
  RunConfig cfg = sample_config();
  cfg.scan.reset();
  write_config(dir / "run.conf", cfg);
  const RunOutcome out = run_cli("entropy-profile --config run.conf", dir);
  REQUIRE(out.exit_code == 0);
  const std::string csv = read_file(dir / "out" / "entropy_profile_N8.csv");
  int lines = 0;
  for (char c : csv)
    if (c == '\n') ++lines;
  CHECK(lines == 8);  // header + L = 1..7

  // entropy symmetry E(L) = E(N-L) straight off the emitted file
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  std::vector<double> e;
  while (std::getline(in, line)) {
    const auto last = line.rfind(',');
    e.push_back(std::stod(line.substr(last + 1)));
  }
  REQUIRE(e.size() == 7);
  for (int l = 1; l <= 3; ++l)
    CHECK(e[l - 1] == doctest::Approx(e[7 - l]).epsilon(1e-8));
}
