#ifndef SPINCHAIN_IO_HPP
#define SPINCHAIN_IO_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "spinchain/model.hpp"
#include "spinchain/mps.hpp"
#include "spinchain/scan.hpp"

namespace spinchain {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Scan settings as they appear in the config file; expanded per size into a
/// ScanConfig.
struct ScanSettings {
  std::vector<int> sizes;
  double grid_min = 1.6;
  double grid_max = 3.0;
  double grid_step = 0.05;
  double delta_step = 0.001;
  ScanObservable observable = ScanObservable::Both;
  bool refine = true;
  double refine_width = 0.2;
  int refine_points = 21;
  bool allow_unaligned_entropy_cut = false;

  std::vector<double> grid() const;
  bool operator==(const ScanSettings&) const = default;
};

struct DmrgSettings {
  int max_kept_m = 128;
  int n_sweeps_max = 20;
  double energy_tol = 1e-10;
  double local_solver_tol = 1e-11;
  unsigned long seed = 12345;

  DmrgConfig to_config() const;
  bool operator==(const DmrgSettings&) const = default;
};

struct RunConfig {
  ModelParams model;
  Backend backend = Backend::Auto;
  std::optional<ScanSettings> scan;
  DmrgSettings dmrg;
  std::string output_dir = "out";
  bool checkpoint = false;
  int workers = 0;  // 0 = hardware concurrency

  bool operator==(const RunConfig&) const = default;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);
std::string serialize_config(const RunConfig& config);

/// temp-file + rename; the target never holds a partial write
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

/// "MPS1" checkpoint format: magic, version byte, n_sites, per-site dims and
/// little-endian double payloads, then a 64-bit FNV-1a checksum of the payload.
void save_mps(const std::filesystem::path& path, const MatrixProductState& state);
MatrixProductState load_mps(const std::filesystem::path& path);

/// 17-significant-digit decimal rendering, bit-reproducible downstream
std::string format_full(double v);

std::string scan_csv_header();
std::string scan_csv_row(int n_sites, const ScanSample& sample);
/// Parses a data row previously produced by scan_csv_row.
ScanSample parse_scan_csv_row(const std::string& line, int* n_sites = nullptr);

/// single-line key=value record
std::string summary_record(const std::vector<std::pair<std::string, std::string>>& kv);
std::vector<std::pair<std::string, std::string>> parse_summary_record(const std::string& line);

}  // namespace spinchain

#endif
