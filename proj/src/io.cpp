#include "spinchain/io.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace spinchain {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("bad numeric value for '" + key + "': " + v);
  }
}

long parse_int(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const long d = std::stol(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("bad integer value for '" + key + "': " + v);
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  const std::string s = lower(v);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ConfigError("bad boolean value for '" + key + "': " + v);
}

std::uint64_t fnv1a64(const unsigned char* data, size_t len, std::uint64_t h = 0xcbf29ce484222325ull) {
  for (size_t i = 0; i < len; ++i) {
    h ^= data[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

const char* observable_name(ScanObservable o) {
  switch (o) {
    case ScanObservable::FidelitySusceptibility: return "susceptibility";
    case ScanObservable::Entropy: return "entropy";
    default: return "both";
  }
}

const char* backend_name(Backend b) {
  switch (b) {
    case Backend::ED: return "ed";
    case Backend::DMRG: return "dmrg";
    default: return "auto";
  }
}

}  // namespace

std::vector<double> ScanSettings::grid() const {
  std::vector<double> g;
  const int count = static_cast<int>(std::round((grid_max - grid_min) / grid_step)) + 1;
  for (int i = 0; i < count; ++i) g.push_back(grid_min + i * grid_step);
  return g;
}

DmrgConfig DmrgSettings::to_config() const {
  DmrgConfig cfg;
  cfg.max_kept_m = max_kept_m;
  cfg.n_sweeps_max = n_sweeps_max;
  cfg.energy_tol = energy_tol;
  cfg.local_solver_tol = local_solver_tol;
  cfg.seed = seed;
  return cfg;
}

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::string section;
  std::istringstream in(text);
  std::string line;
  bool saw_scan = false;
  ScanSettings scan;

  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("line " + std::to_string(lineno) + ": malformed section header");
      section = lower(trim(line.substr(1, line.size() - 2)));
      if (section != "model" && section != "run" && section != "dmrg" && section != "scan")
        throw ConfigError("unknown section [" + section + "]");
      if (section == "scan") saw_scan = true;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = lower(trim(line.substr(0, eq)));
    const std::string val = trim(line.substr(eq + 1));

    try {
    if (section == "model") {
      if (key == "n_sites") cfg.model.n_sites = static_cast<int>(parse_int(key, val));
      else if (key == "j_af") cfg.model.j_af = parse_double(key, val);
      else if (key == "j_f") cfg.model.j_f = parse_double(key, val);
      else if (key == "delta_af") cfg.model.delta_af = parse_double(key, val);
      else if (key == "delta_f") cfg.model.delta_f = parse_double(key, val);
      else if (key == "boundary") {
        if (lower(val) != "open") throw ConfigError("only open boundary is supported");
      } else throw ConfigError("unknown key '" + key + "' in [model]");
    } else if (section == "run") {
      if (key == "backend") {
        const std::string b = lower(val);
        if (b == "ed") cfg.backend = Backend::ED;
        else if (b == "dmrg") cfg.backend = Backend::DMRG;
        else if (b == "auto") cfg.backend = Backend::Auto;
        else throw ConfigError("unknown backend '" + val + "'");
      } else if (key == "output_dir") cfg.output_dir = val;
      else if (key == "checkpoint") cfg.checkpoint = parse_bool(key, val);
      else if (key == "workers") cfg.workers = static_cast<int>(parse_int(key, val));
      else throw ConfigError("unknown key '" + key + "' in [run]");
    } else if (section == "dmrg") {
      if (key == "max_kept_m") cfg.dmrg.max_kept_m = static_cast<int>(parse_int(key, val));
      else if (key == "n_sweeps_max") cfg.dmrg.n_sweeps_max = static_cast<int>(parse_int(key, val));
      else if (key == "energy_tol") cfg.dmrg.energy_tol = parse_double(key, val);
      else if (key == "local_solver_tol") cfg.dmrg.local_solver_tol = parse_double(key, val);
      else if (key == "seed") cfg.dmrg.seed = static_cast<unsigned long>(parse_int(key, val));
      else throw ConfigError("unknown key '" + key + "' in [dmrg]");
    } else if (section == "scan") {
      if (key == "sizes") {
        std::istringstream ss(val);
        int n;
        scan.sizes.clear();
        while (ss >> n) scan.sizes.push_back(n);
        if (scan.sizes.empty()) throw ConfigError("empty sizes list");
      } else if (key == "grid_min") scan.grid_min = parse_double(key, val);
      else if (key == "grid_max") scan.grid_max = parse_double(key, val);
      else if (key == "grid_step") scan.grid_step = parse_double(key, val);
      else if (key == "delta_step") scan.delta_step = parse_double(key, val);
      else if (key == "observable") {
        const std::string o = lower(val);
        if (o == "susceptibility") scan.observable = ScanObservable::FidelitySusceptibility;
        else if (o == "entropy") scan.observable = ScanObservable::Entropy;
        else if (o == "both") scan.observable = ScanObservable::Both;
        else throw ConfigError("unknown observable '" + val + "'");
      } else if (key == "refine") scan.refine = parse_bool(key, val);
      else if (key == "refine_width") scan.refine_width = parse_double(key, val);
      else if (key == "refine_points") scan.refine_points = static_cast<int>(parse_int(key, val));
      else if (key == "allow_unaligned_entropy_cut")
        scan.allow_unaligned_entropy_cut = parse_bool(key, val);
      else throw ConfigError("unknown key '" + key + "' in [scan]");
    } else {
      throw ConfigError("key outside any section");
    }
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (saw_scan) cfg.scan = scan;
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string serialize_config(const RunConfig& cfg) {
  std::ostringstream out;
  out << "[model]\n";
  out << "n_sites = " << cfg.model.n_sites << "\n";
  out << "j_af = " << format_full(cfg.model.j_af) << "\n";
  out << "j_f = " << format_full(cfg.model.j_f) << "\n";
  out << "delta_af = " << format_full(cfg.model.delta_af) << "\n";
  out << "delta_f = " << format_full(cfg.model.delta_f) << "\n";
  out << "boundary = open\n";
  out << "\n[run]\n";
  out << "backend = " << backend_name(cfg.backend) << "\n";
  out << "output_dir = " << cfg.output_dir << "\n";
  out << "checkpoint = " << (cfg.checkpoint ? "true" : "false") << "\n";
  out << "workers = " << cfg.workers << "\n";
  out << "\n[dmrg]\n";
  out << "max_kept_m = " << cfg.dmrg.max_kept_m << "\n";
  out << "n_sweeps_max = " << cfg.dmrg.n_sweeps_max << "\n";
  out << "energy_tol = " << format_full(cfg.dmrg.energy_tol) << "\n";
  out << "local_solver_tol = " << format_full(cfg.dmrg.local_solver_tol) << "\n";
  out << "seed = " << cfg.dmrg.seed << "\n";
  if (cfg.scan) {
    const ScanSettings& s = *cfg.scan;
    out << "\n[scan]\n";
    out << "sizes =";
    for (int n : s.sizes) out << " " << n;
    out << "\n";
    out << "grid_min = " << format_full(s.grid_min) << "\n";
    out << "grid_max = " << format_full(s.grid_max) << "\n";
    out << "grid_step = " << format_full(s.grid_step) << "\n";
    out << "delta_step = " << format_full(s.delta_step) << "\n";
    out << "observable = " << observable_name(s.observable) << "\n";
    out << "refine = " << (s.refine ? "true" : "false") << "\n";
    out << "refine_width = " << format_full(s.refine_width) << "\n";
    out << "refine_points = " << s.refine_points << "\n";
    out << "allow_unaligned_entropy_cut = "
        << (s.allow_unaligned_entropy_cut ? "true" : "false") << "\n";
  }
  return out.str();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

void save_mps(const std::filesystem::path& path, const MatrixProductState& state) {
  std::string payload;
  auto put_u32 = [&](std::uint32_t v) {
    for (int i = 0; i < 4; ++i) payload.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  };
  for (const SiteTensor& t : state.sites) {
    put_u32(static_cast<std::uint32_t>(t.left));
    put_u32(static_cast<std::uint32_t>(t.right));
    for (long k = 0; k < t.data.size(); ++k) {
      std::uint64_t bits;
      const double d = t.data[k];
      std::memcpy(&bits, &d, 8);
      for (int i = 0; i < 8; ++i) payload.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
    }
  }

  std::string out = "MPS1";
  out.push_back(1);  // version
  const std::uint32_t n = static_cast<std::uint32_t>(state.n_sites());
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((n >> (8 * i)) & 0xff));
  out += payload;
  const std::uint64_t sum =
      fnv1a64(reinterpret_cast<const unsigned char*>(payload.data()), payload.size());
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((sum >> (8 * i)) & 0xff));
  write_file_atomic(path, out);
}

MatrixProductState load_mps(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path.string());
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  size_t pos = 0;
  auto need = [&](size_t k) {
    if (pos + k > data.size()) throw std::runtime_error("truncated checkpoint: " + path.string());
  };
  need(9);
  if (data.compare(0, 4, "MPS1") != 0)
    throw std::runtime_error("bad checkpoint magic in " + path.string());
  if (data[4] != 1) throw std::runtime_error("unsupported checkpoint version");
  pos = 5;
  auto get_u32 = [&]() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
      v |= static_cast<std::uint32_t>(static_cast<unsigned char>(data[pos++])) << (8 * i);
    return v;
  };
  const std::uint32_t n = get_u32();
  const size_t payload_start = pos;

  MatrixProductState mps;
  for (std::uint32_t site = 0; site < n; ++site) {
    const std::uint32_t l = get_u32();
    const std::uint32_t r = get_u32();
    SiteTensor t(static_cast<int>(l), static_cast<int>(r));
    need(8 * t.data.size());
    for (long k = 0; k < t.data.size(); ++k) {
      std::uint64_t bits = 0;
      for (int i = 0; i < 8; ++i)
        bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(data[pos++])) << (8 * i);
      double d;
      std::memcpy(&d, &bits, 8);
      t.data[k] = d;
    }
    mps.sites.push_back(std::move(t));
  }
  const size_t payload_len = pos - payload_start;
  need(8);
  std::uint64_t stored = 0;
  for (int i = 0; i < 8; ++i)
    stored |= static_cast<std::uint64_t>(static_cast<unsigned char>(data[pos++])) << (8 * i);
  const std::uint64_t computed = fnv1a64(
      reinterpret_cast<const unsigned char*>(data.data() + payload_start), payload_len);
  if (stored != computed)
    throw std::runtime_error("checkpoint checksum mismatch in " + path.string());
  return mps;
}

std::string format_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string scan_csv_header() {
  return "n_sites,delta_f,energy,fidelity,susceptibility,entropy_bits,"
         "max_discarded_weight,converged";
}

std::string scan_csv_row(int n_sites, const ScanSample& s) {
  std::ostringstream out;
  out << n_sites << ',' << format_full(s.delta_f) << ',' << format_full(s.energy)
      << ',' << format_full(s.fidelity) << ',' << format_full(s.susceptibility)
      << ',' << format_full(s.entropy_bits) << ','
      << format_full(s.max_discarded_weight) << ',' << (s.converged ? 1 : 0);
  return out.str();
}

ScanSample parse_scan_csv_row(const std::string& line, int* n_sites) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else cur.push_back(c);
  }
  fields.push_back(cur);
  if (fields.size() != 8) throw std::runtime_error("bad CSV row: " + line);
  ScanSample s;
  if (n_sites) *n_sites = static_cast<int>(std::stol(fields[0]));
  s.delta_f = std::stod(fields[1]);
  s.energy = std::stod(fields[2]);
  s.fidelity = std::stod(fields[3]);
  s.susceptibility = std::stod(fields[4]);
  s.entropy_bits = std::stod(fields[5]);
  s.max_discarded_weight = std::stod(fields[6]);
  s.converged = fields[7] == "1";
  return s;
}

std::string summary_record(const std::vector<std::pair<std::string, std::string>>& kv) {
  std::ostringstream out;
  bool first = true;
  for (const auto& [k, v] : kv) {
    if (!first) out << ' ';
    out << k << '=' << v;
    first = false;
  }
  return out.str();
}

std::vector<std::pair<std::string, std::string>> parse_summary_record(const std::string& line) {
  std::vector<std::pair<std::string, std::string>> kv;
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) throw std::runtime_error("bad summary token: " + tok);
    kv.emplace_back(tok.substr(0, eq), tok.substr(eq + 1));
  }
  return kv;
}

}  // namespace spinchain
