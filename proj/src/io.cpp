#include "stefan/io.hpp"

#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "stefan/errors.hpp"

namespace stefan::io {

namespace fs = std::filesystem;

std::string config_hash(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

void write_meta(std::ostream& os, const Meta& meta) {
  os << '#';
  for (const auto& [k, v] : meta) os << ' ' << k << '=' << v;
  os << '\n';
}

Meta parse_meta(const std::string& line) {
  Meta m;
  std::istringstream is(line.substr(1));
  std::string tok;
  while (is >> tok) {
    auto eq = tok.find('=');
    if (eq == std::string::npos) continue;
    m[tok.substr(0, eq)] = tok.substr(eq + 1);
  }
  return m;
}

std::vector<double> parse_row(const std::string& line) {
  std::vector<double> v;
  std::size_t pos = 0;
  while (pos <= line.size()) {
    std::size_t end = line.find(',', pos);
    if (end == std::string::npos) end = line.size();
    const std::string cell = line.substr(pos, end - pos);
    char* stop = nullptr;
    const double x = std::strtod(cell.c_str(), &stop);
    if (cell.empty() || stop == cell.c_str()) throw InvalidField("malformed snapshot value '" + cell + "'");
    v.push_back(x);
    pos = end + 1;
  }
  return v;
}

std::vector<std::vector<double>> read_rows(std::istream& is, Meta* meta) {
  std::string line;
  std::vector<std::vector<double>> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (meta) *meta = parse_meta(line);
      continue;
    }
    rows.push_back(parse_row(line));
  }
  return rows;
}

void write_row(std::ostream& os, std::span<const double> v) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) os << ',';
    os << fmt(v[i]);
  }
  os << '\n';
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream os(p);
  if (!os) throw std::runtime_error("cannot write " + p.string());
  return os;
}

std::ifstream open_in(const fs::path& p) {
  std::ifstream is(p);
  if (!is) throw ConfigError("cannot read " + p.string());
  return is;
}

}  // namespace

void write_snapshot(std::ostream& os, const BulkField& u, const Meta& meta) {
  write_meta(os, meta);
  for (int j = 0; j < u.n_z(); ++j) write_row(os, u.row(j));
}

void write_snapshot(std::ostream& os, const InterfaceField& rho, const Meta& meta) {
  write_meta(os, meta);
  write_row(os, rho.values());
}

BulkField read_bulk(std::istream& is, Meta* meta) {
  auto rows = read_rows(is, meta);
  if (rows.empty()) throw InvalidField("empty bulk snapshot");
  const int nx = static_cast<int>(rows[0].size());
  BulkField u(nx, static_cast<int>(rows.size()));
  for (int j = 0; j < u.n_z(); ++j) {
    if (static_cast<int>(rows[j].size()) != nx) throw InvalidField("ragged bulk snapshot");
    for (int i = 0; i < nx; ++i) u(j, i) = rows[j][i];
  }
  return u;
}

InterfaceField read_interface(std::istream& is, Meta* meta) {
  auto rows = read_rows(is, meta);
  if (rows.size() != 1) throw InvalidField("interface snapshot must have exactly one row");
  return InterfaceField(rows[0]);
}

void write_snapshot(const fs::path& p, const BulkField& u, const Meta& meta) {
  auto os = open_out(p);
  write_snapshot(os, u, meta);
}
void write_snapshot(const fs::path& p, const InterfaceField& rho, const Meta& meta) {
  auto os = open_out(p);
  write_snapshot(os, rho, meta);
}
BulkField read_bulk(const fs::path& p, Meta* meta) {
  auto is = open_in(p);
  return read_bulk(is, meta);
}
InterfaceField read_interface(const fs::path& p, Meta* meta) {
  auto is = open_in(p);
  return read_interface(is, meta);
}

const std::vector<std::string> time_series_columns = {
    "t",         "E",         "D",          "E_eps",         "D_eps",
    "sobolev_E", "sobolev_D", "cons_residual", "rho_dev_L2", "identity_residual",
    "inner_iters", "unavailable"};

void write_time_series_header(std::ostream& os, const std::string& hash) {
  os << "# config_hash=" << hash << '\n';
  for (std::size_t i = 0; i < time_series_columns.size(); ++i) {
    if (i) os << ',';
    os << time_series_columns[i];
  }
  os << '\n';
}

void write_time_series_row(std::ostream& os, const EnergyReport& r) {
  os << fmt(r.t) << ',' << fmt(r.E) << ',' << fmt(r.D) << ',' << fmt(r.E_eps) << ',' << fmt(r.D_eps)
     << ',' << fmt(r.sobolev_E) << ',' << fmt(r.sobolev_D) << ',' << fmt(r.cons_residual) << ','
     << fmt(r.rho_dev_l2) << ',' << (r.identity_residual ? fmt(*r.identity_residual) : "") << ','
     << r.inner_iters << ',' << r.unavailable << '\n';
}

void write_time_series(std::ostream& os, const std::vector<EnergyReport>& reports,
                       const std::string& hash) {
  write_time_series_header(os, hash);
  for (const auto& r : reports) write_time_series_row(os, r);
}

void write_checkpoint(const fs::path& dir, const State& s, double epsilon, const std::string& hash) {
  fs::create_directories(dir);
  Meta m{{"t", fmt(s.t)},
         {"epsilon", fmt(epsilon)},
         {"n_x", std::to_string(s.u.n_x())},
         {"n_z", std::to_string(s.u.n_z())},
         {"config_hash", hash}};
  m["field"] = "u";
  write_snapshot(dir / "u.csv", s.u, m);
  m["field"] = "rho";
  write_snapshot(dir / "rho.csv", s.rho, m);
  m["field"] = "rho_prev";
  write_snapshot(dir / "rho_prev.csv", s.rho_prev, m);
  m["field"] = "rho_t";
  write_snapshot(dir / "rho_t.csv", s.rho_t, m);
}

State read_checkpoint(const fs::path& dir, Meta* meta) {
  Meta m;
  State s;
  s.u = read_bulk(dir / "u.csv", &m);
  s.rho = read_interface(dir / "rho.csv");
  s.rho_prev = read_interface(dir / "rho_prev.csv");
  s.rho_t = read_interface(dir / "rho_t.csv");
  if (!m.count("t")) throw ConfigError("checkpoint header lacks t");
  s.t = std::stod(m["t"]);
  if (s.rho.size() != s.u.n_x() || s.rho_prev.size() != s.u.n_x() || s.rho_t.size() != s.u.n_x()) {
    throw InvalidField("checkpoint fields have inconsistent sizes");
  }
  if (meta) *meta = m;
  return s;
}

// ---------------------------------------------------------------- staging

StagedDirectory::StagedDirectory(fs::path target) : target_(std::move(target)) {
  const fs::path parent = target_.has_parent_path() ? target_.parent_path() : fs::path(".");
  fs::create_directories(parent);
  std::random_device rd;
  for (int attempt = 0; attempt < 100; ++attempt) {
    char tag[17];
    std::snprintf(tag, sizeof tag, "%08x", rd());
    fs::path p = parent / ("." + target_.filename().string() + ".tmp-" + tag);
    if (fs::create_directory(p)) {
      tmp_ = p;
      return;
    }
  }
  throw std::runtime_error("cannot create staging directory next to " + target_.string());
}

StagedDirectory::~StagedDirectory() {
  if (!done_ && !tmp_.empty()) {
    std::error_code ec;
    fs::remove_all(tmp_, ec);
  }
}

void StagedDirectory::commit() {
  if (fs::exists(target_)) fs::remove_all(target_);
  fs::rename(tmp_, target_);
  done_ = true;
}

}  // namespace stefan::io
