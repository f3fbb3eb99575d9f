#include "stefan/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "stefan/errors.hpp"
#include "stefan/io.hpp"

namespace stefan {

namespace pt = boost::property_tree;

std::size_t SweepAxes::size() const {
  auto n = [](std::size_t s) { return s == 0 ? std::size_t(1) : s; };
  return n(epsilon.size()) * n(dt.size()) * n(n_x.size()) * n(n_z.size());
}

namespace {

const std::map<std::string, std::set<std::string>> schema = {
    {"scenario",
     {"name", "t_end", "initial", "rho_mean", "rho_sin", "rho_cos", "random_amplitude", "u_init",
      "u_bump", "u_file", "rho_file", "resume"}},
    {"solver",
     {"epsilon", "dt", "n_x", "n_z", "fp_tol", "fp_max_iter", "lin_tol", "lin_max_iter", "alpha",
      "k_diag", "theta", "scheme", "dt_retries", "consistency_tol"}},
    {"output", {"dir", "sample_every", "identity", "diagnostics", "checkpoint_every"}},
    {"sweep", {"epsilon", "dt", "n_x", "n_z", "job_cap"}},
    {"spectrum", {"k_min", "k_max", "epsilon", "n_z_dense", "n_eigs"}},
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &used);
  } catch (const std::exception&) {
    throw ConfigError(key + ": not a number: '" + v + "'");
  }
  if (used != v.size() || !std::isfinite(x)) throw ConfigError(key + ": not a number: '" + v + "'");
  return x;
}

int to_int(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  long x = 0;
  try {
    x = std::stol(v, &used);
  } catch (const std::exception&) {
    throw ConfigError(key + ": not an integer: '" + v + "'");
  }
  if (used != v.size()) throw ConfigError(key + ": not an integer: '" + v + "'");
  return static_cast<int>(x);
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(key + ": expected true/false, got '" + v + "'");
}

std::vector<std::string> split(const std::string& v, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <class T, class F>
std::vector<T> to_list(const std::string& key, const std::string& v, F conv) {
  std::vector<T> out;
  for (const auto& s : split(v, ',')) out.push_back(conv(key, s));
  if (out.empty()) throw ConfigError(key + ": empty list");
  return out;
}

std::vector<std::pair<int, double>> to_modes(const std::string& key, const std::string& v) {
  std::vector<std::pair<int, double>> out;
  for (const auto& item : split(v, ',')) {
    auto parts = split(item, ':');
    if (parts.size() != 2) throw ConfigError(key + ": expected k:amplitude, got '" + item + "'");
    const int k = to_int(key, parts[0]);
    if (k < 0) throw ConfigError(key + ": wavenumber must be >= 0");
    out.emplace_back(k, to_double(key, parts[1]));
  }
  return out;
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
  pt::ptree tree;
  try {
    std::istringstream is(text);
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax: ") + e.what());
  }
  Scenario sc;
  sc.source = text;
  for (const auto& [section, body] : tree) {
    auto it = schema.find(section);
    if (it == schema.end()) {
      if (body.empty()) throw ConfigError("key '" + section + "' outside a section");
      throw ConfigError("unknown section [" + section + "]");
    }
    for (const auto& [key, node] : body) {
      if (!it->second.count(key)) throw ConfigError("unknown key '" + key + "' in [" + section + "]");
      const std::string name = section + "." + key;
      const std::string v = trim(node.get_value<std::string>());
      if (section == "scenario") {
        if (key == "name") sc.name = v;
        else if (key == "t_end") sc.t_end = to_double(name, v);
        else if (key == "initial") {
          if (v == "flat") sc.initial = InitialKind::flat;
          else if (v == "modes") sc.initial = InitialKind::modes;
          else if (v == "random") sc.initial = InitialKind::random;
          else if (v == "file") sc.initial = InitialKind::file;
          else throw ConfigError(name + ": expected flat|modes|random|file");
        } else if (key == "rho_mean") sc.rho_mean = to_double(name, v);
        else if (key == "rho_sin") sc.rho_sin = to_modes(name, v);
        else if (key == "rho_cos") sc.rho_cos = to_modes(name, v);
        else if (key == "random_amplitude") sc.random_amplitude = to_double(name, v);
        else if (key == "u_init") {
          if (v == "compatible") sc.u_init = TemperatureInit::compatible;
          else if (v == "zero") sc.u_init = TemperatureInit::zero;
          else if (v == "file") sc.u_init = TemperatureInit::file;
          else throw ConfigError(name + ": expected compatible|zero|file");
        } else if (key == "u_bump") sc.u_bump = to_double(name, v);
        else if (key == "u_file") sc.u_file = v;
        else if (key == "rho_file") sc.rho_file = v;
        else if (key == "resume") sc.resume = v;
      } else if (section == "solver") {
        SolverConfig& c = sc.solver;
        if (key == "epsilon") c.epsilon = to_double(name, v);
        else if (key == "dt") c.dt = to_double(name, v);
        else if (key == "n_x") c.n_x = to_int(name, v);
        else if (key == "n_z") c.n_z = to_int(name, v);
        else if (key == "fp_tol") c.fp_tol = to_double(name, v);
        else if (key == "fp_max_iter") c.fp_max_iter = to_int(name, v);
        else if (key == "lin_tol") c.lin_tol = to_double(name, v);
        else if (key == "lin_max_iter") c.lin_max_iter = to_int(name, v);
        else if (key == "alpha") c.alpha = to_double(name, v);
        else if (key == "k_diag") c.k_diag = to_int(name, v);
        else if (key == "theta") c.theta = to_double(name, v);
        else if (key == "scheme") {
          if (v == "coupled") c.scheme = IterationScheme::coupled;
          else if (v == "picard") c.scheme = IterationScheme::picard;
          else throw ConfigError(name + ": expected coupled|picard");
        } else if (key == "dt_retries") c.dt_retries = to_int(name, v);
        else if (key == "consistency_tol") c.consistency_tol = to_double(name, v);
      } else if (section == "output") {
        if (key == "dir") sc.out_dir = v;
        else if (key == "sample_every") sc.sample_every = to_int(name, v);
        else if (key == "identity") sc.identity = to_bool(name, v);
        else if (key == "diagnostics") sc.diagnostics = to_bool(name, v);
        else if (key == "checkpoint_every") sc.checkpoint_every = to_int(name, v);
      } else if (section == "sweep") {
        sc.sweep.present = true;
        if (key == "epsilon") sc.sweep.epsilon = to_list<double>(name, v, to_double);
        else if (key == "dt") sc.sweep.dt = to_list<double>(name, v, to_double);
        else if (key == "n_x") sc.sweep.n_x = to_list<int>(name, v, to_int);
        else if (key == "n_z") sc.sweep.n_z = to_list<int>(name, v, to_int);
        else if (key == "job_cap") sc.sweep.job_cap = to_int(name, v);
      } else if (section == "spectrum") {
        if (key == "k_min") sc.spectrum.k_min = to_int(name, v);
        else if (key == "k_max") sc.spectrum.k_max = to_int(name, v);
        else if (key == "epsilon") sc.spectrum.epsilon = to_list<double>(name, v, to_double);
        else if (key == "n_z_dense") sc.spectrum.n_z_dense = to_int(name, v);
        else if (key == "n_eigs") sc.spectrum.n_eigs = to_int(name, v);
      }
    }
  }

  sc.solver.validate();
  if (!(sc.t_end >= 0.0)) throw ConfigError("scenario.t_end must be >= 0");
  if (sc.sample_every < 0 || sc.checkpoint_every < 0) throw ConfigError("output intervals must be >= 0");
  if (sc.sweep.job_cap < 1) throw ConfigError("sweep.job_cap must be >= 1");
  if (sc.sweep.present && sc.sweep.size() > static_cast<std::size_t>(sc.sweep.job_cap)) {
    throw ConfigError("sweep has " + std::to_string(sc.sweep.size()) + " jobs, above job_cap " +
                      std::to_string(sc.sweep.job_cap));
  }
  for (double e : sc.sweep.epsilon) {
    if (e < 0.0) throw ConfigError("sweep.epsilon entries must be >= 0");
  }
  if (sc.initial == InitialKind::file && sc.rho_file.empty()) {
    throw ConfigError("scenario.initial = file needs rho_file");
  }
  if (sc.u_init == TemperatureInit::file && sc.u_file.empty()) {
    throw ConfigError("scenario.u_init = file needs u_file");
  }
  for (const auto& [k, a] : sc.rho_sin) {
    if (k == 0 || 3 * k >= sc.solver.n_x) throw ConfigError("rho_sin wavenumber out of the resolved band");
  }
  for (const auto& [k, a] : sc.rho_cos) {
    if (3 * k >= sc.solver.n_x) throw ConfigError("rho_cos wavenumber out of the resolved band");
  }
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config " + path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_scenario(ss.str());
}

InterfaceField random_band_limited(int n_x, double amplitude, std::mt19937_64& rng) {
  TangentialGrid g(n_x);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  std::vector<std::pair<double, double>> c;
  for (int k = 1; 3 * k < n_x; ++k) {
    const double s = 1.0 / (double(k) * k);
    const double ak = U(rng) * s;
    const double bk = U(rng) * s;
    c.emplace_back(ak, bk);
  }
  InterfaceField f = InterfaceField::sample(g, [&](double x) {
    double v = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
      const double k = double(i + 1);
      v += c[i].first * std::cos(k * x) + c[i].second * std::sin(k * x);
    }
    return v;
  });
  const double m = f.max_abs();
  if (m > 0.0) f *= amplitude / m;
  return f;
}

State initial_state(const Scenario& sc, std::uint64_t seed) {
  const SolverConfig& c = sc.solver;
  if (!sc.resume.empty()) {
    State s = io::read_checkpoint(sc.resume);
    if (s.u.n_x() != c.n_x || s.u.n_z() != c.n_z) throw ConfigError("checkpoint grid differs from [solver]");
    return s;
  }
  const Grid g = c.grid();
  InterfaceField rho;
  switch (sc.initial) {
    case InitialKind::flat:
      rho = InterfaceField(c.n_x, sc.rho_mean);
      break;
    case InitialKind::modes:
      rho = InterfaceField::sample(g.x, [&](double x) {
        double v = sc.rho_mean;
        for (auto [k, a] : sc.rho_sin) v += a * std::sin(k * x);
        for (auto [k, a] : sc.rho_cos) v += a * std::cos(k * x);
        return v;
      });
      break;
    case InitialKind::random: {
      std::mt19937_64 rng(seed);
      rho = random_band_limited(c.n_x, sc.random_amplitude, rng);
      for (int i = 0; i < rho.size(); ++i) rho[i] += sc.rho_mean;
      break;
    }
    case InitialKind::file:
      rho = io::read_interface(sc.rho_file);
      if (rho.size() != c.n_x) throw ConfigError("rho_file size differs from n_x");
      break;
  }
  BulkField u;
  switch (sc.u_init) {
    case TemperatureInit::compatible:
      u = compatible_temperature(rho, c.n_z);
      break;
    case TemperatureInit::zero:
      u = BulkField(c.n_x, c.n_z);
      break;
    case TemperatureInit::file:
      u = io::read_bulk(sc.u_file);
      if (u.n_x() != c.n_x || u.n_z() != c.n_z) throw ConfigError("u_file shape differs from the grid");
      break;
  }
  if (sc.u_bump != 0.0) {
    u += BulkField::sample(g, [&](double, double z) {
      const double a = std::abs(z);
      return sc.u_bump * (2.0 * a - z * z);
    });
  }
  return make_state(std::move(u), std::move(rho));
}

}  // namespace stefan
