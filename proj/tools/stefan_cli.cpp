/// @file stefan_cli.cpp
/// Command-line driver: run, spectrum, verify, sweep.
///
/// Exit codes: 0 success, 1 solver failure or failed verification,
/// 2 configuration or usage error.

#include <CLI11.hpp>
#include <omp.h>

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "stefan/config.hpp"
#include "stefan/errors.hpp"
#include "stefan/io.hpp"
#include "stefan/log.hpp"
#include "stefan/oracle.hpp"
#include "stefan/solver.hpp"
#include "stefan/studies.hpp"

namespace fs = std::filesystem;
using namespace stefan;

namespace {

struct Globals {
  std::string config;
  std::string out;
  std::uint64_t seed = 0;
  int jobs = 1;
  bool quiet = false;
};

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

fs::path output_dir(const Globals& g, const fs::path& fallback) {
  fs::path p = g.out.empty() ? fallback : fs::path(g.out);
  if (const char* root = std::getenv("STEFAN_OUTPUT_ROOT"); root && *root && p.is_relative()) {
    p = fs::path(root) / p;
  }
  return p;
}

void write_meta(const fs::path& dir, const std::string& verb, const Globals& g, const std::string& hash,
                const std::string& started) {
  std::ofstream os(dir / "meta.txt");
  os << "command=" << verb << '\n'
     << "config=" << g.config << '\n'
     << "config_hash=" << hash << '\n'
     << "seed=" << g.seed << '\n'
     << "jobs=" << g.jobs << '\n'
     << "started=" << started << '\n'
     << "finished=" << utc_now() << '\n';
}

Scenario load(const Globals& g) {
  if (g.config.empty()) throw ConfigError("--config is required");
  return load_scenario(g.config);
}

std::ostream& out(const Globals& g) {
  static std::ostringstream sink;
  if (g.quiet) {
    sink.str({});
    return sink;
  }
  return std::cout;
}

// ---------------------------------------------------------------- run

struct RunOutcome {
  RunResult result;
  double max_state_change = 0.0;
};

RunOutcome execute(const Scenario& sc, const SolverConfig& cfg, std::uint64_t seed, const fs::path& dir,
                   const std::string& hash) {
  Scenario s2 = sc;
  s2.solver = cfg;
  const State init = initial_state(s2, seed);
  RunOutcome o;
  RunOptions opt;
  opt.t_end = sc.t_end;
  opt.diagnostics = sc.diagnostics;
  opt.identity = sc.identity && sc.diagnostics;
  opt.sample_every = sc.sample_every;
  int step = 0;
  opt.on_step = [&](const EnergyReport&, const State& st) {
    double d = 0.0;
    for (int i = 0; i < st.rho.size(); ++i) d = std::max(d, std::abs(st.rho[i] - init.rho[i]));
    o.max_state_change = std::max(o.max_state_change, (st.u - init.u).max_abs() + d);
    if (sc.checkpoint_every > 0 && step > 0 && step % sc.checkpoint_every == 0) {
      char name[32];
      std::snprintf(name, sizeof name, "checkpoint_%06d", step);
      io::write_checkpoint(dir / name, st, cfg.epsilon, hash);
    }
    ++step;
  };
  o.result = run(init, cfg, opt);

  std::ofstream ts(dir / "time_series.csv");
  io::write_time_series(ts, o.result.reports, hash);
  const io::Meta m{{"t", io::fmt(o.result.final_state.t)},
                   {"epsilon", io::fmt(cfg.epsilon)},
                   {"n_x", std::to_string(cfg.n_x)},
                   {"n_z", std::to_string(cfg.n_z)},
                   {"config_hash", hash}};
  io::write_snapshot(dir / "final_u.csv", o.result.final_state.u, m);
  io::write_snapshot(dir / "final_rho.csv", o.result.final_state.rho, m);
  io::write_checkpoint(dir / "checkpoint", o.result.final_state, cfg.epsilon, hash);
  for (std::size_t i = 0; i < o.result.samples.size(); ++i) {
    const auto& smp = o.result.samples[i];
    io::Meta sm = m;
    sm["t"] = io::fmt(smp.t);
    char name[48];
    std::snprintf(name, sizeof name, "samples/u_%05zu.csv", i);
    fs::create_directories(dir / "samples");
    io::write_snapshot(dir / name, smp.u, sm);
    std::snprintf(name, sizeof name, "samples/rho_%05zu.csv", i);
    io::write_snapshot(dir / name, smp.rho, sm);
  }
  return o;
}

// Single wavenumber with zero mean, or 0.
int single_mode(const Scenario& sc) {
  if (sc.initial != InitialKind::modes || sc.rho_mean != 0.0 || sc.u_init != TemperatureInit::compatible ||
      sc.u_bump != 0.0 || sc.rho_sin.size() + sc.rho_cos.size() != 1) {
    return 0;
  }
  return sc.rho_sin.empty() ? sc.rho_cos[0].first : sc.rho_sin[0].first;
}

std::string summarize(const Scenario& sc, const SolverConfig& cfg, const RunOutcome& o) {
  std::ostringstream os;
  const auto& rep = o.result.reports;
  os << "scenario: " << sc.name << '\n' << "steps: " << o.result.steps << '\n';
  os << "max conservation residual: " << o.result.max_cons_residual << '\n';
  os << "max trace error: " << o.result.max_trace_error << '\n';
  os << "max inner iterations: " << o.result.max_inner_iters << '\n';
  os << "max contraction ratio: " << o.result.max_contraction << '\n';
  if (o.max_state_change <= 10.0 * cfg.fp_tol) {
    os << "verdict: steady within tolerance (max change " << o.max_state_change << ")\n";
  }
  if (!sc.diagnostics) return os.str();
  bool mono = true;
  for (std::size_t j = 1; j + 1 < rep.size(); ++j) {
    if (rep[j + 1].E > rep[j].E * (1.0 + studies::limits::monotone_tol)) mono = false;
  }
  os << "monotonicity: " << (mono ? "E non-increasing after the first step" : "E increases somewhere") << '\n';
  std::vector<double> t, y;
  for (const auto& q : rep) {
    t.push_back(q.t);
    y.push_back(q.E + q.rho_dev_l2 * q.rho_dev_l2);
  }
  const DecayFit fit = decay_fit(t, y);
  if (fit.status == FitStatus::ok) {
    os << "fitted K2: " << fit.rate << " (R^2 " << fit.r_squared << ", " << fit.samples << " samples)\n";
    if (const int k = single_mode(sc); k > 0) {
      const double lam = oracle::linearized_spectrum(k, 512, cfg.epsilon).eigenvalues.front().real();
      const double rel = std::abs(fit.rate - 2.0 * std::abs(lam)) / (2.0 * std::abs(lam));
      os << "oracle 2|Re lambda_1(k=" << k << ")|: " << 2.0 * std::abs(lam) << ", relative difference " << rel
         << (rel <= studies::limits::decay_rel ? " (within 10%)" : " (outside 10%)") << '\n';
    }
  } else {
    os << "fitted K2: degenerate (no decay to fit)\n";
  }
  return os.str();
}

int cmd_run(const Globals& g) {
  const std::string started = utc_now();
  const Scenario sc = load(g);
  const std::string hash = io::config_hash(sc.source);
  io::StagedDirectory stage(output_dir(g, sc.out_dir));
  const RunOutcome o = execute(sc, sc.solver, g.seed, stage.path(), hash);
  const std::string summary = summarize(sc, sc.solver, o);
  std::ofstream(stage.path() / "summary.txt") << summary;
  write_meta(stage.path(), "run", g, hash, started);
  stage.commit();
  out(g) << summary << "output: " << stage.target().string() << '\n';
  return 0;
}

// ---------------------------------------------------------------- spectrum

int cmd_spectrum(const Globals& g, SpectrumSpec spec, bool k_min_set, bool k_max_set,
                 std::vector<double> eps_cli, int n_z_dense_cli) {
  const std::string started = utc_now();
  std::string hash = "none";
  fs::path fallback = "spectrum";
  if (!g.config.empty()) {
    const Scenario sc = load(g);
    hash = io::config_hash(sc.source);
    const SpectrumSpec from = sc.spectrum;
    if (!k_min_set) spec.k_min = from.k_min;
    if (!k_max_set) spec.k_max = from.k_max;
    if (eps_cli.empty()) spec.epsilon = from.epsilon;
    if (n_z_dense_cli == 0) spec.n_z_dense = from.n_z_dense;
    spec.n_eigs = from.n_eigs;
    fallback = sc.out_dir;
  }
  if (!eps_cli.empty()) spec.epsilon = eps_cli;
  if (n_z_dense_cli != 0) spec.n_z_dense = n_z_dense_cli;
  if (spec.k_max < spec.k_min || spec.k_min < 0) throw ConfigError("empty wavenumber range");
  if (spec.epsilon.empty()) throw ConfigError("empty epsilon list");
  if (spec.n_eigs < 1) throw ConfigError("n_eigs must be >= 1");

  io::StagedDirectory stage(output_dir(g, fallback));
  std::ofstream os(stage.path() / "spectrum.csv");
  os << "k,eps";
  for (int i = 1; i <= spec.n_eigs; ++i) os << ",re_lambda" << i << ",im_lambda" << i;
  os << '\n';
  for (int k = spec.k_min; k <= spec.k_max; ++k) {
    for (double e : spec.epsilon) {
      const auto mode = oracle::linearized_spectrum(k, spec.n_z_dense, e);
      os << k << ',' << io::fmt(e);
      for (int i = 0; i < spec.n_eigs; ++i) {
        os << ',' << io::fmt(mode.eigenvalues[i].real()) << ',' << io::fmt(mode.eigenvalues[i].imag());
      }
      os << '\n';
      out(g) << "k=" << k << " eps=" << e << " lambda_1=" << mode.eigenvalues[0].real() << '\n';
    }
  }
  os.close();
  write_meta(stage.path(), "spectrum", g, hash, started);
  stage.commit();
  return 0;
}

// ---------------------------------------------------------------- verify

int cmd_verify(const Globals& g, const std::string& suite) {
  auto& os = out(g);
  bool pass = false;
  if (suite == "identity") {
    const auto r = studies::identity();
    for (const auto& l : r.levels) {
      os << "dt=" << l.dt << " n_x=" << l.n_x << " n_z=" << l.n_z << " residual=" << l.value << '\n';
    }
    os << "reduction factor: " << r.ratio << " (order " << std::log2(r.ratio) << ")\n";
    pass = r.pass();
  } else if (suite == "mms") {
    const auto r = studies::mms();
    for (const auto& l : r.time_levels) os << "time: dt=" << l.dt << " n_z=" << l.n_z << " error=" << l.value << '\n';
    for (const auto& l : r.z_levels) os << "z:    dt=" << l.dt << " n_z=" << l.n_z << " error=" << l.value << '\n';
    os << "observed order in time: " << r.time_order << ", in z: " << r.z_order << '\n';
    pass = r.pass();
  } else if (suite == "conservation") {
    const auto ref = studies::conservation();
    const auto shifted = studies::conservation(0.5, 0.01);
    for (const auto& l : ref.levels) {
      os << "reference: dt=" << l.dt << " n_z=" << l.n_z << " max residual=" << l.value << '\n';
    }
    for (const auto& l : shifted.levels) {
      os << "asymmetric u0: dt=" << l.dt << " n_z=" << l.n_z << " max residual=" << l.value << '\n';
    }
    os << "reference reduction factor: " << ref.ratio << " (roundoff level: the scheme preserves z-symmetry)\n";
    os << "asymmetric reduction factor: " << shifted.ratio << " (order " << shifted.order << ")\n";
    pass = ref.levels[0].value <= studies::limits::cons_residual && shifted.order >= 1.0;
  } else if (suite == "norms") {
    const auto r = studies::norm_equivalence();
    os << "cases: " << r.cases << ", min ratio*C: " << r.worst_low << ", max ratio/C: " << r.worst_high
       << ", max C: " << r.max_C << '\n';
    pass = r.pass();
  } else {
    throw ConfigError("unknown suite '" + suite + "' (identity|mms|conservation|norms)");
  }
  os << (pass ? "PASS" : "FAIL") << '\n';
  return pass ? 0 : 1;
}

// ---------------------------------------------------------------- sweep

struct Job {
  SolverConfig cfg;
  std::string name;
};

int cmd_sweep(const Globals& g) {
  const std::string started = utc_now();
  const Scenario sc = load(g);
  if (g.jobs < 1) throw ConfigError("--jobs must be >= 1");
  const std::string hash = io::config_hash(sc.source);
  auto axis = [](const std::vector<double>& v, double d) { return v.empty() ? std::vector<double>{d} : v; };
  auto axis_i = [](const std::vector<int>& v, int d) { return v.empty() ? std::vector<int>{d} : v; };
  std::vector<Job> jobs;
  for (double e : axis(sc.sweep.epsilon, sc.solver.epsilon)) {
    for (double dt : axis(sc.sweep.dt, sc.solver.dt)) {
      for (int nx : axis_i(sc.sweep.n_x, sc.solver.n_x)) {
        for (int nz : axis_i(sc.sweep.n_z, sc.solver.n_z)) {
          SolverConfig c = sc.solver;
          c.epsilon = e;
          c.dt = dt;
          c.n_x = nx;
          c.n_z = nz;
          c.validate();
          char name[32];
          std::snprintf(name, sizeof name, "job_%03zu", jobs.size());
          jobs.push_back({c, name});
        }
      }
    }
  }
  if (jobs.size() > static_cast<std::size_t>(sc.sweep.job_cap)) throw ConfigError("sweep exceeds job_cap");

  Scenario base = sc;
  if (base.sample_every == 0) base.sample_every = 10;
  io::StagedDirectory stage(output_dir(g, sc.out_dir));
  std::vector<RunOutcome> results(jobs.size());
  std::vector<std::string> errors(jobs.size());
  std::atomic<std::size_t> next{0};
  const int workers = std::min<int>(g.jobs, static_cast<int>(jobs.size()));
  auto worker = [&]() {
    if (workers > 1) omp_set_num_threads(1);
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        const fs::path dir = stage.path() / jobs[i].name;
        fs::create_directories(dir);
        results[i] = execute(base, jobs[i].cfg, g.seed, dir, hash);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    if (!errors[i].empty()) {
      std::cerr << "stefan: " << jobs[i].name << " failed: " << errors[i] << '\n';
      return 1;
    }
  }

  std::ofstream comb(stage.path() / "sweep.csv");
  comb << "# config_hash=" << hash << '\n' << "job,epsilon,dt,n_x,n_z";
  for (const auto& c : io::time_series_columns) comb << ',' << c;
  comb << '\n';
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const auto& c = jobs[i].cfg;
    for (const auto& r : results[i].result.reports) {
      comb << jobs[i].name << ',' << io::fmt(c.epsilon) << ',' << io::fmt(c.dt) << ',' << c.n_x << ',' << c.n_z
           << ',';
      io::write_time_series_row(comb, r);
    }
  }
  comb.close();

  // Consecutive-epsilon distances within each (dt, n_x, n_z) group.
  std::map<std::tuple<double, int, int>, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    groups[{jobs[i].cfg.dt, jobs[i].cfg.n_x, jobs[i].cfg.n_z}].push_back(i);
  }
  std::ofstream conv(stage.path() / "eps_convergence.csv");
  conv << "dt,n_x,n_z,eps_a,eps_b,distance\n";
  for (auto& [key, idx] : groups) {
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return jobs[a].cfg.epsilon > jobs[b].cfg.epsilon; });
    for (std::size_t q = 0; q + 1 < idx.size(); ++q) {
      const auto& a = results[idx[q]].result.samples;
      const auto& b = results[idx[q + 1]].result.samples;
      const double d = studies::epsilon_distance(a, b, jobs[idx[q]].cfg.cutoff());
      conv << io::fmt(std::get<0>(key)) << ',' << std::get<1>(key) << ',' << std::get<2>(key) << ','
           << io::fmt(jobs[idx[q]].cfg.epsilon) << ',' << io::fmt(jobs[idx[q + 1]].cfg.epsilon) << ','
           << io::fmt(d) << '\n';
      out(g) << "eps " << jobs[idx[q]].cfg.epsilon << " -> " << jobs[idx[q + 1]].cfg.epsilon
             << ": relative E-distance " << d << '\n';
    }
  }
  conv.close();
  write_meta(stage.path(), "sweep", g, hash, started);
  stage.commit();
  out(g) << jobs.size() << " jobs, output: " << stage.target().string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stefan problem with surface tension on T x [-1, 1]"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config, "scenario file (INI)");
  app.add_option("--out", g.out, "output directory");
  app.add_option("--seed", g.seed, "seed for random initial data");
  app.add_option("--jobs", g.jobs, "parallel sweep jobs");
  app.add_flag("--quiet", g.quiet, "suppress progress output and warnings");

  auto* run = app.add_subcommand("run", "run one scenario");
  auto* spectrum = app.add_subcommand("spectrum", "linearized spectrum of the flat state");
  SpectrumSpec spec;
  std::vector<double> eps_cli;
  int n_z_dense = 0;
  auto* kmin = spectrum->add_option("--k-min", spec.k_min, "smallest wavenumber");
  auto* kmax = spectrum->add_option("--k-max", spec.k_max, "largest wavenumber");
  spectrum->add_option("--eps", eps_cli, "regularization values")->delimiter(',');
  spectrum->add_option("--n-z-dense", n_z_dense, "cells of the dense discretization");
  spectrum->add_option("--n-eigs", spec.n_eigs, "eigenvalues per row");
  auto* verify = app.add_subcommand("verify", "refinement and property studies");
  std::string suite;
  verify->add_option("suite", suite, "identity | mms | conservation | norms")->required();
  auto* sweep = app.add_subcommand("sweep", "cartesian parameter sweep");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  log::set_quiet(g.quiet);
  try {
    if (*run) return cmd_run(g);
    if (*spectrum) return cmd_spectrum(g, spec, kmin->count() > 0, kmax->count() > 0, eps_cli, n_z_dense);
    if (*verify) return cmd_verify(g, suite);
    if (*sweep) return cmd_sweep(g);
  } catch (const ConfigError& e) {
    std::cerr << "stefan: configuration error: " << e.what() << '\n';
    return 2;
  } catch (const InvalidField& e) {
    std::cerr << "stefan: invalid input: " << e.what() << '\n';
    return 2;
  } catch (const StepFailure& e) {
    std::cerr << "stefan: solver failure at step " << e.step() << " (t=" << e.t() << "): " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "stefan: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
