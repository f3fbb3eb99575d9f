/// @file test_io_config.cpp
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "stefan/config.hpp"
#include "stefan/errors.hpp"
#include "stefan/io.hpp"

using namespace stefan;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("stefan_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("scenario parsing") {
  const Scenario sc = parse_scenario(R"(
[scenario]
name = demo
t_end = 0.5
initial = modes
rho_sin = 1:1e-3, 2:5e-4
rho_cos = 0:0.1
u_bump = 0.02

[solver]
epsilon = 1e-4
n_x = 32
n_z = 33
scheme = picard
theta = 0.5

[output]
sample_every = 10
identity = false

[sweep]
epsilon = 1e-2, 0
n_z = 33, 65
)");
  CHECK(sc.name == "demo");
  CHECK(sc.t_end == 0.5);
  CHECK(sc.rho_sin.size() == 2);
  CHECK(sc.rho_sin[1].first == 2);
  CHECK(sc.rho_sin[1].second == 5e-4);
  CHECK(sc.solver.epsilon == 1e-4);
  CHECK(sc.solver.scheme == IterationScheme::picard);
  CHECK(sc.solver.theta == 0.5);
  CHECK(sc.sample_every == 10);
  CHECK_FALSE(sc.identity);
  CHECK(sc.sweep.present);
  CHECK(sc.sweep.size() == 4);
  CHECK_FALSE(sc.source.empty());

  const State s = initial_state(sc, 1);
  CHECK(s.rho.mean() == doctest::Approx(0.1));
  CHECK(s.u.n_z() == 33);
}

TEST_CASE("malformed scenarios are configuration errors") {
  const char* bad[] = {
      "[scenario]\nbogus = 1\n",
      "[nonsense]\nx = 1\n",
      "[solver]\ndt = abc\n",
      "[solver]\nn_x = 3.5\n",
      "[solver]\nn_x = 33\n",
      "[solver]\ndt = -1\n",
      "[solver]\nscheme = newton\n",
      "[scenario]\ninitial = sphere\n",
      "[scenario]\nrho_sin = 1-0.1\n",
      "[scenario]\nrho_sin = 30:0.1\n",
      "[scenario]\ninitial = file\n",
      "[output]\nidentity = maybe\n",
      "[sweep]\nepsilon = 0,1,2,3\njob_cap = 3\n",
      "[sweep]\nepsilon = -1\n",
      "[scenario\nname = x\n",
  };
  for (const char* text : bad) {
    CAPTURE(text);
    CHECK_THROWS_AS(parse_scenario(text), ConfigError);
  }
  CHECK_THROWS_AS(load_scenario("/nonexistent/file.ini"), ConfigError);
}

TEST_CASE("random band-limited data") {
  std::mt19937_64 a(5), b(5), c(6);
  const auto f = random_band_limited(48, 0.3, a);
  const auto g = random_band_limited(48, 0.3, b);
  const auto h = random_band_limited(48, 0.3, c);
  CHECK((f - g).max_abs() == 0.0);
  CHECK((f - h).max_abs() > 0.0);
  CHECK(f.max_abs() == doctest::Approx(0.3));
  CHECK(std::abs(f.mean()) < 1e-15);
  CHECK(spectral_tail_fraction(f) < 1e-25);
}

TEST_CASE("snapshot round trip is exact") {
  const Grid g(16, 9);
  const auto u = BulkField::sample(g, [](double x, double z) { return std::exp(z) * std::sin(x) / 3.0; });
  const auto rho = InterfaceField::sample(g.x, [](double x) { return std::cos(x) / 7.0; });
  std::stringstream su, sr;
  io::write_snapshot(su, u, {{"t", "0.5"}, {"field", "u"}});
  io::write_snapshot(sr, rho, {{"t", "0.5"}});
  io::Meta m;
  const auto u2 = io::read_bulk(su, &m);
  const auto r2 = io::read_interface(sr);
  CHECK(m.at("field") == "u");
  CHECK((u2 - u).max_abs() == 0.0);
  CHECK((r2 - rho).max_abs() == 0.0);

  std::stringstream broken("# t=0\n1,2,x\n");
  CHECK_THROWS(io::read_interface(broken));
}

TEST_CASE("checkpoint round trip") {
  const fs::path dir = scratch_dir("ckpt");
  const Grid g(16, 9);
  State s = make_state(BulkField::sample(g, [](double x, double z) { return x * z; }),
                       InterfaceField::sample(g.x, [](double x) { return 0.1 * std::sin(x); }), 0.25);
  s.rho_t = InterfaceField::sample(g.x, [](double x) { return std::cos(x); });
  io::write_checkpoint(dir, s, 1e-3, "abc");
  io::Meta m;
  const State r = io::read_checkpoint(dir, &m);
  CHECK(r.t == 0.25);
  CHECK(m.at("config_hash") == "abc");
  CHECK((r.u - s.u).max_abs() == 0.0);
  CHECK((r.rho - s.rho).max_abs() == 0.0);
  CHECK((r.rho_t - s.rho_t).max_abs() == 0.0);
  fs::remove_all(dir);
}

TEST_CASE("staged directories appear only on commit") {
  const fs::path root = scratch_dir("stage");
  const fs::path target = root / "out";
  {
    io::StagedDirectory d(target);
    std::ofstream(d.path() / "a.txt") << "x";
    CHECK_FALSE(fs::exists(target));
  }
  CHECK_FALSE(fs::exists(target));
  CHECK(fs::is_empty(root));
  {
    io::StagedDirectory d(target);
    std::ofstream(d.path() / "a.txt") << "x";
    d.commit();
  }
  CHECK(fs::exists(target / "a.txt"));
  {
    io::StagedDirectory d(target);
    std::ofstream(d.path() / "b.txt") << "y";
    d.commit();
  }
  CHECK(fs::exists(target / "b.txt"));
  CHECK_FALSE(fs::exists(target / "a.txt"));
  fs::remove_all(root);
}

TEST_CASE("time series and hashing") {
  CHECK(io::config_hash("") == "cbf29ce484222325");
  CHECK(io::config_hash("a") != io::config_hash("b"));
  CHECK(io::config_hash("a").size() == 16);
  EnergyReport r;
  r.t = 0.5;
  r.E = 1.25;
  r.inner_iters = 3;
  std::stringstream ss;
  io::write_time_series(ss, {r}, "0123");
  std::string line;
  std::getline(ss, line);
  CHECK(line == "# config_hash=0123");
  std::getline(ss, line);
  CHECK(line.rfind("t,E,D,E_eps,D_eps,sobolev_E,sobolev_D,cons_residual,rho_dev_L2,identity_residual,inner_iters", 0) == 0);
  std::getline(ss, line);
  CHECK(line.rfind("0.5,1.25,", 0) == 0);
  CHECK(io::fmt(0.1) == "0.10000000000000001");
}
