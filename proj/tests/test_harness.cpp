#include "doctest.h"

#include "gpsim/experiments.hpp"
#include "gpsim/function_classes.hpp"

#include <boost/math/special_functions/beta.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <sys/wait.h>

using namespace gpsim;
namespace fs = std::filesystem;

namespace {

const char* kSmallCoverage = R"(
experiment: coverage
seed: 7
replications: 6
n_list: [32, 64]
methods: [lik_eb, risk_eb, hb]
M_list: [1, 2]
prior: {family: bm}
truth: {kind: power, alpha: 1, scale: 1}
radius: {method: satterthwaite}
)";

bool has_problem(const ConfigError& e, const std::string& fragment) {
  for (const auto& p : e.problems())
    if (p.find(fragment) != std::string::npos) return true;
  return false;
}

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("gpsim_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("config parsing fills fields and applies defaults") {
  const ExperimentConfig cfg = load_config(kSmallCoverage);
  CHECK(cfg.experiment == ExperimentKind::coverage);
  CHECK(cfg.seed == 7);
  CHECK(cfg.n_list == std::vector<std::size_t>{32, 64});
  CHECK(cfg.methods.size() == 3);
  CHECK(cfg.radius_method.kind == RadiusKind::satterthwaite);
  CHECK(cfg.eta == 0.95);
  CHECK(cfg.grid_points == kDefaultGridSize);
  CHECK(cfg.prior.m == 2.0);

  const ExperimentConfig defaults = load_config("experiment: rate\n");
  CHECK(defaults.replications == 200);
  CHECK(defaults.n_list == std::vector<std::size_t>{256, 512, 1024});
  CHECK(defaults.radius_method.kind == RadiusKind::monte_carlo);
  CHECK(defaults.radius_method.mc_draws == 100000);
}

TEST_CASE("config errors carry field paths") {
  try {
    load_config("experiment: coverage\nprior: {family: bm, colour: red}\nbogus: 1\nn_list: [64, 32]\n");
    FAIL("expected a ConfigError");
  } catch (const ConfigError& e) {
    CHECK(has_problem(e, "prior.colour: unknown key"));
    CHECK(has_problem(e, "bogus: unknown key"));
  }
  try {
    load_config("experiment: coverage\nn_list: [64, 32]\neta: 1.5\nradius: {method: monte_carlo, mc_draws: 50}\n");
    FAIL("expected a ConfigError");
  } catch (const ConfigError& e) {
    CHECK(has_problem(e, "n_list[1]"));
    CHECK(has_problem(e, "eta:"));
    CHECK(has_problem(e, "radius.mc_draws"));
  }
  CHECK_THROWS_AS(load_config("experiment: nope\n"), ConfigError);
  CHECK_THROWS_AS(load_config("replications: many\n"), ConfigError);
  CHECK_THROWS_AS(load_config("prior: {family: laplacian, boundary: neumann}\n"), ConfigError);
  CHECK_THROWS_AS(load_config("prior: {family: sobolev_2d}\nn_list: [128]\n"), ConfigError);
  CHECK_THROWS_AS(load_config("[1, 2"), ConfigError);
  CHECK_THROWS_AS(load_config_file("/nonexistent/config.yaml"), ConfigError);
}

TEST_CASE("config hash tracks content") {
  const ExperimentConfig a = load_config(kSmallCoverage);
  ExperimentConfig b = a;
  CHECK(a.hash() == b.hash());
  CHECK(a.hash().size() == 16);
  b.seed = 8;
  CHECK(a.hash() != b.hash());
  CHECK(a.to_json()["radius"]["method"] == "satterthwaite");
}

TEST_CASE("replication seeds are distinct across cells") {
  std::set<std::uint64_t> seen;
  for (std::size_t n : {32u, 64u})
    for (const char* m : {"lik_eb", "risk_eb", "hb"})
      for (std::size_t r = 0; r < 50; ++r) seen.insert(replication_seed(1, n, m, r));
  CHECK(seen.size() == 300);
  CHECK(replication_seed(1, 32, "hb", 3) == replication_seed(1, 32, "hb", 3));
}

TEST_CASE("parallel_for visits every index once") {
  std::vector<int> hits(1000, 0);
  parallel_for(1000, 4, [&](std::size_t i) { ++hits[i]; });
  for (int h : hits) CHECK(h == 1);
}

TEST_CASE("numeric helpers") {
  // int_0^inf u^g / (u^m + 1)^v du = B((g+1)/m, v - (g+1)/m) / m.
  for (auto [g, v, m] : {std::tuple{0.0, 1.0, 2.0}, {2.0, 2.0, 2.0}, {0.5, 1.5, 3.0}, {3.0, 2.0, 4.0}}) {
    const double a = (g + 1.0) / m;
    CHECK(power_integral(g, v, m) == doctest::Approx(boost::math::beta(a, v - a) / m).epsilon(1e-8));
  }
  CHECK(power_integral(0.0, 1.0, 2.0) == doctest::Approx(std::numbers::pi / 2));
  CHECK(log_log_slope({1, 2, 4, 8}, {3, 3 * std::pow(2, -0.5), 1.5, 3 * std::pow(8, -0.5)}) == doctest::Approx(-0.5));
  CHECK(median({3, 1, 2}) == 2.0);
  CHECK(median({4, 1, 2, 3}) == 2.5);
}

TEST_CASE("truth construction") {
  auto p = brownian_motion_prior(64);
  TruthSpec t;
  t.kind = TruthKind::zero;
  CHECK(make_truth(t, p).coeffs.norm() == 0.0);
  t.kind = TruthKind::power;
  t.scale = 2.0;
  const CoefficientVector f = make_truth(t, p);
  CHECK(f.coeffs == (2.0 * alias_coefficients(power_sequence(1.0), p).coeffs.coeffs));
  t.kind = TruthKind::fourier;
  t.function = "identity";
  const Eigen::VectorXd values = from_coefficients(make_truth(t, p));
  for (std::size_t i = 0; i < 64; ++i) CHECK(values[static_cast<Eigen::Index>(i)] == doctest::Approx(2.0 * p->grid().axis[i]));
  auto q = sobolev_prior_2d(8, 2.0);
  t.kind = TruthKind::power;
  t.scale = 1.0;
  const CoefficientVector g = make_truth(t, q);
  CHECK(g[3] == doctest::Approx(8.0 * std::pow(4.0, -1.5)));
}

TEST_CASE("coverage run is deterministic and independent of the thread count") {
  ExperimentConfig cfg = load_config(kSmallCoverage);
  const ExperimentReport a = run_experiment(cfg);
  cfg.jobs = 3;
  const ExperimentReport b = run_experiment(cfg);
  CHECK(report_csv(a) == report_csv(b));
  const double cov = a.value(32, "lik_eb", "coverage_rate", 1.0);
  CHECK(cov >= 0.0);
  CHECK(cov <= 1.0);
  CHECK(a.value(64, "hb", "errors") == 0.0);
  CHECK(report_csv(a).rfind("experiment,n,method,M,param,statistic,value,config_hash\n", 0) == 0);

  const fs::path dir = scratch_dir("report");
  write_report(a, dir, true);
  CHECK(fs::exists(dir / "report.csv"));
  CHECK(fs::exists(dir / "meta.json"));
  CHECK(!fs::is_empty(dir / "trace"));
}

TEST_CASE("each experiment kind runs on a tiny configuration") {
  for (const char* kind : {"pointwise_coverage", "rate", "oracle", "hb_concentration", "prior_polished", "d2_asymptotics"}) {
    std::string text = std::string("experiment: ") + kind + R"(
seed: 3
replications: 3
n_list: [32, 64, 128]
methods: [lik_eb, risk_eb, hb]
M_list: [1]
radius: {method: satterthwaite}
)";
    if (std::string(kind) == "prior_polished") text += "truth: {kind: prior_draw}\n";
    CAPTURE(kind);
    const ExperimentReport r = run_experiment(load_config(text));
    CHECK(!r.rows.empty());
    for (const auto& row : r.rows) CHECK(row.experiment == kind);
  }
}

#ifdef GPSIM_CLI_PATH
TEST_CASE("command-line tool") {
  const fs::path dir = scratch_dir("cli");
  {
    std::ofstream(dir / "ok.yaml") << kSmallCoverage;
    std::ofstream(dir / "bad.yaml") << "experiment: coverage\nwhat: 1\n";
  }
  const std::string cli = GPSIM_CLI_PATH;
  const auto run = [&](const std::string& args) {
    const int status = std::system((cli + " " + args + " > " + (dir / "log.txt").string() + " 2>&1").c_str());
    return WEXITSTATUS(status);
  };
  CHECK(run("validate " + (dir / "ok.yaml").string()) == 0);
  CHECK(run("validate " + (dir / "bad.yaml").string()) == 2);
  CHECK(run("run " + (dir / "ok.yaml").string() + " --out " + (dir / "out").string() + " -q") == 0);
  CHECK(fs::exists(dir / "out" / "report.csv"));
  CHECK(run("run " + (dir / "missing.yaml").string()) != 0);
}
#endif
