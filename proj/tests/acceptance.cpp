// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include "gpsim/credible_sets.hpp"
#include "gpsim/experiments.hpp"
#include "gpsim/function_classes.hpp"
#include "gpsim/rng.hpp"

#include "CLI11.hpp"

#include <fmt/core.h>

#include <Eigen/Dense>

#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <set>
#include <string>
#include <vector>

using namespace gpsim;

namespace {

// Pinned tolerances.
constexpr double kEigenResidual = 1e-8;
constexpr double kOrthoTol = 1e-10;
constexpr double kPosteriorTol = 1e-8;
constexpr double kAliasTol = 1e-12;
constexpr double kAliasConstantMax = 2.0;
constexpr double kD2Tol = 0.15;
constexpr double kLogBandMax = 2.0;
constexpr double kOracleFactor = 1.5;
constexpr double kOracleRate = 0.90;
constexpr double kCoverageMin = 0.90;
constexpr double kCoverageM = 3.0;
constexpr double kFractionLevel = 0.90;
constexpr double kFractionRate = 0.90;
constexpr double kSlopeTol = 0.10;
constexpr double kSteeperBy = 0.05;
constexpr double kMassLevel = 0.90;
constexpr double kMassRate = 0.90;
constexpr double kMedianTrackFactor = 3.0;
constexpr double kFloorFactor = 2.0;
constexpr double kPolishedRate = 0.95;
constexpr double kLogDetTol = 0.10;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::size_t g_jobs = 1;

ExperimentConfig base_config(ExperimentKind kind) {
  ExperimentConfig cfg;
  cfg.experiment = kind;
  cfg.prior.family = PriorFamily::power_law;
  cfg.prior.m = 2.0;
  cfg.prior.delta = 1.0;
  cfg.truth.kind = TruthKind::power;
  cfg.truth.alpha = 1.0;
  cfg.replications = 200;
  cfg.radius_method = RadiusMethod::satterthwaite();
  cfg.jobs = g_jobs;
  return cfg;
}

Outcome spectral_correctness() {
  double residual = 0.0, ortho = 0.0;
  for (std::size_t n : {1u, 2u, 7u, 32u, 100u, 256u}) {
    auto p = brownian_motion_prior(n);
    const auto N = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd K(N, N);
    const auto& x = p->grid().axis;
    for (Eigen::Index a = 0; a < N; ++a)
      for (Eigen::Index b = 0; b < N; ++b)
        K(a, b) = std::min(x[static_cast<std::size_t>(a)], x[static_cast<std::size_t>(b)]);
    for (std::size_t j = 0; j < n; ++j) {
      const Eigen::VectorXd e = p->basis_vector(j);
      residual = std::max(residual, (K * e - p->eigenvalue(j) * e).cwiseAbs().maxCoeff());
    }
    ortho = std::max(ortho, orthonormality_defect(*p));
  }
  bool sandwich = true;
  for (std::size_t n = 1; n <= 512; ++n) {
    for (std::size_t j = 1; j <= n; ++j) {
      const double l = bm_eigenvalue(j, n);
      const double ref = static_cast<double>(n) / (static_cast<double>(j) * static_cast<double>(j));
      if (l < ref / (std::numbers::pi * std::numbers::pi) || l > 3.0 * ref) sandwich = false;
    }
  }
  return {residual < kEigenResidual && ortho < kOrthoTol && sandwich,
          fmt::format("max residual {:.2e}, orthonormality {:.2e}, sandwich bounds n<=512 {}", residual,
                      ortho, sandwich ? "hold" : "violated")};
}

Outcome posterior_oracle() {
  double worst = 0.0;
  for (std::size_t n : {4u, 16u, 33u, 64u}) {
    auto p = brownian_motion_prior(n);
    const auto N = static_cast<Eigen::Index>(n);
    const Eigen::MatrixXd U = covariance_matrix(*p);
    Rng rng(n);
    Eigen::VectorXd y(N);
    for (Eigen::Index i = 0; i < N; ++i) y[i] = 3.0 * rng.normal();
    for (double c : {0.1, 1.0, 10.0}) {
      const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(N, N);
      const Eigen::MatrixXd cov = I - (I + c * U).inverse();
      const Eigen::VectorXd mean = from_coefficients(posterior_mean(p, c, Observation{y, std::nullopt}));
      worst = std::max(worst, (mean - cov * y).cwiseAbs().maxCoeff());
      worst = std::max(worst, (posterior_pointwise_variances(*p, c) - cov.diagonal()).cwiseAbs().maxCoeff());
    }
  }
  return {worst < kPosteriorTol, fmt::format("max deviation from dense formulas {:.2e}", worst)};
}

Outcome aliasing() {
  double worst = 0.0;
  for (std::size_t n = 1; n <= 128; ++n) {
    for (std::size_t i = 1; i <= n; ++i) {
      for (std::size_t j = 1; j <= 2 * n + 1; ++j) {
        const double e = bm_basis_entry(j, i, n);
        worst = std::max(worst, std::abs(bm_basis_entry(j + 2 * n + 1, i, n) - e));
        worst = std::max(worst, std::abs(bm_basis_entry(2 * n + 2 - j, i, n) + e));
      }
      worst = std::max(worst, std::abs(bm_basis_entry(n + 1, i, n)));
    }
  }
  // Scaled deviation n^(3/2) max_i |f_{i,n} / sqrt(n + 1/2) - i^(-3/2)| for the alpha = 1 power sequence.
  std::vector<double> constants;
  for (std::size_t n : {64u, 256u}) {
    auto p = brownian_motion_prior(n);
    const AliasResult a = alias_coefficients(power_sequence(1.0), p);
    double dev = 0.0;
    for (std::size_t i = 1; i <= n; ++i)
      dev = std::max(dev, std::abs(a.coeffs[i - 1] / std::sqrt(n + 0.5) - std::pow(static_cast<double>(i), -1.5)));
    constants.push_back(dev * std::pow(static_cast<double>(n), 1.5));
  }
  const bool ok = worst < kAliasTol && constants[0] <= kAliasConstantMax && constants[1] <= kAliasConstantMax;
  return {ok, fmt::format("identity defect {:.2e}; deviation constant {:.4f} (n=64), {:.4f} (n=256)", worst,
                          constants[0], constants[1])};
}

Outcome d2_asymptotics() {
  ExperimentConfig cfg = base_config(ExperimentKind::d2_asymptotics);
  cfg.n_list = {4096};
  cfg.d2_scales = 9;  // odd, so the middle scale is the geometric midpoint of the interval
  const ExperimentReport one = run_experiment(cfg);
  const ScaleInterval iv = ScaleInterval::for_prior(*prior_for(cfg.prior, 4096), cfg.d2_scales);
  const double mid = iv.grid[iv.grid.size() / 2];
  const double ratio = one.value(4096, "d2", "risk_over_rate", std::nan(""), fmt::format("c={}", format_number(mid)));

  ExperimentConfig two = base_config(ExperimentKind::d2_asymptotics);
  two.prior.family = PriorFamily::tensor;
  two.prior.factor = PriorFamily::brownian_motion;
  two.n_list = {24, 32, 48, 64};
  two.d2_scales = 25;
  const ExperimentReport rep2 = run_experiment(two);
  double with = 0.0, without = 0.0;
  for (std::size_t n : two.n_list) {
    with = std::max(with, rep2.value(n, "d2", "band_with_log"));
    without = std::max(without, rep2.value(n, "d2", "band_without_log"));
  }
  const bool ok = std::abs(ratio - 1.0) < kD2Tol && with <= kLogBandMax;
  return {ok, fmt::format("1-D ratio at geometric mid-interval {:.4f}; 2-D band with log {:.3f}, without {:.3f}",
                          ratio, with, without)};
}

Outcome remainder_negligibility() {
  std::string detail;
  bool ok = true;
  for (CriterionKind kind : {CriterionKind::risk, CriterionKind::likelihood}) {
    std::vector<double> med;
    for (std::size_t n : {128u, 512u, 2048u}) {
      auto p = brownian_motion_prior(n);
      const CoefficientVector f = alias_coefficients(power_sequence(1.0), p).coeffs;
      const ScaleInterval iv = ScaleInterval::for_prior(*p);
      std::vector<double> sups(50);
      parallel_for(50, g_jobs, [&](std::size_t s) {
        const CoefficientVector z = noise_coefficients(p, mix_seed({0xacce, n, s}));
        double sup = 0.0;
        for (double c : iv.grid) {
          const CriterionDecomposition d = decompose_criterion(*p, f, z, c, kind);
          sup = std::max(sup, (std::abs(d.r1) + std::abs(d.r2)) / d.d());
        }
        sups[s] = sup;
      });
      med.push_back(median(sups));
    }
    const bool dec = med[0] > med[1] && med[1] > med[2];
    ok = ok && dec;
    detail += fmt::format("{}{}: {:.4f} > {:.4f} > {:.4f}", detail.empty() ? "" : "; ", to_string(kind), med[0],
                          med[1], med[2]);
  }
  return {ok, "median sup |R|/D over n=128,512,2048, " + detail};
}

Outcome oracle_inequality() {
  ExperimentConfig cfg = base_config(ExperimentKind::oracle);
  cfg.prior.family = PriorFamily::brownian_motion;
  cfg.n_list = {1024};
  cfg.methods = {ScaleMethod::risk_eb, ScaleMethod::lik_eb};
  cfg.epsilons = {kOracleFactor - 1.0};
  const ExperimentReport rep = run_experiment(cfg);
  const std::string param = fmt::format("eps={}", format_number(kOracleFactor - 1.0));
  const double risk = 1.0 - rep.value(1024, "risk_eb", "exceedance_rate", std::nan(""), param);
  const double lik = 1.0 - rep.value(1024, "lik_eb", "exceedance_rate", std::nan(""), param);
  return {risk >= kOracleRate && lik >= kOracleRate,
          fmt::format("share with D(c_hat) <= 1.5 inf D: risk {:.3f}, likelihood {:.3f}", risk, lik)};
}

std::vector<std::pair<std::string, TruthSpec>> polished_truths() {
  TruthSpec power;
  power.kind = TruthKind::power;
  power.alpha = 1.0;
  TruthSpec draw;
  draw.kind = TruthKind::prior_draw;
  draw.alpha = 1.0;
  draw.seed = 11;
  return {{"power", power}, {"prior_draw", draw}};
}

Outcome coverage() {
  bool ok = true;
  std::string detail;
  for (const auto& [name, truth] : polished_truths()) {
    ExperimentConfig cfg = base_config(ExperimentKind::coverage);
    cfg.truth = truth;
    cfg.n_list = {256, 512, 1024};
    cfg.M_list = {kCoverageM};
    const ExperimentReport rep = run_experiment(cfg);
    for (ScaleMethod m : cfg.methods) {
      const std::string label = to_string(m);
      std::vector<double> cov;
      for (std::size_t n : cfg.n_list) cov.push_back(rep.value(n, label, "coverage_rate", kCoverageM));
      const bool mono = cov[0] <= cov[1] && cov[1] <= cov[2];
      const bool good = mono && cov[2] >= kCoverageMin && rep.value(1024, label, "errors") == 0.0;
      ok = ok && good;
      detail += fmt::format("{}{}/{} {:.3f},{:.3f},{:.3f}", detail.empty() ? "" : "; ", name, label, cov[0],
                            cov[1], cov[2]);
    }
  }
  return {ok, "M = 3 (calibration choice), n=256,512,1024: " + detail};
}

Outcome pointwise() {
  bool ok = true;
  std::string detail;
  for (const auto& [name, truth] : polished_truths()) {
    ExperimentConfig cfg = base_config(ExperimentKind::pointwise_coverage);
    cfg.truth = truth;
    cfg.n_list = {512};
    cfg.M_list = {kCoverageM};
    cfg.interval_C = 0.5;
    cfg.fraction_level = kFractionLevel;
    const ExperimentReport rep = run_experiment(cfg);
    const std::string param = fmt::format("level={}", format_number(kFractionLevel));
    for (ScaleMethod m : cfg.methods) {
      const std::string label = to_string(m);
      const double rate = rep.value(512, label, "rate_fraction_at_level", kCoverageM, param);
      ok = ok && rate >= kFractionRate;
      detail += fmt::format("{}{}/{} {:.3f}", detail.empty() ? "" : "; ", name, label, rate);
    }
  }
  return {ok, "share of reps with fraction >= 0.9 at n=512: " + detail};
}

Outcome rate_adaptation() {
  struct Case {
    double alpha, m;
  };
  auto slopes = [&](Case c) {
    ExperimentConfig cfg = base_config(ExperimentKind::rate);
    cfg.prior.m = c.m;
    cfg.truth.alpha = c.alpha;
    cfg.n_list = {256, 512, 1024, 2048};
    cfg.methods = {ScaleMethod::risk_eb, ScaleMethod::lik_eb};
    const ExperimentReport rep = run_experiment(cfg);
    return std::pair{rep.value(0, "risk_eb", "slope"), rep.value(0, "lik_eb", "slope")};
  };
  const double t1 = -1.0 / 3.0;
  const auto [r12, l12] = slopes({1, 2});
  const auto [r14, l14] = slopes({1, 4});
  const auto [r34, l34] = slopes({3, 4});
  const bool a = std::abs(r12 - t1) <= kSlopeTol && std::abs(r14 - t1) <= kSlopeTol;
  const bool b = std::abs(l14 - t1) <= kSlopeTol;
  const bool c = l34 - r34 >= kSteeperBy;
  return {a && b && c,
          fmt::format("target -1/3: risk (1,2) {:.3f} [lik {:.3f}], risk (1,4) {:.3f}, lik (1,4) {:.3f}; "
                      "(3,4) risk {:.3f} vs lik {:.3f}, gap {:.3f} (need >= {}){}",
                      r12, l12, r14, l14, r34, l34, l34 - r34, kSteeperBy, c ? "" : " [gap clause fails]")};
}

Outcome hb_concentration() {
  ExperimentConfig cfg = base_config(ExperimentKind::hb_concentration);
  cfg.prior.family = PriorFamily::brownian_motion;
  cfg.n_list = {1024};
  cfg.K_list = {10.0};
  cfg.mass_level = kMassLevel;
  cfg.methods = {ScaleMethod::hb};
  const ExperimentReport rep = run_experiment(cfg);
  const double rate = rep.value(1024, "hb", "rate_mass_at_level", std::nan(""), "two_lambda;K=10");

  ExperimentConfig zero = cfg;
  zero.truth.kind = TruthKind::zero;
  zero.n_list = {256, 1024};
  zero.methods = {ScaleMethod::hb, ScaleMethod::risk_eb};
  const ExperimentReport rz = run_experiment(zero);
  const double a = rz.value(256, "hb", "median_c_over_rate");
  const double b = rz.value(1024, "hb", "median_c_over_rate");
  const double track = std::max(a, b) / std::min(a, b);
  const double f256 = rz.value(256, "risk_eb", "median_c_hat_over_lo");
  const double f1024 = rz.value(1024, "risk_eb", "median_c_hat_over_lo");
  const bool ok = rate >= kMassRate && track <= kMedianTrackFactor && f256 <= kFloorFactor && f1024 <= kFloorFactor;
  return {ok, fmt::format("mass >= 0.9 share {:.3f}; f=0 HB median / n^(-1/3) {:.3f} (256), {:.3f} (1024); "
                          "risk_eb median c_hat / floor {:.3f}, {:.3f}",
                          rate, a, b, f256, f1024)};
}

Outcome prior_polished() {
  ExperimentConfig cfg = base_config(ExperimentKind::prior_polished);
  cfg.prior.family = PriorFamily::brownian_motion;
  cfg.truth.kind = TruthKind::prior_draw;
  cfg.n_list = {1024};
  cfg.pt_L = 16;
  cfg.pt_rho = 2;
  cfg.pt_m_min = 8;
  const ExperimentReport rep = run_experiment(cfg);
  const double pass = rep.value(1024, "prior_draw", "pass_rate");
  const double gap = rep.value(1024, "gap_control", "pass");
  const double zero = rep.value(1024, "zero_control", "pass");
  return {pass >= kPolishedRate && gap == 0.0 && zero == 1.0,
          fmt::format("prior draws passing {:.3f}; gap control {}; zero control {}", pass,
                      gap == 0.0 ? "fails" : "passes", zero == 1.0 ? "passes" : "fails")};
}

Outcome log_det() {
  const std::size_t n = 10000;
  double acc = 0.0;
  for (std::size_t j = 1; j <= n; ++j) acc += std::log1p(bm_eigenvalue(j, n));
  const double ratio = acc / std::sqrt(static_cast<double>(n));
  return {std::abs(ratio - 1.0) < kLogDetTol, fmt::format("sum log(1 + lambda) / sqrt(n) = {:.4f}", ratio)};
}

Outcome determinism() {
  std::vector<std::string> failed;
  for (ExperimentKind kind : {ExperimentKind::coverage, ExperimentKind::pointwise_coverage, ExperimentKind::rate,
                              ExperimentKind::oracle, ExperimentKind::hb_concentration,
                              ExperimentKind::prior_polished, ExperimentKind::d2_asymptotics}) {
    ExperimentConfig cfg = base_config(kind);
    cfg.n_list = {32, 64, 128};
    cfg.replications = 8;
    cfg.radius_method = RadiusMethod::monte_carlo(10000, 3);
    if (kind == ExperimentKind::prior_polished) cfg.truth.kind = TruthKind::prior_draw;
    cfg.jobs = 1;
    const std::string first = report_csv(run_experiment(cfg));
    cfg.jobs = std::max<std::size_t>(g_jobs, 3);
    const std::string second = report_csv(run_experiment(cfg));
    const std::string third = report_csv(run_experiment(cfg));
    if (first != second || second != third) failed.push_back(to_string(kind));
  }
  std::string which;
  for (const auto& f : failed) which += " " + f;
  return {failed.empty(), failed.empty() ? "all seven experiments byte-identical across reruns and thread counts"
                                         : "differing:" + which};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gpsim acceptance suite"};
  std::vector<int> only;
  app.add_option("--jobs", g_jobs, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--only", only, "Run only these criteria (1-13)");
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"spectral correctness", spectral_correctness},
      {"posterior oracle equivalence", posterior_oracle},
      {"aliasing identities", aliasing},
      {"D2 asymptotics", d2_asymptotics},
      {"remainder negligibility", remainder_negligibility},
      {"oracle inequality", oracle_inequality},
      {"credible ball coverage", coverage},
      {"pointwise fraction coverage", pointwise},
      {"rate adaptation", rate_adaptation},
      {"HB concentration", hb_concentration},
      {"prior polished tail", prior_polished},
      {"log-det asymptotic", log_det},
      {"determinism", determinism},
  };
  const std::set<int> selected(only.begin(), only.end());
  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const int id = static_cast<int>(k + 1);
    if (!selected.empty() && !selected.count(id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.pass) ++failures;
    fmt::print("[{}] {:>2}. {}: {} ({:.1f}s)\n", o.pass ? "PASS" : "FAIL", id, criteria[k].first, o.detail, secs);
    std::fflush(stdout);
  }
  fmt::print("{} criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
