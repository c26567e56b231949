#include "gpsim/experiments.hpp"

#include "gpsim/credible_sets.hpp"
#include "gpsim/function_classes.hpp"
#include "gpsim/posterior.hpp"
#include "gpsim/rng.hpp"
#include "gpsim/scale_selection.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <numbers>
#include <numeric>
#include <thread>

namespace gpsim {

PriorPtr prior_for(const PriorSpec& tmpl, std::size_t n) {
  PriorSpec spec = tmpl;
  spec.n = n;
  return make_prior(spec);
}

namespace {

bool sine_basis_1d(const SpectralPrior& prior) {
  return !prior.is_two_dimensional() && prior.basis_kind() == SpectralPrior::BasisKind::bm_sine;
}

double sample_function(const std::string& name, double x) {
  if (name == "identity") return x;
  if (name == "sine") return std::sin(1.5 * std::numbers::pi * x);
  if (name == "kink") return std::abs(x - 0.5) - 0.5;
  throw std::invalid_argument("unknown sample function '" + name + "'");
}

}  // namespace

CoefficientVector make_truth(const TruthSpec& truth, const PriorPtr& prior) {
  const std::size_t N = prior->dim();
  const double n_plus = static_cast<double>(prior->grid().n) + 0.5;
  const double grid_scale = prior->is_two_dimensional() ? std::sqrt(static_cast<double>(N)) : std::sqrt(n_plus);
  Eigen::VectorXd coeffs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(N));
  switch (truth.kind) {
    case TruthKind::zero: break;
    case TruthKind::power:
      if (sine_basis_1d(*prior)) {
        AliasResult a = alias_coefficients(power_sequence(truth.alpha), prior);
        if (!a.converged) throw std::runtime_error("aliasing of the power sequence did not converge");
        coeffs = a.coeffs.coeffs;
      } else {
        const Sequence s = power_sequence(truth.alpha);
        for (std::size_t k = 0; k < N; ++k) coeffs[static_cast<Eigen::Index>(k)] = grid_scale * s(k + 1);
      }
      break;
    case TruthKind::self_similar: {
      const Sequence s = self_similar_sequence({truth.alpha, truth.M, truth.rho, truth.L, truth.seed});
      for (std::size_t k = 0; k < N; ++k) coeffs[static_cast<Eigen::Index>(k)] = grid_scale * s(k + 1);
      break;
    }
    case TruthKind::prior_draw:
      coeffs = prior_draw(prior, truth.alpha, truth.delta, mix_seed({truth.seed, N})).coeffs;
      break;
    case TruthKind::fourier: {
      if (prior->is_two_dimensional()) throw std::invalid_argument("fourier truths are 1-D only");
      Eigen::VectorXd values(static_cast<Eigen::Index>(N));
      for (std::size_t i = 0; i < N; ++i)
        values[static_cast<Eigen::Index>(i)] = sample_function(truth.function, prior->grid().axis[i]);
      coeffs = to_coefficients(prior, values).coeffs;
      break;
    }
    case TruthKind::custom_csv: {
      std::ifstream in(truth.path);
      if (!in) throw std::runtime_error("cannot open truth file " + truth.path);
      coeffs = to_coefficients(prior, read_observation_csv(in, prior->grid()).y).coeffs;
      break;
    }
  }
  return CoefficientVector(prior, truth.scale * coeffs);
}

std::uint64_t replication_seed(std::uint64_t base, std::size_t n, const std::string& method,
                               std::size_t r) {
  return mix_seed({base, static_cast<std::uint64_t>(n), fnv1a64(method), static_cast<std::uint64_t>(r)});
}

void parallel_for(std::size_t count, std::size_t jobs, const std::function<void(std::size_t)>& fn) {
  jobs = std::max<std::size_t>(1, std::min(jobs, count));
  if (jobs == 1) {
    for (std::size_t k = 0; k < count; ++k) fn(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> workers;
  for (std::size_t t = 0; t < jobs; ++t)
    workers.emplace_back([&] {
      for (std::size_t k = next++; k < count; k = next++) {
        try {
          fn(k);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  for (auto& w : workers) w.join();
  if (failure) std::rethrow_exception(failure);
}

double power_integral(double gamma, double nu, double m) {
  if (!(gamma > -1.0) || !(m * nu > gamma + 1.0))
    throw std::domain_error("power_integral diverges for these exponents");
  boost::math::quadrature::exp_sinh<double> integrator;
  // Written in logs so that neither factor overflows far out in the tail.
  return integrator.integrate([&](double u) {
    if (!(u > 0.0)) return gamma == 0.0 ? 1.0 : 0.0;
    const double lu = std::log(u);
    if (lu <= 0.0) return std::exp(gamma * lu - nu * std::log1p(std::exp(m * lu)));
    return std::exp((gamma - m * nu) * lu - nu * std::log1p(std::exp(-m * lu)));
  });
}

double log_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("slope needs >= 2 matched points");
  const auto k = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (k * sxy - sx * sy) / (k * sxx - sx * sx);
}

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

namespace {

double mean(const std::vector<double>& v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double stddev(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double mu = mean(v);
  double acc = 0.0;
  for (double x : v) acc += (x - mu) * (x - mu);
  return std::sqrt(acc / static_cast<double>(v.size() - 1));
}

std::string sanitize(std::string s) {
  for (char& ch : s)
    if (ch == ',' || ch == '\n' || ch == '\r') ch = ';';
  return s;
}

std::string m_key(const std::string& stem, double M) { return stem + "@" + format_number(M); }

/// Runs `body` for every replication of one cell and collects its named values.
template <class Body>
std::vector<TraceRecord> run_cell(const ExperimentConfig& cfg, std::size_t n, const std::string& label,
                                  Body&& body) {
  std::vector<TraceRecord> records(cfg.replications);
  parallel_for(cfg.replications, cfg.jobs, [&](std::size_t r) {
    TraceRecord& rec = records[r];
    rec.replication = r;
    rec.seed = replication_seed(cfg.seed, n, label, r);
    try {
      body(rec.seed, rec.values);
      rec.ok = true;
    } catch (const std::exception& e) {
      rec.ok = false;
      rec.error = sanitize(e.what());
      rec.values.clear();
    }
  });
  return records;
}

std::vector<double> column(const std::vector<TraceRecord>& records, const std::string& name) {
  std::vector<double> out;
  for (const TraceRecord& rec : records) {
    if (!rec.ok) continue;
    for (const auto& [k, v] : rec.values)
      if (k == name) out.push_back(v);
  }
  return out;
}

std::size_t error_count(const std::vector<TraceRecord>& records) {
  return static_cast<std::size_t>(
      std::count_if(records.begin(), records.end(), [](const TraceRecord& r) { return !r.ok; }));
}

ExperimentReport new_report(const ExperimentConfig& cfg) {
  ExperimentReport rep;
  rep.experiment = to_string(cfg.experiment);
  rep.config_hash = cfg.hash();
  rep.config_echo = cfg.to_json();
  return rep;
}

std::string cell_label(std::size_t n, const std::string& method) {
  return fmt::format("n{}_{}", n, method);
}

/// Scales of the HB union between the (1 -+ eta1)/2 posterior quantiles.
std::vector<double> hb_scales(const HBPosterior& post, double eta1, std::size_t subgrid) {
  const double lo = post.quantile(0.5 * (1.0 - eta1));
  const double hi = post.quantile(0.5 * (1.0 + eta1));
  if (!(hi > lo)) return {lo};
  std::vector<double> out(subgrid);
  for (std::size_t k = 0; k < subgrid; ++k)
    out[k] = std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * static_cast<double>(k) /
                                         static_cast<double>(subgrid - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

struct Setting {
  PriorPtr prior;
  ScaleInterval interval;
  CoefficientVector truth;
  HBPrior hb;
};

Setting make_setting(const ExperimentConfig& cfg, std::size_t n) {
  Setting s;
  s.prior = prior_for(cfg.prior, n);
  s.interval = ScaleInterval::for_prior(*s.prior, cfg.grid_points);
  s.truth = make_truth(cfg.truth, s.prior);
  s.hb = HBPrior{cfg.hb_kappa, cfg.hb_lambda, s.interval};
  return s;
}

/// Scales a method would use for its credible set on data y: the EB estimate, or the HB union grid.
std::vector<double> method_scales(const ExperimentConfig& cfg, const Setting& s, ScaleMethod method,
                                  const CoefficientVector& y,
                                  std::vector<std::pair<std::string, double>>& out) {
  if (method == ScaleMethod::hb) {
    const HBPosterior post(*s.prior, y, s.hb);
    auto scales = hb_scales(post, cfg.eta_scale, cfg.hb_subgrid);
    out.emplace_back("c_lo", scales.front());
    out.emplace_back("c_hi", scales.back());
    out.emplace_back("c_hat", post.quantile(0.5));
    return scales;
  }
  const ScaleEstimate est = select_scale(*s.prior, y, method, s.interval);
  out.emplace_back("c_hat", est.c_hat);
  return {est.c_hat};
}

/// Ball coverage, radius and diameter for each M in `Ms`.
void ball_replication(const ExperimentConfig& cfg, const Setting& s, ScaleMethod method,
                      std::uint64_t seed, const std::vector<double>& Ms,
                      std::vector<std::pair<std::string, double>>& out) {
  const CoefficientVector z = noise_coefficients(s.prior, seed);
  const CoefficientVector y(s.prior, s.truth.coeffs + z.coeffs);
  const std::vector<double> scales = method_scales(cfg, s, method, y, out);
  const std::size_t S = scales.size();
  std::vector<Eigen::VectorXd> centers(S);
  std::vector<double> dist(S);
  std::vector<double> radius(S);
  for (std::size_t k = 0; k < S; ++k) {
    const Eigen::VectorXd w = shrinkage_weights(*s.prior, scales[k]);
    centers[k] = w.cwiseProduct(y.coeffs);
    dist[k] = (s.truth.coeffs - centers[k]).norm();
    radius[k] = weighted_chi_square_radius(w, cfg.eta, cfg.radius_method);
  }
  std::vector<std::vector<double>> spread(S, std::vector<double>(S, 0.0));
  for (std::size_t p = 0; p < S; ++p)
    for (std::size_t q = p + 1; q < S; ++q) spread[p][q] = spread[q][p] = (centers[p] - centers[q]).norm();
  out.emplace_back("distance", *std::min_element(dist.begin(), dist.end()));
  for (double M : Ms) {
    bool covered = false;
    double diameter = 0.0;
    for (std::size_t p = 0; p < S; ++p) {
      covered = covered || dist[p] < M * radius[p];
      for (std::size_t q = p; q < S; ++q)
        diameter = std::max(diameter, spread[p][q] + M * (radius[p] + radius[q]));
    }
    out.emplace_back(m_key("covered", M), covered ? 1.0 : 0.0);
    out.emplace_back(m_key("radius", M), M * *std::max_element(radius.begin(), radius.end()));
    out.emplace_back(m_key("diameter", M), diameter);
  }
}

void add_errors(ExperimentReport& rep, std::size_t n, const std::string& method,
                const std::vector<TraceRecord>& records) {
  rep.add(n, method, std::numeric_limits<double>::quiet_NaN(), "", "errors",
          static_cast<double>(error_count(records)));
}

constexpr double kNoM = std::numeric_limits<double>::quiet_NaN();

}  // namespace

ExperimentReport run_coverage(const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentReport rep = new_report(cfg);
  for (std::size_t n : cfg.n_list) {
    const Setting s = make_setting(cfg, n);
    for (ScaleMethod method : cfg.methods) {
      const std::string label = to_string(method);
      auto records = run_cell(cfg, n, label, [&](std::uint64_t seed, auto& out) {
        ball_replication(cfg, s, method, seed, cfg.M_list, out);
      });
      for (double M : cfg.M_list) {
        rep.add(n, label, M, "", "coverage_rate", mean(column(records, m_key("covered", M))));
        rep.add(n, label, M, "", "mean_radius", mean(column(records, m_key("radius", M))));
        rep.add(n, label, M, "", "mean_diameter", mean(column(records, m_key("diameter", M))));
      }
      rep.add(n, label, kNoM, "", "mean_c_hat", mean(column(records, "c_hat")));
      rep.add(n, label, kNoM, "", "median_c_hat", median(column(records, "c_hat")));
      add_errors(rep, n, label, records);
      rep.traces[cell_label(n, label)] = std::move(records);
    }
  }
  return rep;
}

ExperimentReport run_rate(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.n_list.size() < 3) throw ConfigError({"n_list: the rate experiment needs at least 3 values"});
  ExperimentReport rep = new_report(cfg);
  std::vector<Setting> settings;
  for (std::size_t n : cfg.n_list) settings.push_back(make_setting(cfg, n));
  for (ScaleMethod method : cfg.methods) {
    const std::string label = to_string(method);
    std::vector<double> ns;
    std::vector<double> diam;
    for (std::size_t k = 0; k < cfg.n_list.size(); ++k) {
      const std::size_t n = cfg.n_list[k];
      const Setting& s = settings[k];
      const double root_n = std::sqrt(static_cast<double>(s.prior->dim()));
      auto records = run_cell(cfg, n, label, [&](std::uint64_t seed, auto& out) {
        ball_replication(cfg, s, method, seed, {1.0}, out);
        for (auto& [name, v] : out)
          if (name == m_key("diameter", 1.0) || name == m_key("radius", 1.0)) v /= root_n;
      });
      const auto d = column(records, m_key("diameter", 1.0));
      rep.add(n, label, kNoM, "", "mean_scaled_diameter", mean(d));
      rep.add(n, label, kNoM, "", "sd_scaled_diameter", stddev(d));
      rep.add(n, label, kNoM, "", "mean_scaled_radius", mean(column(records, m_key("radius", 1.0))));
      rep.add(n, label, kNoM, "", "mean_c_hat", mean(column(records, "c_hat")));
      add_errors(rep, n, label, records);
      ns.push_back(static_cast<double>(s.prior->dim()));
      diam.push_back(mean(d));
      rep.traces[cell_label(n, label)] = std::move(records);
    }
    rep.add(0, label, kNoM, "", "slope", log_log_slope(ns, diam));
    rep.add(0, label, kNoM, "", "target_slope", -cfg.truth.alpha / (1.0 + 2.0 * cfg.truth.alpha));
  }
  return rep;
}

ExperimentReport run_pointwise_coverage(const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentReport rep = new_report(cfg);
  for (std::size_t n : cfg.n_list) {
    const Setting s = make_setting(cfg, n);
    const Eigen::VectorXd truth_values = from_coefficients(s.truth);
    const double N = static_cast<double>(s.prior->dim());
    for (ScaleMethod method : cfg.methods) {
      const std::string label = to_string(method);
      auto records = run_cell(cfg, n, label, [&](std::uint64_t seed, auto& out) {
        const CoefficientVector z = noise_coefficients(s.prior, seed);
        const CoefficientVector y(s.prior, s.truth.coeffs + z.coeffs);
        const auto scales = method_scales(cfg, s, method, y, out);
        const IntervalFamily fam = pointwise_intervals(
            s.prior, y, method == ScaleMethod::hb ? IntervalSource::hb_interval : IntervalSource::eb_scale,
            scales, cfg.eta, 1.0, cfg.interval_C);
        out.emplace_back("j_n_size", static_cast<double>(fam.j_n.size()));
        for (double M : cfg.M_list) {
          std::size_t hits = 0;
          for (std::size_t i : fam.j_n) {
            const auto row = static_cast<Eigen::Index>(i);
            for (Eigen::Index c = 0; c < fam.centers.cols(); ++c)
              if (std::abs(truth_values[row] - fam.centers(row, c)) < M * fam.half_widths(row, c)) {
                ++hits;
                break;
              }
          }
          out.emplace_back(m_key("fraction", M), static_cast<double>(hits) / N);
        }
      });
      for (double M : cfg.M_list) {
        const auto f = column(records, m_key("fraction", M));
        rep.add(n, label, M, "", "mean_fraction", mean(f));
        rep.add(n, label, M, "", "min_fraction", f.empty() ? kNoM : *std::min_element(f.begin(), f.end()));
        const double good = static_cast<double>(std::count_if(
            f.begin(), f.end(), [&](double v) { return v >= cfg.fraction_level; }));
        rep.add(n, label, M, fmt::format("level={}", format_number(cfg.fraction_level)),
                "rate_fraction_at_level", f.empty() ? kNoM : good / static_cast<double>(f.size()));
      }
      rep.add(n, label, kNoM, "", "mean_j_n_size", mean(column(records, "j_n_size")));
      add_errors(rep, n, label, records);
      rep.traces[cell_label(n, label)] = std::move(records);
    }
  }
  return rep;
}

ExperimentReport run_oracle(const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentReport rep = new_report(cfg);
  for (std::size_t n : cfg.n_list) {
    const Setting s = make_setting(cfg, n);
    for (ScaleMethod method : cfg.methods) {
      if (method == ScaleMethod::hb) continue;
      const std::string label = to_string(method);
      const CriterionKind kind = criterion_kind(method);
      const double inf_d =
          minimize_on_grid(s.interval, [&](double c) {
            return deterministic_criterion(*s.prior, s.truth, c, kind);
          }).second;
      auto records = run_cell(cfg, n, label, [&](std::uint64_t seed, auto& out) {
        const CoefficientVector z = noise_coefficients(s.prior, seed);
        const CoefficientVector y(s.prior, s.truth.coeffs + z.coeffs);
        const ScaleEstimate est = select_scale(*s.prior, y, method, s.interval);
        const CriterionDecomposition d = decompose_criterion(*s.prior, s.truth, z, est.c_hat, kind);
        out.emplace_back("c_hat", est.c_hat);
        out.emplace_back("ratio", d.d() / inf_d);
        out.emplace_back("bias_variance", d.d1 / d.d2);
      });
      const auto ratio = column(records, "ratio");
      for (double eps : cfg.epsilons) {
        const double exceed = static_cast<double>(
            std::count_if(ratio.begin(), ratio.end(), [&](double r) { return r > 1.0 + eps; }));
        rep.add(n, label, kNoM, fmt::format("eps={}", format_number(eps)), "exceedance_rate",
                ratio.empty() ? kNoM : exceed / static_cast<double>(ratio.size()));
      }
      rep.add(n, label, kNoM, "", "inf_d", inf_d);
      rep.add(n, label, kNoM, "", "mean_ratio", mean(ratio));
      rep.add(n, label, kNoM, "", "median_ratio", median(ratio));
      const auto bv = column(records, "bias_variance");
      rep.add(n, label, kNoM, "", "mean_bias_variance", mean(bv));
      rep.add(n, label, kNoM, "", "max_bias_variance", bv.empty() ? kNoM : *std::max_element(bv.begin(), bv.end()));
      add_errors(rep, n, label, records);
      rep.traces[cell_label(n, label)] = std::move(records);
    }
  }
  return rep;
}

ExperimentReport run_hb_concentration(const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentReport rep = new_report(cfg);
  for (std::size_t n : cfg.n_list) {
    const Setting s = make_setting(cfg, n);
    const double N = static_cast<double>(s.prior->dim());
    const double rate = std::pow(N, -1.0 / (s.prior->m() + 1.0));
    const double c_two = minimize_on_grid(s.interval, [&](double c) {
                           return hb_target_two_lambda(*s.prior, s.truth, c, cfg.hb_lambda);
                         }).first;
    const double c_unit = minimize_on_grid(s.interval, [&](double c) {
                            return hb_target_unit(*s.prior, s.truth, c);
                          }).first;
    rep.add(n, "hb", kNoM, "two_lambda", "target_c", c_two);
    rep.add(n, "hb", kNoM, "unit", "target_c", c_unit);
    rep.add(n, "hb", kNoM, "", "interval_lo", s.interval.lo);
    auto records = run_cell(cfg, n, "hb", [&](std::uint64_t seed, auto& out) {
      const CoefficientVector z = noise_coefficients(s.prior, seed);
      const CoefficientVector y(s.prior, s.truth.coeffs + z.coeffs);
      const HBPosterior post(*s.prior, y, s.hb);
      out.emplace_back("median", post.quantile(0.5));
      for (double K : cfg.K_list) {
        out.emplace_back(m_key("mass_two_lambda", K), post.mass(c_two / K, c_two * K));
        out.emplace_back(m_key("mass_unit", K), post.mass(c_unit / K, c_unit * K));
      }
    });
    const auto med = column(records, "median");
    rep.add(n, "hb", kNoM, "", "median_c_median", median(med));
    rep.add(n, "hb", kNoM, "", "median_c_over_rate", median(med) / rate);
    for (double K : cfg.K_list) {
      for (const std::string target : {"two_lambda", "unit"}) {
        const auto mass = column(records, m_key("mass_" + target, K));
        const std::string param = fmt::format("{};K={}", target, format_number(K));
        rep.add(n, "hb", kNoM, param, "mean_mass", mean(mass));
        const double good = static_cast<double>(
            std::count_if(mass.begin(), mass.end(), [&](double m) { return m >= cfg.mass_level; }));
        rep.add(n, "hb", kNoM, param, "rate_mass_at_level",
                mass.empty() ? kNoM : good / static_cast<double>(mass.size()));
      }
    }
    add_errors(rep, n, "hb", records);
    rep.traces[cell_label(n, "hb")] = std::move(records);

    for (ScaleMethod method : cfg.methods) {
      if (method == ScaleMethod::hb) continue;
      const std::string label = to_string(method);
      auto eb = run_cell(cfg, n, label, [&](std::uint64_t seed, auto& out) {
        const CoefficientVector z = noise_coefficients(s.prior, seed);
        const CoefficientVector y(s.prior, s.truth.coeffs + z.coeffs);
        const double c = select_scale(*s.prior, y, method, s.interval).c_hat;
        out.emplace_back("c_hat", c);
        out.emplace_back("c_hat_over_lo", c / s.interval.lo);
      });
      rep.add(n, label, kNoM, "", "median_c_hat", median(column(eb, "c_hat")));
      rep.add(n, label, kNoM, "", "median_c_hat_over_lo", median(column(eb, "c_hat_over_lo")));
      add_errors(rep, n, label, eb);
      rep.traces[cell_label(n, label)] = std::move(eb);
    }
  }
  return rep;
}

ExperimentReport run_prior_polished(const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentReport rep = new_report(cfg);
  const PolishedTailParams pt{cfg.pt_L, cfg.pt_rho, cfg.pt_m_min};
  for (std::size_t n : cfg.n_list) {
    const PriorPtr prior = prior_for(cfg.prior, n);
    auto records = run_cell(cfg, n, "prior_draw", [&](std::uint64_t seed, auto& out) {
      const CoefficientVector w = prior_draw(prior, cfg.truth.alpha, cfg.truth.delta, seed);
      const PolishedTailResult r = polished_tail_discrete(w, pt);
      out.emplace_back("pass", r.holds ? 1.0 : 0.0);
      if (r.first_violation) out.emplace_back("violation_m", static_cast<double>(*r.first_violation));
    });
    rep.add(n, "prior_draw", kNoM, "", "pass_rate", mean(column(records, "pass")));
    // Histogram of first violations in dyadic bins [2^k, 2^(k+1)).
    std::map<std::size_t, std::size_t> bins;
    for (double m : column(records, "violation_m")) {
      std::size_t lo = 1;
      while (lo * 2 <= static_cast<std::size_t>(m)) lo *= 2;
      ++bins[lo];
    }
    for (const auto& [lo, count] : bins)
      rep.add(n, "prior_draw", kNoM, fmt::format("m=[{};{})", lo, 2 * lo), "violation_histogram",
              static_cast<double>(count));
    add_errors(rep, n, "prior_draw", records);
    rep.traces[cell_label(n, "prior_draw")] = std::move(records);

    rep.add(n, "zero_control", kNoM, "", "pass",
            polished_tail_discrete(CoefficientVector::zero(prior), pt).holds ? 1.0 : 0.0);
    const PolishedTailResult gap = polished_tail_discrete(gap_sequence(prior), pt);
    rep.add(n, "gap_control", kNoM, "", "pass", gap.holds ? 1.0 : 0.0);
    rep.add(n, "gap_control", kNoM, "", "first_violation",
            gap.first_violation ? static_cast<double>(*gap.first_violation) : kNoM);
  }
  return rep;
}

ExperimentReport run_d2_asymptotics(const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentReport rep = new_report(cfg);
  const double m = prior_for(cfg.prior, cfg.n_list.front())->m();
  // Power-law spectra delta n / j^m give D2R ~ C_{0,2,m} (delta c n)^(1/m).
  const double constant = power_integral(0.0, 2.0, m) * std::pow(cfg.prior.delta, 1.0 / m);
  rep.add(0, "d2", kNoM, "", "quadrature_constant", constant);
  for (std::size_t n : cfg.n_list) {
    const PriorPtr prior = prior_for(cfg.prior, n);
    const bool two_d = prior->is_two_dimensional();
    const double N = static_cast<double>(prior->dim());
    const ScaleInterval iv = ScaleInterval::for_prior(*prior, cfg.d2_scales);
    const CoefficientVector zero = CoefficientVector::zero(prior);
    std::vector<double> plain;
    std::vector<double> corrected;
    for (double c : iv.grid) {
      const double d2r = deterministic_criterion(*prior, zero, c, CriterionKind::risk);
      const double d2l = deterministic_criterion(*prior, zero, c, CriterionKind::likelihood);
      const double s2 = posterior_total_variance(*prior, c);
      const double base = std::pow(c * N, 1.0 / m);
      const std::string param = fmt::format("c={}", format_number(c));
      rep.add(n, "d2", kNoM, param, "d2_risk", d2r);
      rep.add(n, "d2", kNoM, param, "d2_lik", d2l);
      rep.add(n, "d2", kNoM, param, "s2", s2);
      rep.add(n, "d2", kNoM, param, "risk_over_rate", d2r / (base * constant));
      rep.add(n, "d2", kNoM, param, "risk_over_lik", d2r / d2l);
      rep.add(n, "d2", kNoM, param, "s2_over_risk", s2 / d2r);
      if (two_d) {
        const double corr = d2r / (base * (1.0 + std::log(c * N)));
        rep.add(n, "d2", kNoM, param, "risk_over_log_rate", corr);
        if (c * N <= std::pow(static_cast<double>(n), m)) {
          plain.push_back(d2r / base);
          corrected.push_back(corr);
        }
      }
    }
    if (two_d && !plain.empty()) {
      const auto [pl, ph] = std::minmax_element(plain.begin(), plain.end());
      const auto [cl, ch] = std::minmax_element(corrected.begin(), corrected.end());
      rep.add(n, "d2", kNoM, "", "band_without_log", *ph / *pl);
      rep.add(n, "d2", kNoM, "", "band_with_log", *ch / *cl);
    }
  }
  return rep;
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  switch (config.experiment) {
    case ExperimentKind::coverage: return run_coverage(config);
    case ExperimentKind::pointwise_coverage: return run_pointwise_coverage(config);
    case ExperimentKind::rate: return run_rate(config);
    case ExperimentKind::oracle: return run_oracle(config);
    case ExperimentKind::hb_concentration: return run_hb_concentration(config);
    case ExperimentKind::prior_polished: return run_prior_polished(config);
    case ExperimentKind::d2_asymptotics: return run_d2_asymptotics(config);
  }
  throw std::invalid_argument("unknown experiment");
}

}  // namespace gpsim
