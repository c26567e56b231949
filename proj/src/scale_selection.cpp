#include "gpsim/scale_selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace gpsim {

ScaleInterval ScaleInterval::make(double lo, double hi, std::size_t points) {
  if (!(lo > 0.0) || !(hi > lo) || !std::isfinite(hi))
    throw std::invalid_argument("scale interval needs 0 < lo < hi < inf");
  if (points < 2) throw std::invalid_argument("scale grid needs at least 2 points");
  ScaleInterval s;
  s.lo = lo;
  s.hi = hi;
  s.grid.resize(points);
  const double a = std::log(lo);
  const double step = (std::log(hi) - a) / static_cast<double>(points - 1);
  for (std::size_t k = 0; k < points; ++k) s.grid[k] = std::exp(a + step * static_cast<double>(k));
  s.grid.front() = lo;
  s.grid.back() = hi;
  return s;
}

ScaleInterval ScaleInterval::for_prior(const SpectralPrior& prior, std::size_t points) {
  const double N = static_cast<double>(prior.dim());
  if (N < 2) throw std::invalid_argument("scale interval needs at least 2 coordinates");
  return make(std::log(N) / N, std::pow(N, prior.m() - 1.0), points);
}

double ScaleInterval::geometric_mid() const { return std::sqrt(lo * hi); }

std::string to_string(CriterionKind kind) { return kind == CriterionKind::risk ? "risk" : "likelihood"; }

std::string to_string(ScaleMethod method) {
  switch (method) {
    case ScaleMethod::lik_eb: return "lik_eb";
    case ScaleMethod::risk_eb: return "risk_eb";
    case ScaleMethod::hb: return "hb";
  }
  return "unknown";
}

ScaleMethod scale_method_from_string(const std::string& s) {
  if (s == "lik_eb") return ScaleMethod::lik_eb;
  if (s == "risk_eb") return ScaleMethod::risk_eb;
  if (s == "hb") return ScaleMethod::hb;
  throw std::invalid_argument("unknown method '" + s + "' (expected lik_eb, risk_eb or hb)");
}

CriterionKind criterion_kind(ScaleMethod method) {
  if (method == ScaleMethod::risk_eb) return CriterionKind::risk;
  if (method == ScaleMethod::lik_eb) return CriterionKind::likelihood;
  throw std::invalid_argument("hb has no empirical Bayes criterion");
}

namespace {

void require_positive(double c) {
  if (!(c > 0.0) || !std::isfinite(c)) throw std::domain_error("scale c must be finite and > 0");
}

void require_match(const SpectralPrior& prior, const CoefficientVector& v) {
  if (!v.prior || !prior.same_basis(*v.prior))
    throw std::invalid_argument("coefficient vector does not match the prior");
}

}  // namespace

double likelihood_criterion(const SpectralPrior& prior, const CoefficientVector& ytilde, double c) {
  require_positive(c);
  require_match(prior, ytilde);
  double acc = 0.0;
  for (std::size_t j = 0; j < prior.dim(); ++j) {
    const double cl = c * prior.eigenvalue(j);
    const double y = ytilde[j];
    acc += std::log1p(cl) + y * y / (1.0 + cl);
  }
  return acc;
}

double risk_criterion(const SpectralPrior& prior, const CoefficientVector& ytilde, double c) {
  require_positive(c);
  require_match(prior, ytilde);
  double acc = 0.0;
  for (std::size_t j = 0; j < prior.dim(); ++j) {
    const double cl = c * prior.eigenvalue(j);
    const double y = ytilde[j];
    const double q = 1.0 + cl;
    // (cl^2 - 1) / q^2 = (cl - 1) / q avoids squaring a large cl.
    acc += (cl - 1.0) / q + y * y / (q * q);
  }
  return acc;
}

double criterion(const SpectralPrior& prior, const CoefficientVector& ytilde, double c,
                 CriterionKind kind) {
  return kind == CriterionKind::risk ? risk_criterion(prior, ytilde, c)
                                     : likelihood_criterion(prior, ytilde, c);
}

std::pair<double, double> minimize_on_grid(const ScaleInterval& interval,
                                           const std::function<double(double)>& fn,
                                           std::vector<std::pair<double, double>>* trace) {
  const auto& grid = interval.grid;
  if (grid.empty()) throw std::invalid_argument("empty scale grid");
  std::size_t best = 0;
  double best_val = std::numeric_limits<double>::infinity();
  if (trace) trace->clear();
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double v = fn(grid[k]);
    if (trace) trace->emplace_back(grid[k], v);
    if (v < best_val) {
      best_val = v;
      best = k;
    }
  }
  if (!std::isfinite(best_val)) throw std::runtime_error("criterion is not finite on the scale grid");

  double a = std::log(grid[best == 0 ? 0 : best - 1]);
  double b = std::log(grid[std::min(best + 1, grid.size() - 1)]);
  if (!(b > a)) return {grid[best], best_val};
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = fn(std::exp(x1));
  double f2 = fn(std::exp(x2));
  for (int it = 0; it < 80 && b - a > 1e-12; ++it) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = fn(std::exp(x1));
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = fn(std::exp(x2));
    }
  }
  const double t = f1 <= f2 ? x1 : x2;
  const double ft = std::min(f1, f2);
  const double c = std::clamp(std::exp(t), interval.lo, interval.hi);
  if (ft < best_val) return {c, ft};
  return {grid[best], best_val};
}

ScaleEstimate select_scale(const SpectralPrior& prior, const CoefficientVector& ytilde,
                           ScaleMethod method, const ScaleInterval& interval) {
  const CriterionKind kind = criterion_kind(method);
  require_match(prior, ytilde);
  ScaleEstimate est;
  est.method = method;
  const auto [c, v] = minimize_on_grid(
      interval, [&](double cc) { return criterion(prior, ytilde, cc, kind); }, &est.criterion_trace);
  est.c_hat = c;
  est.criterion_min = v;
  return est;
}

CriterionDecomposition decompose_criterion(const SpectralPrior& prior, const CoefficientVector& f,
                                           const CoefficientVector& noise, double c,
                                           CriterionKind kind) {
  require_positive(c);
  require_match(prior, f);
  require_match(prior, noise);
  CriterionDecomposition d;
  d.c = c;
  d.kind = kind;
  for (std::size_t j = 0; j < prior.dim(); ++j) {
    const double cl = c * prior.eigenvalue(j);
    const double q = 1.0 + cl;
    const double fj = f[j];
    const double z = noise[j];
    if (kind == CriterionKind::risk) {
      d.d1 += fj * fj / (q * q);
      d.d2 += (cl / q) * (cl / q);
      d.r1 += 2.0 * z * fj / (q * q);
      // 1/q^2 - 1 = -cl (2 + cl) / q^2
      d.r2 -= (z * z - 1.0) * cl * (2.0 + cl) / (q * q);
    } else {
      d.d1 += fj * fj / q;
      d.d2 += std::log1p(cl) - cl / q;
      d.r1 += 2.0 * z * fj / q;
      d.r2 -= (z * z - 1.0) * cl / q;
    }
  }
  return d;
}

double deterministic_criterion(const SpectralPrior& prior, const CoefficientVector& f, double c,
                               CriterionKind kind) {
  require_positive(c);
  require_match(prior, f);
  double acc = 0.0;
  for (std::size_t j = 0; j < prior.dim(); ++j) {
    const double cl = c * prior.eigenvalue(j);
    const double q = 1.0 + cl;
    const double fj = f[j];
    if (kind == CriterionKind::risk)
      acc += (fj * fj + cl * cl) / (q * q);
    else
      acc += fj * fj / q + std::log1p(cl) - cl / q;
  }
  return acc;
}

SquareNormDecomposition square_norm_decomposition(const SpectralPrior& prior,
                                                  const CoefficientVector& f,
                                                  const CoefficientVector& noise, double c) {
  if (!(c >= 0.0)) throw std::domain_error("scale c must be >= 0");
  require_match(prior, f);
  require_match(prior, noise);
  SquareNormDecomposition s;
  for (std::size_t j = 0; j < prior.dim(); ++j) {
    const double cl = c * prior.eigenvalue(j);
    const double q2 = (1.0 + cl) * (1.0 + cl);
    const double fj = f[j];
    const double z = noise[j];
    s.d1 += fj * fj / q2;
    s.d2 += cl * cl / q2;
    s.r3 -= 2.0 * cl * z * fj / q2;
    s.r4 += cl * cl * (z * z - 1.0) / q2;
  }
  return s;
}

void HBPrior::validate() const {
  if (!(kappa > 0.0) || !(lambda > 0.0)) throw std::invalid_argument("HB prior needs kappa, lambda > 0");
  if (support.grid.size() < 2) throw std::invalid_argument("HB prior needs a support grid");
}

double hb_log_density(const SpectralPrior& prior, const CoefficientVector& ytilde,
                      const HBPrior& hb, double c) {
  hb.validate();
  // Allow a relative slack so that grid endpoints produced by exp(log(.)) qualify.
  if (!(c >= hb.support.lo * (1 - 1e-12) && c <= hb.support.hi * (1 + 1e-12)))
    throw std::domain_error("hb_log_density: c outside the prior support");
  return -0.5 * likelihood_criterion(prior, ytilde, c) - (1.0 + hb.kappa) * std::log(c) -
         hb.lambda / c;
}

HBPosterior::HBPosterior(const SpectralPrior& prior, const CoefficientVector& ytilde,
                         const HBPrior& hb) {
  hb.validate();
  grid_ = hb.support.grid;
  const std::size_t G = grid_.size();
  log_grid_.resize(G);
  std::vector<double> logw(G);
  double peak = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < G; ++k) {
    log_grid_[k] = std::log(grid_[k]);
    // Density of t = log c carries the Jacobian dc/dt = c.
    logw[k] = hb_log_density(prior, ytilde, hb, grid_[k]) + log_grid_[k];
    if (!std::isfinite(logw[k])) throw std::runtime_error("HB log density is not finite");
    peak = std::max(peak, logw[k]);
  }
  density_.resize(G);
  for (std::size_t k = 0; k < G; ++k) density_[k] = std::exp(logw[k] - peak);
  cdf_.assign(G, 0.0);
  for (std::size_t k = 1; k < G; ++k)
    cdf_[k] = cdf_[k - 1] + 0.5 * (density_[k] + density_[k - 1]) * (log_grid_[k] - log_grid_[k - 1]);
  const double total = cdf_.back();
  if (!(total > 0.0)) throw std::runtime_error("HB posterior has zero mass on the grid");
  for (std::size_t k = 0; k < G; ++k) {
    density_[k] /= total;
    cdf_[k] /= total;
  }
  cdf_.back() = 1.0;
}

double HBPosterior::cdf_at(double c) const {
  if (c <= grid_.front()) return 0.0;
  if (c >= grid_.back()) return 1.0;
  const double t = std::log(c);
  const auto it = std::upper_bound(log_grid_.begin(), log_grid_.end(), t);
  const std::size_t k = static_cast<std::size_t>(it - log_grid_.begin());
  const double u = (t - log_grid_[k - 1]) / (log_grid_[k] - log_grid_[k - 1]);
  return cdf_[k - 1] + u * (cdf_[k] - cdf_[k - 1]);
}

double HBPosterior::quantile(double p) const {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("HB quantile level must lie in (0, 1)");
  const auto it = std::lower_bound(cdf_.begin(), cdf_.end(), p);
  const std::size_t k = static_cast<std::size_t>(it - cdf_.begin());
  if (k == 0) return grid_.front();
  const double span = cdf_[k] - cdf_[k - 1];
  const double u = span > 0.0 ? (p - cdf_[k - 1]) / span : 0.0;
  return std::exp(log_grid_[k - 1] + u * (log_grid_[k] - log_grid_[k - 1]));
}

std::vector<double> hb_posterior_quantiles(const SpectralPrior& prior,
                                           const CoefficientVector& ytilde, const HBPrior& hb,
                                           const std::vector<double>& probs) {
  for (double p : probs)
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("HB quantile level must lie in (0, 1)");
  const HBPosterior post(prior, ytilde, hb);
  std::vector<double> out;
  out.reserve(probs.size());
  for (double p : probs) out.push_back(post.quantile(p));
  return out;
}

double hb_target_two_lambda(const SpectralPrior& prior, const CoefficientVector& f, double c,
                            double lambda) {
  return deterministic_criterion(prior, f, c, CriterionKind::likelihood) + 2.0 * lambda / c;
}

double hb_target_unit(const SpectralPrior& prior, const CoefficientVector& f, double c) {
  return deterministic_criterion(prior, f, c, CriterionKind::likelihood) + 1.0 / c;
}

}  // namespace gpsim
