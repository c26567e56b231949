#include "gpsim/credible_sets.hpp"

#include "gpsim/quantiles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gpsim {

namespace {

void check_level(double eta) {
  if (!(eta > 0.0 && eta < 1.0)) throw std::domain_error("credibility level must lie in (0, 1)");
}

void check_inflation(double M) {
  if (!(M >= 0.0) || !std::isfinite(M)) throw std::domain_error("blow-up factor M must be >= 0");
}

}  // namespace

CredibleBall credible_ball_at(const PriorPtr& prior, const CoefficientVector& ytilde, double c,
                              double eta, double M, const RadiusMethod& radius_method) {
  check_level(eta);
  check_inflation(M);
  CredibleBall ball;
  ball.center = posterior_mean(prior, c, ytilde);
  ball.c_hat = c;
  ball.M = M;
  ball.eta = eta;
  ball.radius = M * credible_radius(*prior, c, eta, radius_method);
  return ball;
}

CredibleBall eb_credible_ball(const PriorPtr& prior, const CoefficientVector& ytilde,
                              ScaleMethod method, double eta, double M,
                              const RadiusMethod& radius_method, const ScaleInterval& interval) {
  const ScaleEstimate est = select_scale(*prior, ytilde, method, interval);
  return credible_ball_at(prior, ytilde, est.c_hat, eta, M, radius_method);
}

bool ball_contains(const CredibleBall& ball, const CoefficientVector& f) {
  require_same_basis(ball.center, f);
  return (f.coeffs - ball.center.coeffs).norm() < ball.radius;
}

HBCredibleSet hb_credible_set_between(const PriorPtr& prior, const CoefficientVector& ytilde,
                                      double c_lo, double c_hi, double eta1, double eta2, double M,
                                      const RadiusMethod& radius_method, std::size_t subgrid_size) {
  check_level(eta1);
  check_level(eta2);
  check_inflation(M);
  if (!(c_lo > 0.0) || !(c_lo <= c_hi)) throw std::invalid_argument("HB set needs 0 < c_lo <= c_hi");
  if (subgrid_size < 2) throw std::invalid_argument("HB sub-grid needs at least 2 scales");
  HBCredibleSet set;
  set.c_lo = c_lo;
  set.c_hi = c_hi;
  set.M = M;
  set.eta1 = eta1;
  set.eta2 = eta2;
  const std::size_t count = c_hi > c_lo ? subgrid_size : 1;
  const double a = std::log(c_lo);
  const double step = count > 1 ? (std::log(c_hi) - a) / static_cast<double>(count - 1) : 0.0;
  for (std::size_t k = 0; k < count; ++k) {
    double c = std::exp(a + step * static_cast<double>(k));
    if (k == 0) c = c_lo;
    if (k + 1 == count) c = c_hi;
    set.per_scale.push_back(
        {c, posterior_mean(prior, c, ytilde), M * credible_radius(*prior, c, eta2, radius_method)});
  }
  return set;
}

HBCredibleSet hb_credible_set(const PriorPtr& prior, const CoefficientVector& ytilde,
                              const HBPrior& hb, double eta1, double eta2, double M,
                              const RadiusMethod& radius_method, std::size_t subgrid_size) {
  check_level(eta1);
  const auto q = hb_posterior_quantiles(*prior, ytilde, hb, {0.5 * (1.0 - eta1), 0.5 * (1.0 + eta1)});
  return hb_credible_set_between(prior, ytilde, q[0], q[1], eta1, eta2, M, radius_method,
                                 subgrid_size);
}

bool hb_contains(const HBCredibleSet& set, const CoefficientVector& f) {
  for (const ScaleBall& b : set.per_scale) {
    require_same_basis(b.center, f);
    if ((f.coeffs - b.center.coeffs).norm() < b.radius) return true;
  }
  return false;
}

bool IntervalFamily::contains(std::size_t i, double value) const {
  const auto row = static_cast<Eigen::Index>(i);
  for (Eigen::Index s = 0; s < centers.cols(); ++s)
    if (std::abs(value - centers(row, s)) < half_widths(row, s)) return true;
  return false;
}

std::vector<std::size_t> qualifying_indices(const Eigen::VectorXd& pointwise_variance, double C) {
  if (!(C >= 0.0)) throw std::domain_error("J_n constant C must be >= 0");
  const double threshold = C / static_cast<double>(pointwise_variance.size()) * pointwise_variance.sum();
  std::vector<std::size_t> out;
  for (Eigen::Index i = 0; i < pointwise_variance.size(); ++i)
    if (pointwise_variance[i] >= threshold) out.push_back(static_cast<std::size_t>(i));
  return out;
}

IntervalFamily pointwise_intervals(const PriorPtr& prior, const CoefficientVector& ytilde,
                                   IntervalSource source, const std::vector<double>& scales,
                                   double eta, double M, double C) {
  check_level(eta);
  check_inflation(M);
  if (scales.empty()) throw std::invalid_argument("pointwise_intervals: no scales given");
  if (source == IntervalSource::eb_scale && scales.size() != 1)
    throw std::invalid_argument("pointwise_intervals: an EB family uses exactly one scale");
  IntervalFamily fam;
  fam.source = source;
  fam.scales = scales;
  fam.M = M;
  fam.eta = eta;
  fam.C = C;
  const auto N = static_cast<Eigen::Index>(prior->dim());
  const auto S = static_cast<Eigen::Index>(scales.size());
  fam.centers.resize(N, S);
  fam.half_widths.resize(N, S);
  const double z = normal_quantile(0.5 * (1.0 + eta));
  for (Eigen::Index s = 0; s < S; ++s) {
    const double c = scales[static_cast<std::size_t>(s)];
    fam.centers.col(s) = from_coefficients(posterior_mean(prior, c, ytilde));
    fam.half_widths.col(s) = M * z * posterior_pointwise_variances(*prior, c).cwiseSqrt();
  }
  const auto [lo, hi] = std::minmax_element(scales.begin(), scales.end());
  fam.j_n = qualifying_indices(posterior_pointwise_variances(*prior, std::sqrt(*lo * *hi)), C);
  return fam;
}

double fraction_covered(const IntervalFamily& intervals, const Eigen::VectorXd& truth_values) {
  if (truth_values.size() != intervals.centers.rows())
    throw std::invalid_argument("fraction_covered: truth is on a different grid");
  std::size_t hits = 0;
  for (std::size_t i : intervals.j_n)
    if (intervals.contains(i, truth_values[static_cast<Eigen::Index>(i)])) ++hits;
  return static_cast<double>(hits) / static_cast<double>(truth_values.size());
}

double set_diameter(const CredibleBall& ball) { return 2.0 * ball.radius; }

double set_diameter(const HBCredibleSet& set) {
  double best = 0.0;
  const auto& b = set.per_scale;
  for (std::size_t p = 0; p < b.size(); ++p)
    for (std::size_t q = p; q < b.size(); ++q)
      best = std::max(best, (b[p].center.coeffs - b[q].center.coeffs).norm() + b[p].radius + b[q].radius);
  return best;
}

nlohmann::json to_json(const CredibleBall& ball) {
  return {{"type", "eb_ball"}, {"c", ball.c_hat}, {"M", ball.M}, {"eta", ball.eta},
          {"radius", ball.radius}};
}

nlohmann::json to_json(const HBCredibleSet& set) {
  nlohmann::json scales = nlohmann::json::array();
  nlohmann::json radii = nlohmann::json::array();
  for (const ScaleBall& b : set.per_scale) {
    scales.push_back(b.c);
    radii.push_back(b.radius);
  }
  return {{"type", "hb_union"}, {"c", {set.c_lo, set.c_hi}}, {"M", set.M},
          {"eta", {set.eta1, set.eta2}}, {"scales", scales}, {"radius", radii}};
}

}  // namespace gpsim
