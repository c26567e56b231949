#include "gpsim/posterior.hpp"

#include "gpsim/quantiles.hpp"
#include "gpsim/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gpsim {

std::string to_string(RadiusKind kind) {
  return kind == RadiusKind::monte_carlo ? "monte_carlo" : "satterthwaite";
}

RadiusKind radius_kind_from_string(const std::string& s) {
  if (s == "monte_carlo") return RadiusKind::monte_carlo;
  if (s == "satterthwaite") return RadiusKind::satterthwaite;
  throw std::invalid_argument("unknown radius method '" + s + "'");
}

void RadiusMethod::validate() const {
  if (kind == RadiusKind::monte_carlo && mc_draws < 10000)
    throw std::invalid_argument("monte_carlo radius needs at least 10^4 draws");
}

namespace {

void require_nonnegative(double c) {
  if (!(c >= 0.0) || !std::isfinite(c)) throw std::domain_error("scale c must be finite and >= 0");
}

}  // namespace

Eigen::VectorXd shrinkage_weights(const SpectralPrior& prior, double c) {
  require_nonnegative(c);
  Eigen::VectorXd w(static_cast<Eigen::Index>(prior.dim()));
  for (std::size_t j = 0; j < prior.dim(); ++j) {
    const double cl = c * prior.eigenvalue(j);
    w[static_cast<Eigen::Index>(j)] = cl / (1.0 + cl);
  }
  return w;
}

CoefficientVector posterior_mean(const PriorPtr& prior, double c, const CoefficientVector& ytilde) {
  if (!ytilde.prior || !prior->same_basis(*ytilde.prior))
    throw std::invalid_argument("posterior_mean: observation uses a different eigenbasis");
  return CoefficientVector(prior, shrinkage_weights(*prior, c).cwiseProduct(ytilde.coeffs));
}

CoefficientVector posterior_mean(const PriorPtr& prior, double c, const Observation& obs) {
  return posterior_mean(prior, c, transformed_observation(prior, obs));
}

double posterior_total_variance(const SpectralPrior& prior, double c) {
  return shrinkage_weights(prior, c).sum();
}

double posterior_pointwise_variance(const SpectralPrior& prior, double c, std::size_t i) {
  if (i >= prior.dim()) throw std::out_of_range("posterior_pointwise_variance: index out of range");
  const Eigen::VectorXd w = shrinkage_weights(prior, c);
  double acc = 0.0;
  for (std::size_t j = 0; j < prior.dim(); ++j) {
    const double e = prior.basis_entry(j, i);
    acc += w[static_cast<Eigen::Index>(j)] * e * e;
  }
  return acc;
}

Eigen::VectorXd posterior_pointwise_variances(const SpectralPrior& prior, double c) {
  const Eigen::VectorXd w = shrinkage_weights(prior, c);
  if (prior.dim() <= kDenseCap) return prior.basis_matrix().array().square().matrix() * w;
  Eigen::VectorXd out(w.size());
  for (std::size_t i = 0; i < prior.dim(); ++i) out[static_cast<Eigen::Index>(i)] = posterior_pointwise_variance(prior, c, i);
  return out;
}

double weighted_chi_square_radius(const Eigen::VectorXd& weights, double eta,
                                  const RadiusMethod& method) {
  if (!(eta > 0.0 && eta < 1.0)) throw std::domain_error("credibility level must lie in (0, 1)");
  method.validate();
  const double s1 = weights.sum();
  if (!(s1 > 0.0)) return 0.0;

  if (method.kind == RadiusKind::satterthwaite) {
    const double s2 = weights.squaredNorm();
    const double k = s1 * s1 / s2;
    const double g = s2 / s1;
    return std::sqrt(g * chi_square_quantile(k, eta));
  }

  Rng rng(mix_seed({method.mc_seed, double_bits(eta), double_bits(s1),
                    static_cast<std::uint64_t>(weights.size())}));
  std::vector<double> draws(method.mc_draws);
  for (double& d : draws) {
    double acc = 0.0;
    for (Eigen::Index j = 0; j < weights.size(); ++j) {
      const double z = rng.normal();
      acc += weights[j] * z * z;
    }
    d = acc;
  }
  const auto rank = static_cast<std::size_t>(std::ceil(eta * static_cast<double>(draws.size())));
  const auto nth = draws.begin() + static_cast<std::ptrdiff_t>(std::max<std::size_t>(rank, 1) - 1);
  std::nth_element(draws.begin(), nth, draws.end());
  return std::sqrt(*nth);
}

double credible_radius(const SpectralPrior& prior, double c, double eta, const RadiusMethod& method) {
  if (!(c > 0.0)) throw std::domain_error("credible_radius: c must be > 0");
  return weighted_chi_square_radius(shrinkage_weights(prior, c), eta, method);
}

double pointwise_radius(const SpectralPrior& prior, double c, double eta, std::size_t i) {
  if (!(eta > 0.0 && eta < 1.0)) throw std::domain_error("credibility level must lie in (0, 1)");
  return normal_quantile(0.5 * (1.0 + eta)) * std::sqrt(posterior_pointwise_variance(prior, c, i));
}

double PosteriorSummary::radius(double eta, const RadiusMethod& method) {
  if (auto it = radius_cache.find(eta); it != radius_cache.end()) return it->second;
  const double r = credible_radius(*mean_coeffs.prior, c, eta, method);
  radius_cache.emplace(eta, r);
  return r;
}

PosteriorSummary summarize_posterior(const PriorPtr& prior, double c, const CoefficientVector& ytilde) {
  PosteriorSummary s;
  s.c = c;
  s.mean_coeffs = posterior_mean(prior, c, ytilde);
  s.total_variance = posterior_total_variance(*prior, c);
  s.pointwise_variance = posterior_pointwise_variances(*prior, c);
  return s;
}

}  // namespace gpsim
