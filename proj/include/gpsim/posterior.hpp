#pragma once

#include "gpsim/sequence_model.hpp"

#include <map>
#include <vector>

namespace gpsim {

enum class RadiusKind { monte_carlo, satterthwaite };

std::string to_string(RadiusKind kind);
RadiusKind radius_kind_from_string(const std::string& s);

/// How the weighted chi-square quantile behind a credible radius is computed.
struct RadiusMethod {
  RadiusKind kind = RadiusKind::monte_carlo;
  std::size_t mc_draws = 100000;
  std::uint64_t mc_seed = 0x5eed;

  static RadiusMethod monte_carlo(std::size_t draws = 100000, std::uint64_t seed = 0x5eed) {
    return {RadiusKind::monte_carlo, draws, seed};
  }
  static RadiusMethod satterthwaite() { return {RadiusKind::satterthwaite, 0, 0}; }
  void validate() const;
};

/// Shrinkage weights w_j = c lambda_j / (1 + c lambda_j).
Eigen::VectorXd shrinkage_weights(const SpectralPrior& prior, double c);

CoefficientVector posterior_mean(const PriorPtr& prior, double c, const CoefficientVector& ytilde);
CoefficientVector posterior_mean(const PriorPtr& prior, double c, const Observation& obs);

/// s_n^2(c), the trace of the posterior covariance.
double posterior_total_variance(const SpectralPrior& prior, double c);

/// Posterior variance at design index i (0-based).
double posterior_pointwise_variance(const SpectralPrior& prior, double c, std::size_t i);
/// All pointwise variances at once.
Eigen::VectorXd posterior_pointwise_variances(const SpectralPrior& prior, double c);

/// eta-quantile of the square root of sum_j w_j Z_j^2.
double credible_radius(const SpectralPrior& prior, double c, double eta, const RadiusMethod& method);
/// Same, for explicit weights.
double weighted_chi_square_radius(const Eigen::VectorXd& weights, double eta,
                                  const RadiusMethod& method);

/// z_eta * sqrt(pointwise variance), z_eta the (1 + eta) / 2 normal quantile.
double pointwise_radius(const SpectralPrior& prior, double c, double eta, std::size_t i);

struct PosteriorSummary {
  double c = 0.0;
  CoefficientVector mean_coeffs;
  double total_variance = 0.0;
  Eigen::VectorXd pointwise_variance;
  std::map<double, double> radius_cache;

  /// Cached radius for `eta`, computed on first request.
  double radius(double eta, const RadiusMethod& method);
};

PosteriorSummary summarize_posterior(const PriorPtr& prior, double c,
                                     const CoefficientVector& ytilde);

}  // namespace gpsim
