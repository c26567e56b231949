#pragma once

#include "gpsim/sequence_model.hpp"

#include <functional>
#include <string>
#include <vector>

namespace gpsim {

inline constexpr std::size_t kDefaultGridSize = 400;

/// Scale interval [lo, hi] with a log-spaced evaluation grid whose endpoints are lo and hi.
struct ScaleInterval {
  double lo = 0.0;
  double hi = 0.0;
  std::vector<double> grid;

  static ScaleInterval make(double lo, double hi, std::size_t points = kDefaultGridSize);
  /// [log N / N, N^(m-1)] with N the total coordinate count of the prior.
  static ScaleInterval for_prior(const SpectralPrior& prior, std::size_t points = kDefaultGridSize);

  bool contains(double c) const { return c >= lo && c <= hi; }
  double geometric_mid() const;
};

enum class CriterionKind { risk, likelihood };
enum class ScaleMethod { lik_eb, risk_eb, hb };

std::string to_string(CriterionKind kind);
std::string to_string(ScaleMethod method);
ScaleMethod scale_method_from_string(const std::string& s);
CriterionKind criterion_kind(ScaleMethod method);

/// sum_j log(1 + c lambda_j) + Y~_j^2 / (1 + c lambda_j).
double likelihood_criterion(const SpectralPrior& prior, const CoefficientVector& ytilde, double c);
/// sum_j ((c lambda_j)^2 - 1 + Y~_j^2) / (1 + c lambda_j)^2.
double risk_criterion(const SpectralPrior& prior, const CoefficientVector& ytilde, double c);
double criterion(const SpectralPrior& prior, const CoefficientVector& ytilde, double c,
                 CriterionKind kind);

struct ScaleEstimate {
  double c_hat = 0.0;
  ScaleMethod method = ScaleMethod::lik_eb;
  double criterion_min = 0.0;
  std::vector<std::pair<double, double>> criterion_trace;
};

/// Minimiser of a scalar function over the interval: grid argmin (first minimum wins),
/// then one golden-section pass in log c over the neighbouring cells, kept only if it
/// improves strictly on the grid value.
std::pair<double, double> minimize_on_grid(const ScaleInterval& interval,
                                           const std::function<double(double)>& fn,
                                           std::vector<std::pair<double, double>>* trace = nullptr);

/// Empirical Bayes scale. `method` must be lik_eb or risk_eb.
ScaleEstimate select_scale(const SpectralPrior& prior, const CoefficientVector& ytilde,
                           ScaleMethod method, const ScaleInterval& interval);

/// Deterministic and remainder parts of an EB criterion at scale c, with truth f and noise Z
/// (both as eigenbasis coefficients).
struct CriterionDecomposition {
  double c = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
  double r1 = 0.0;
  double r2 = 0.0;
  CriterionKind kind = CriterionKind::risk;

  double d() const { return d1 + d2; }
  double remainder() const { return r1 + r2; }
};

CriterionDecomposition decompose_criterion(const SpectralPrior& prior, const CoefficientVector& f,
                                           const CoefficientVector& noise, double c,
                                           CriterionKind kind);

/// The D part alone (no noise needed).
double deterministic_criterion(const SpectralPrior& prior, const CoefficientVector& f, double c,
                               CriterionKind kind);

/// Split of the loss ||f_hat_c - f||^2 into D1 + D2 + R3 + R4 (risk-kind D terms).
struct SquareNormDecomposition {
  double d1 = 0.0;
  double d2 = 0.0;
  double r3 = 0.0;
  double r4 = 0.0;
  double total() const { return d1 + d2 + r3 + r4; }
};

SquareNormDecomposition square_norm_decomposition(const SpectralPrior& prior,
                                                  const CoefficientVector& f,
                                                  const CoefficientVector& noise, double c);

/// Inverse-gamma hyperprior on c truncated to `support`.
struct HBPrior {
  double kappa = 1.0;
  double lambda = 1.0;
  ScaleInterval support;

  void validate() const;
};

/// Unnormalised log posterior density of c (with respect to dc).
double hb_log_density(const SpectralPrior& prior, const CoefficientVector& ytilde,
                      const HBPrior& hb, double c);

/// Grid posterior of c, normalised by trapezoid quadrature in t = log c.
class HBPosterior {
public:
  HBPosterior(const SpectralPrior& prior, const CoefficientVector& ytilde, const HBPrior& hb);

  const std::vector<double>& grid() const { return grid_; }
  /// Normalised density of t = log c at the grid points.
  const std::vector<double>& density() const { return density_; }
  const std::vector<double>& cdf() const { return cdf_; }

  double cdf_at(double c) const;
  double quantile(double p) const;
  double mass(double a, double b) const { return cdf_at(b) - cdf_at(a); }

private:
  std::vector<double> grid_;
  std::vector<double> log_grid_;
  std::vector<double> density_;
  std::vector<double> cdf_;
};

std::vector<double> hb_posterior_quantiles(const SpectralPrior& prior,
                                           const CoefficientVector& ytilde, const HBPrior& hb,
                                           const std::vector<double>& probs);

/// D^L(c, f) + 2 lambda / c and D^L(c, f) + 1 / c, the two target criteria for the HB scale.
double hb_target_two_lambda(const SpectralPrior& prior, const CoefficientVector& f, double c,
                            double lambda);
double hb_target_unit(const SpectralPrior& prior, const CoefficientVector& f, double c);

}  // namespace gpsim
