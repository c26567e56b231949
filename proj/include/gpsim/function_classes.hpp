#pragma once

#include "gpsim/scale_selection.hpp"

#include <cstdint>
#include <functional>
#include <optional>

namespace gpsim {

/// Infinite coefficient sequence j -> f_j, j >= 1.
using Sequence = std::function<double(std::uint64_t)>;

enum class NormWeighting { sorted_position, native_product, native_radial };

struct SmoothnessReport {
  double alpha = 0.0;
  double sobolev_norm = 0.0;
  double hyperrect_norm = 0.0;
  NormWeighting weighting = NormWeighting::sorted_position;
};

/// (N^-1 sum_j w_j^(2 alpha) f_j^2)^(1/2), where w_j is the sorted position j by default.
/// In 2-D the native weights ij or (i^2 + j^2)^(1/2) of the frequency pair can be used instead.
double sobolev_norm(const CoefficientVector& f, double alpha,
                    NormWeighting weighting = NormWeighting::sorted_position);
/// (N^-1 sup_j j^(1 + 2 alpha) f_j^2)^(1/2), always over sorted positions.
double hyperrect_norm(const CoefficientVector& f, double alpha);
SmoothnessReport smoothness(const CoefficientVector& f, double alpha,
                            NormWeighting weighting = NormWeighting::sorted_position);

struct PolishedTailParams {
  double L = 16.0;
  double rho = 2.0;
  std::size_t m_min = 8;
  void validate_discrete() const;
  void validate_eigen() const;
};

struct PolishedTailResult {
  bool holds = true;
  /// First violating block start m (1-based) for the discrete form.
  std::optional<std::size_t> first_violation;
  /// Scale of the first violation for the eigenvalue form.
  std::optional<double> violating_c;
};

/// sum_{j>=m} f_j^2 <= L sum_{m<=j<=floor(rho m) ^ N} f_j^2 for all m in [m_min, N].
PolishedTailResult polished_tail_discrete(const CoefficientVector& f, const PolishedTailParams& p);
PolishedTailResult polished_tail_discrete(const Eigen::VectorXd& coeffs, const PolishedTailParams& p);

/// L sum_{rho <= c lambda_j <= 1} f_j^2 >= sum_{c lambda_j <= 1} f_j^2 at a single c.
bool polished_tail_eigen_at(const CoefficientVector& f, double c, double L, double rho);
/// The same condition over `grid_points` log-spaced c in [1/lambda_1, 1/lambda_N].
PolishedTailResult polished_tail_eigen(const CoefficientVector& f, const PolishedTailParams& p,
                                       std::size_t grid_points = 400);

/// Bias part D1 of the chosen criterion kind.
double bias_term(const CoefficientVector& f, double c, CriterionKind kind);

struct GoodBiasResult {
  bool holds = true;
  double worst_c = 0.0;
  double worst_K = 0.0;
  /// max of D1(Kc) / (K^-a D1(c)); at most 1 when the condition holds.
  double worst_ratio = 0.0;
};

/// D1(Kc, f) <= K^-a D1(c, f) for every c in c_grid and K > 1 in K_grid.
GoodBiasResult good_bias_check(const CoefficientVector& f, CriterionKind kind, double a,
                               const std::vector<double>& c_grid, const std::vector<double>& K_grid);
/// Largest a in [1e-3, 8] (by bisection) for which good_bias_check passes, if any.
std::optional<double> good_bias_exponent(const CoefficientVector& f, CriterionKind kind,
                                         const std::vector<double>& c_grid,
                                         const std::vector<double>& K_grid);

struct GoodnessParams {
  double a = 0.0;
  double b = 0.0;
  double B = 0.0;
  double B_prime = 0.0;
  void validate() const;
};

/// B k^b D2(c) <= D2(kc) <= B' k^b D2(c) for every c in c_grid and k < 1 in k_grid.
bool good_variance_check(const SpectralPrior& prior, CriterionKind kind, const GoodnessParams& g,
                         const std::vector<double>& c_grid, const std::vector<double>& k_grid);

struct AliasResult {
  CoefficientVector coeffs;
  /// Largest number of periods summed over all coordinates.
  std::size_t periods = 0;
  bool converged = true;
};

inline constexpr std::size_t kMaxAliasPeriods = 1000000;

/// f_{i,n} = sqrt(n + 1/2) sum_l (f_{(2n+1)l+i} - f_{(2n+1)l+2n+2-i}); each series stops after
/// two consecutive periods below `tol` (default 1e-12 sqrt(n + 1/2)).
AliasResult alias_coefficients(const Sequence& fourier, const PriorPtr& prior,
                               std::optional<double> tol = std::nullopt);

/// j -> j^(-1/2 - alpha).
Sequence power_sequence(double alpha);

struct SelfSimilarParams {
  double alpha = 1.0;
  double M = 1.0;
  double rho = 2.0;
  double L = 0.1;
  std::uint64_t seed = 1;
};

/// Random sequence with |f_j| <= M j^(-1/2-alpha) whose blocks [b, floor(rho b)] each carry
/// energy >= M^2 L b^(-2 alpha); blocks are redrawn until they do (at most 1000 attempts).
Sequence self_similar_sequence(const SelfSimilarParams& params);

/// Aliased coefficients of W = sum_j Z_j (j + delta)^(-1/2-alpha) e_j on a sine-basis prior.
/// The first `explicit_periods` periods are drawn term by term; the remainder of each
/// coordinate's series is an exact Gaussian with the summed tail variance.
CoefficientVector prior_draw(const PriorPtr& prior, double alpha, double delta, std::uint64_t seed,
                             std::size_t explicit_periods = 64);

/// Variance of the unscaled aliased coordinate W_{i,n} (i is 1-based) under prior_draw.
double prior_draw_variance(std::size_t n, std::size_t i, double alpha, double delta);

/// Coefficients f_j = int_0^1 f(x) sqrt(2) sin((j - 1/2) pi x) dx, j = 1..J, by composite Simpson.
std::vector<double> fourier_expand(const std::function<double(double)>& fn, std::size_t J,
                                   std::size_t panels = 2048);
/// sum_j coeffs[j-1] sqrt(2) sin((j - 1/2) pi x).
double fourier_evaluate(const std::vector<double>& coeffs, double x);

/// Gap sequence: f = 2^-k at position 4^k (1-based), zero elsewhere.
CoefficientVector gap_sequence(const PriorPtr& prior);

}  // namespace gpsim
