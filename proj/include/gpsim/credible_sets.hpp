#pragma once

#include "gpsim/posterior.hpp"
#include "gpsim/scale_selection.hpp"

#include "json.hpp"

namespace gpsim {

struct CredibleBall {
  CoefficientVector center;
  double radius = 0.0;
  double c_hat = 0.0;
  double M = 1.0;
  double eta = 0.95;
};

/// Ball around the posterior mean at the empirical Bayes scale.
CredibleBall eb_credible_ball(const PriorPtr& prior, const CoefficientVector& ytilde,
                              ScaleMethod method, double eta, double M,
                              const RadiusMethod& radius_method,
                              const ScaleInterval& interval);
/// Same, with the scale already chosen.
CredibleBall credible_ball_at(const PriorPtr& prior, const CoefficientVector& ytilde, double c,
                              double eta, double M, const RadiusMethod& radius_method);

/// ||f - center|| < radius (strict).
bool ball_contains(const CredibleBall& ball, const CoefficientVector& f);

struct ScaleBall {
  double c = 0.0;
  CoefficientVector center;
  double radius = 0.0;  // already multiplied by M
};

/// Union of balls over scales between two HB posterior quantiles.
struct HBCredibleSet {
  double c_lo = 0.0;
  double c_hi = 0.0;
  std::vector<ScaleBall> per_scale;
  double M = 1.0;
  double eta1 = 0.95;
  double eta2 = 0.95;
};

inline constexpr std::size_t kDefaultHBSubgrid = 32;

HBCredibleSet hb_credible_set(const PriorPtr& prior, const CoefficientVector& ytilde,
                              const HBPrior& hb, double eta1, double eta2, double M,
                              const RadiusMethod& radius_method,
                              std::size_t subgrid_size = kDefaultHBSubgrid);
/// Same, from quantiles already computed.
HBCredibleSet hb_credible_set_between(const PriorPtr& prior, const CoefficientVector& ytilde,
                                      double c_lo, double c_hi, double eta1, double eta2, double M,
                                      const RadiusMethod& radius_method, std::size_t subgrid_size);

bool hb_contains(const HBCredibleSet& set, const CoefficientVector& f);

enum class IntervalSource { eb_scale, hb_interval };

/// Pointwise intervals at the design points, with the index set J_n.
struct IntervalFamily {
  IntervalSource source = IntervalSource::eb_scale;
  /// Scales whose intervals are united (a single scale for eb_scale).
  std::vector<double> scales;
  /// Column s holds the posterior means and half-widths at scales[s].
  Eigen::MatrixXd centers;
  Eigen::MatrixXd half_widths;
  std::vector<std::size_t> j_n;
  double M = 1.0;
  double eta = 0.95;
  double C = 0.5;

  /// Whether `value` lies strictly inside the interval at x_i for some scale.
  bool contains(std::size_t i, double value) const;
};

/// Intervals centred at the posterior mean at each of `scales` with half-width
/// M * z_eta * sd(c, x_i). With several scales the set at x_i is the union over
/// scales, and J_n uses the variances at the geometric mean of the extreme scales.
IntervalFamily pointwise_intervals(const PriorPtr& prior, const CoefficientVector& ytilde,
                                   IntervalSource source, const std::vector<double>& scales,
                                   double eta, double M, double C);

/// Indices i with s^2(c, x_i) >= (C / N) sum_k s^2(c, x_k).
std::vector<std::size_t> qualifying_indices(const Eigen::VectorXd& pointwise_variance, double C);

/// |{i in J_n : truth_i inside interval_i}| / N.
double fraction_covered(const IntervalFamily& intervals, const Eigen::VectorXd& truth_values);

double set_diameter(const CredibleBall& ball);
double set_diameter(const HBCredibleSet& set);

nlohmann::json to_json(const CredibleBall& ball);
nlohmann::json to_json(const HBCredibleSet& set);

}  // namespace gpsim
