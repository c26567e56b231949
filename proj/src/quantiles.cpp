#include "gpsim/quantiles.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>

#include <stdexcept>

namespace gpsim {

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("normal_quantile: p must lie in (0, 1)");
  return boost::math::quantile(boost::math::normal_distribution<double>(0.0, 1.0), p);
}

double chi_square_quantile(double dof, double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("chi_square_quantile: p must lie in (0, 1)");
  if (!(dof > 0.0)) throw std::domain_error("chi_square_quantile: dof must be positive");
  return boost::math::quantile(boost::math::chi_squared_distribution<double>(dof), p);
}

}  // namespace gpsim
