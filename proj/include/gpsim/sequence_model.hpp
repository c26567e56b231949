#pragma once

#include "gpsim/spectral_prior.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>

namespace gpsim {

/// Coefficients of a grid function in the eigenbasis of `prior`.
struct CoefficientVector {
  PriorPtr prior;
  Eigen::VectorXd coeffs;

  CoefficientVector() = default;
  CoefficientVector(PriorPtr p, Eigen::VectorXd c);

  static CoefficientVector zero(const PriorPtr& p);
  static CoefficientVector unit(const PriorPtr& p, std::size_t j);

  std::size_t size() const { return static_cast<std::size_t>(coeffs.size()); }
  double operator[](std::size_t j) const { return coeffs[static_cast<Eigen::Index>(j)]; }
  /// Throws if the length does not match the prior or an entry is not finite.
  void validate() const;
};

/// Throws std::invalid_argument unless both vectors index the same basis.
void require_same_basis(const CoefficientVector& a, const CoefficientVector& b);

struct Observation {
  Eigen::VectorXd y;
  std::optional<std::uint64_t> seed;
};

/// f_j = <values, e_j>.
CoefficientVector to_coefficients(const PriorPtr& prior, const Eigen::VectorXd& values);
/// sum_j f_j e_j evaluated at the design points.
Eigen::VectorXd from_coefficients(const CoefficientVector& f);

/// Y = f + eps with eps i.i.d. N(0, 1) from a Philox stream keyed by `seed`.
Observation simulate_data(const CoefficientVector& f, std::uint64_t seed);

/// Observation expressed in the eigenbasis, Y~ = O Y.
CoefficientVector transformed_observation(const PriorPtr& prior, const Observation& obs);

/// i.i.d. standard normal coefficient vector, the transformed noise directly.
CoefficientVector noise_coefficients(const PriorPtr& prior, std::uint64_t seed);

/// CSV with header `index,x,y` (1-D) or `i,j,x1,x2,y` (2-D); indices are 1-based.
void write_observation_csv(std::ostream& out, const DesignGrid& grid, const Observation& obs);
Observation read_observation_csv(std::istream& in, const DesignGrid& grid);

}  // namespace gpsim
