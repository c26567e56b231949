#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace gpsim {

/// Largest coordinate count for which an explicit N x N matrix is ever formed.
inline constexpr std::size_t kDenseCap = 4096;

enum class GridKind { bm_special, uniform, custom, tensor_square };

/// Design points. For 2-D grids `axis` holds the 1-D coordinates and the
/// points are the lexicographically ordered pairs (axis[a], axis[b]).
struct DesignGrid {
  std::size_t n = 0;
  GridKind kind = GridKind::bm_special;
  int dimension = 1;
  std::vector<double> axis;

  static DesignGrid bm_special(std::size_t n);
  static DesignGrid uniform(std::size_t n);
  static DesignGrid custom(std::vector<double> points);
  static DesignGrid tensor_square(const DesignGrid& axis_grid);

  std::size_t coordinate_count() const { return dimension == 1 ? n : n * n; }
  /// Coordinates of flat point index p (0-based). For 1-D the second entry is 0.
  std::pair<double, double> point(std::size_t p) const;
};

enum class PriorFamily { brownian_motion, power_law, tensor, sobolev_2d, laplacian, custom };
enum class Boundary { dirichlet, neumann, mixed_dn };

std::string to_string(PriorFamily family);
std::string to_string(Boundary boundary);
PriorFamily prior_family_from_string(const std::string& s);
Boundary boundary_from_string(const std::string& s);

/// Serializable description of a prior; `n` is the grid side length.
struct PriorSpec {
  PriorFamily family = PriorFamily::brownian_motion;
  std::size_t n = 0;
  double m = 2.0;
  double delta = 1.0;
  Boundary boundary = Boundary::mixed_dn;
  /// Factor family for `tensor`: brownian_motion or power_law.
  PriorFamily factor = PriorFamily::brownian_motion;

  bool operator==(const PriorSpec&) const = default;
};

/// Bounds delta_lo * n / j^m <= lambda_j <= delta_hi * n / j^m.
struct SpectrumBoundParams {
  double delta_lo;
  double delta_hi;
  double m;
  void validate() const;
};

/// Closed-form Brownian-motion eigenvalue lambda_{j,n} (j is 1-based).
double bm_eigenvalue(std::size_t j, std::size_t n);

/// Entry i (1-based) of the sine vector e_{j,n}, for any j >= 1 (including
/// j > n, where the vectors alias back onto the first n).
double bm_basis_entry(std::size_t j, std::size_t i, std::size_t n);

/// Eigenvalues and orthonormal eigenbasis of a prior covariance on a design grid.
///
/// Immutable once built. Closed-form bases are evaluated on demand; a dense
/// copy of the basis is materialised lazily (and only below kDenseCap).
class SpectralPrior {
public:
  enum class BasisKind { bm_sine, dirichlet_sine, tensor_bm_sine, dense };

  SpectralPrior(const SpectralPrior&) = delete;
  SpectralPrior& operator=(const SpectralPrior&) = delete;

  std::size_t dim() const { return eigenvalues_.size(); }
  const DesignGrid& grid() const { return grid_; }
  std::span<const double> eigenvalues() const { return eigenvalues_; }
  double eigenvalue(std::size_t j) const { return eigenvalues_[j]; }
  double m() const { return m_; }
  const std::string& label() const { return label_; }
  const PriorSpec& spec() const { return spec_; }
  BasisKind basis_kind() const { return basis_kind_; }

  /// Entry at flat grid index `i` of eigenvector `j` (both 0-based).
  double basis_entry(std::size_t j, std::size_t i) const;
  Eigen::VectorXd basis_vector(std::size_t j) const;
  /// Columns are the eigenvectors. Throws std::length_error above kDenseCap.
  const Eigen::MatrixXd& basis_matrix() const;

  /// For 2-D priors, the 1-based (i, j) frequency pair of sorted position k.
  std::pair<int, int> index_pair(std::size_t k) const;
  bool is_two_dimensional() const { return grid_.dimension == 2; }

  /// Whether two priors index coefficients the same way.
  bool same_basis(const SpectralPrior& other) const;

  friend std::shared_ptr<const SpectralPrior> make_prior(const PriorSpec& spec);
  friend std::shared_ptr<const SpectralPrior> brownian_motion_prior(std::size_t n);
  friend std::shared_ptr<const SpectralPrior> power_law_prior(std::size_t n, double m,
                                                              double delta);
  friend std::shared_ptr<const SpectralPrior> tensor_prior_2d(
      const std::shared_ptr<const SpectralPrior>& factor);
  friend std::shared_ptr<const SpectralPrior> sobolev_prior_2d(std::size_t n, double m);
  friend std::shared_ptr<const SpectralPrior> laplacian_prior(std::size_t n, Boundary b);
  friend std::shared_ptr<const SpectralPrior> custom_prior(DesignGrid grid,
                                                           std::vector<double> eigenvalues,
                                                           Eigen::MatrixXd basis, double m,
                                                           std::string label);

private:
  SpectralPrior() = default;
  void check_invariants() const;

  DesignGrid grid_;
  PriorSpec spec_;
  std::vector<double> eigenvalues_;
  double m_ = 2.0;
  std::string label_;
  BasisKind basis_kind_ = BasisKind::bm_sine;
  std::vector<std::pair<int, int>> pairs_;
  Eigen::MatrixXd stored_basis_;

  mutable std::once_flag dense_once_;
  mutable Eigen::MatrixXd dense_cache_;
};

using PriorPtr = std::shared_ptr<const SpectralPrior>;

PriorPtr make_prior(const PriorSpec& spec);

PriorPtr brownian_motion_prior(std::size_t n);
/// lambda_j = delta * n / j^m with the Brownian-motion sine basis.
PriorPtr power_law_prior(std::size_t n, double m, double delta);
/// Kronecker product of a 1-D sine-basis prior with itself.
PriorPtr tensor_prior_2d(const PriorPtr& factor);
/// Convenience: power-law factors with delta = 1, i.e. lambda_{i,j} = n^2 / (ij)^m.
PriorPtr tensor_prior_2d(std::size_t n, double m);
/// lambda_{i,j} = n^2 / (i^2 + j^2)^m with the tensor sine basis.
PriorPtr sobolev_prior_2d(std::size_t n, double m);
/// Covariance equal to minus the inverse path-graph Laplacian. Neumann is singular
/// (constant null vector) and is rejected; use laplacian_spectrum for it.
PriorPtr laplacian_prior(std::size_t n, Boundary boundary);
PriorPtr custom_prior(DesignGrid grid, std::vector<double> eigenvalues, Eigen::MatrixXd basis,
                      double m, std::string label);

/// Path-graph Laplacian L on 1..n with the given boundary condition.
Eigen::MatrixXd laplacian_matrix(std::size_t n, Boundary boundary);

/// Closed-form eigenpairs of L, eigenvalues in non-increasing order (all <= 0).
struct LaplacianSpectrum {
  std::vector<double> eigenvalues;
  Eigen::MatrixXd eigenvectors;
};
LaplacianSpectrum laplacian_spectrum(std::size_t n, Boundary boundary);

/// U = sum_j lambda_j e_j e_j^T. Throws std::length_error above kDenseCap.
Eigen::MatrixXd covariance_matrix(const SpectralPrior& prior);

/// max |G - I| over the Gram matrix of the basis.
double orthonormality_defect(const SpectralPrior& prior);

/// Whether every eigenvalue lies within the two-sided power-law bound.
bool satisfies_spectrum_bounds(const SpectralPrior& prior, const SpectrumBoundParams& bounds);

}  // namespace gpsim
