#include "gpsim/spectral_prior.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace gpsim {

using std::numbers::pi;

DesignGrid DesignGrid::bm_special(std::size_t n) {
  if (n == 0) throw std::invalid_argument("design grid needs n >= 1");
  DesignGrid g;
  g.n = n;
  g.kind = GridKind::bm_special;
  g.axis.resize(n);
  const double np = static_cast<double>(n) + 0.5;
  for (std::size_t i = 0; i < n; ++i) g.axis[i] = static_cast<double>(i + 1) / np;
  return g;
}

DesignGrid DesignGrid::uniform(std::size_t n) {
  if (n == 0) throw std::invalid_argument("design grid needs n >= 1");
  DesignGrid g;
  g.n = n;
  g.kind = GridKind::uniform;
  g.axis.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    g.axis[i] = static_cast<double>(i + 1) / static_cast<double>(n);
  return g;
}

DesignGrid DesignGrid::custom(std::vector<double> points) {
  if (points.empty()) throw std::invalid_argument("design grid needs n >= 1");
  for (std::size_t i = 1; i < points.size(); ++i)
    if (!(points[i] > points[i - 1]))
      throw std::invalid_argument("design points must be strictly increasing");
  DesignGrid g;
  g.n = points.size();
  g.kind = GridKind::custom;
  g.axis = std::move(points);
  return g;
}

DesignGrid DesignGrid::tensor_square(const DesignGrid& axis_grid) {
  if (axis_grid.dimension != 1) throw std::invalid_argument("tensor grid needs a 1-D axis");
  DesignGrid g = axis_grid;
  g.kind = GridKind::tensor_square;
  g.dimension = 2;
  return g;
}

std::pair<double, double> DesignGrid::point(std::size_t p) const {
  if (dimension == 1) return {axis.at(p), 0.0};
  return {axis.at(p / n), axis.at(p % n)};
}

std::string to_string(PriorFamily family) {
  switch (family) {
    case PriorFamily::brownian_motion: return "bm";
    case PriorFamily::power_law: return "power_law";
    case PriorFamily::tensor: return "tensor";
    case PriorFamily::sobolev_2d: return "sobolev_2d";
    case PriorFamily::laplacian: return "laplacian";
    case PriorFamily::custom: return "custom";
  }
  return "unknown";
}

std::string to_string(Boundary boundary) {
  switch (boundary) {
    case Boundary::dirichlet: return "dirichlet";
    case Boundary::neumann: return "neumann";
    case Boundary::mixed_dn: return "mixed_dn";
  }
  return "unknown";
}

PriorFamily prior_family_from_string(const std::string& s) {
  if (s == "bm") return PriorFamily::brownian_motion;
  if (s == "power_law") return PriorFamily::power_law;
  if (s == "tensor") return PriorFamily::tensor;
  if (s == "sobolev_2d") return PriorFamily::sobolev_2d;
  if (s == "laplacian") return PriorFamily::laplacian;
  throw std::invalid_argument("unknown prior family '" + s + "'");
}

Boundary boundary_from_string(const std::string& s) {
  if (s == "dirichlet") return Boundary::dirichlet;
  if (s == "neumann") return Boundary::neumann;
  if (s == "mixed_dn") return Boundary::mixed_dn;
  throw std::invalid_argument("unknown boundary '" + s + "'");
}

void SpectrumBoundParams::validate() const {
  if (!(delta_lo > 0.0) || !(delta_lo <= delta_hi))
    throw std::invalid_argument("need 0 < delta_lo <= delta_hi");
  if (!(m >= 1.0)) throw std::invalid_argument("need m >= 1");
}

double bm_eigenvalue(std::size_t j, std::size_t n) {
  const double s = std::sin((static_cast<double>(j) - 0.5) * pi / (2.0 * static_cast<double>(n) + 1.0));
  return 1.0 / ((4.0 * static_cast<double>(n) + 2.0) * s * s);
}

double bm_basis_entry(std::size_t j, std::size_t i, std::size_t n) {
  const double np = static_cast<double>(n) + 0.5;
  // Reduce (j - 1/2) * i modulo the period 2 * (n + 1/2) in exact integer
  // arithmetic: (2j - 1) * i mod (4n + 2), so aliasing identities hold to
  // rounding of a single sine evaluation.
  const std::uint64_t period = 4 * static_cast<std::uint64_t>(n) + 2;
  const std::uint64_t num = ((2 * static_cast<std::uint64_t>(j) - 1) % period) *
                            (static_cast<std::uint64_t>(i) % period) % period;
  return std::sqrt(2.0 / np) * std::sin(pi * static_cast<double>(num) / (2.0 * np));
}

namespace {

double dirichlet_entry(std::size_t k, std::size_t i, std::size_t n) {
  const double np1 = static_cast<double>(n) + 1.0;
  return std::sqrt(2.0 / np1) *
         std::sin(pi * static_cast<double>(k) * static_cast<double>(i) / np1);
}

}  // namespace

double SpectralPrior::basis_entry(std::size_t j, std::size_t i) const {
  const std::size_t n = grid_.n;
  switch (basis_kind_) {
    case BasisKind::bm_sine: return bm_basis_entry(j + 1, i + 1, n);
    case BasisKind::dirichlet_sine: return dirichlet_entry(j + 1, i + 1, n);
    case BasisKind::tensor_bm_sine: {
      const auto [a, b] = pairs_[j];
      return bm_basis_entry(static_cast<std::size_t>(a), i / n + 1, n) *
             bm_basis_entry(static_cast<std::size_t>(b), i % n + 1, n);
    }
    case BasisKind::dense: return stored_basis_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  return 0.0;
}

Eigen::VectorXd SpectralPrior::basis_vector(std::size_t j) const {
  if (j >= dim()) throw std::out_of_range("eigenvector index out of range");
  if (basis_kind_ == BasisKind::dense) return stored_basis_.col(static_cast<Eigen::Index>(j));
  Eigen::VectorXd v(static_cast<Eigen::Index>(dim()));
  for (std::size_t i = 0; i < dim(); ++i) v[static_cast<Eigen::Index>(i)] = basis_entry(j, i);
  return v;
}

const Eigen::MatrixXd& SpectralPrior::basis_matrix() const {
  if (basis_kind_ == BasisKind::dense) return stored_basis_;
  if (dim() > kDenseCap)
    throw std::length_error("dimension " + std::to_string(dim()) + " exceeds the dense cap");
  std::call_once(dense_once_, [this] {
    const auto N = static_cast<Eigen::Index>(dim());
    Eigen::MatrixXd b(N, N);
    if (basis_kind_ == BasisKind::tensor_bm_sine) {
      // Fill from the 1-D factor table instead of N^2 sine calls.
      const std::size_t n = grid_.n;
      Eigen::MatrixXd f(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
          f(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = bm_basis_entry(k + 1, i + 1, n);
      for (Eigen::Index j = 0; j < N; ++j) {
        const auto [a, c] = pairs_[static_cast<std::size_t>(j)];
        for (std::size_t p = 0; p < n; ++p)
          for (std::size_t q = 0; q < n; ++q)
            b(static_cast<Eigen::Index>(p * n + q), j) =
                f(static_cast<Eigen::Index>(p), a - 1) * f(static_cast<Eigen::Index>(q), c - 1);
      }
    } else {
      for (Eigen::Index j = 0; j < N; ++j)
        for (Eigen::Index i = 0; i < N; ++i)
          b(i, j) = basis_entry(static_cast<std::size_t>(j), static_cast<std::size_t>(i));
    }
    dense_cache_ = std::move(b);
  });
  return dense_cache_;
}

std::pair<int, int> SpectralPrior::index_pair(std::size_t k) const {
  if (!is_two_dimensional()) return {static_cast<int>(k + 1), 0};
  return pairs_.at(k);
}

bool SpectralPrior::same_basis(const SpectralPrior& other) const {
  if (this == &other) return true;
  if (dim() != other.dim() || basis_kind_ != other.basis_kind_) return false;
  if (basis_kind_ == BasisKind::dense) return false;
  return grid_.n == other.grid_.n && pairs_ == other.pairs_;
}

void SpectralPrior::check_invariants() const {
  for (std::size_t j = 0; j < eigenvalues_.size(); ++j) {
    if (!(eigenvalues_[j] > 0.0) || !std::isfinite(eigenvalues_[j]))
      throw std::invalid_argument("prior eigenvalues must be finite and positive");
    if (j > 0 && eigenvalues_[j] > eigenvalues_[j - 1])
      throw std::invalid_argument("prior eigenvalues must be sorted non-increasing");
  }
}

PriorPtr brownian_motion_prior(std::size_t n) {
  if (n == 0) throw std::invalid_argument("brownian_motion_prior: n must be >= 1");
  std::shared_ptr<SpectralPrior> p(new SpectralPrior());
  p->grid_ = DesignGrid::bm_special(n);
  p->spec_ = PriorSpec{PriorFamily::brownian_motion, n, 2.0, 1.0, Boundary::mixed_dn,
                       PriorFamily::brownian_motion};
  p->eigenvalues_.resize(n);
  for (std::size_t j = 0; j < n; ++j) p->eigenvalues_[j] = bm_eigenvalue(j + 1, n);
  p->m_ = 2.0;
  p->label_ = "bm(n=" + std::to_string(n) + ")";
  p->basis_kind_ = SpectralPrior::BasisKind::bm_sine;
  p->check_invariants();
  return p;
}

PriorPtr power_law_prior(std::size_t n, double m, double delta) {
  if (n == 0) throw std::invalid_argument("power_law_prior: n must be >= 1");
  if (!(m >= 1.0)) throw std::invalid_argument("power_law_prior: m must be >= 1");
  if (!(delta > 0.0)) throw std::invalid_argument("power_law_prior: delta must be > 0");
  std::shared_ptr<SpectralPrior> p(new SpectralPrior());
  p->grid_ = DesignGrid::bm_special(n);
  p->spec_ = PriorSpec{PriorFamily::power_law, n, m, delta, Boundary::mixed_dn,
                       PriorFamily::brownian_motion};
  p->eigenvalues_.resize(n);
  for (std::size_t j = 0; j < n; ++j)
    p->eigenvalues_[j] = delta * static_cast<double>(n) / std::pow(static_cast<double>(j + 1), m);
  p->m_ = m;
  p->label_ = "power_law(n=" + std::to_string(n) + ",m=" + std::to_string(m) + ")";
  p->basis_kind_ = SpectralPrior::BasisKind::bm_sine;
  p->check_invariants();
  return p;
}

namespace {

struct Entry {
  double value;
  int i;
  int j;
};

// Descending eigenvalue, then (i + j) ascending, then i ascending.
void sort_pairs(std::vector<Entry>& entries) {
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    if (a.value != b.value) return a.value > b.value;
    if (a.i + a.j != b.i + b.j) return a.i + a.j < b.i + b.j;
    return a.i < b.i;
  });
}

void check_2d_size(std::size_t n) {
  if (n == 0) throw std::invalid_argument("2-D prior: n must be >= 1");
  if (n * n > kDenseCap)
    throw std::length_error("2-D prior: n^2 = " + std::to_string(n * n) +
                            " exceeds the dimension cap " + std::to_string(kDenseCap));
}

void split_entries(std::vector<Entry> entries, std::vector<double>& values,
                   std::vector<std::pair<int, int>>& pairs) {
  sort_pairs(entries);
  values.clear();
  pairs.clear();
  for (const Entry& e : entries) {
    values.push_back(e.value);
    pairs.emplace_back(e.i, e.j);
  }
}

}  // namespace

PriorPtr tensor_prior_2d(const PriorPtr& factor) {
  if (!factor || factor->is_two_dimensional() ||
      factor->basis_kind() != SpectralPrior::BasisKind::bm_sine)
    throw std::invalid_argument("tensor_prior_2d: factor must be a 1-D sine-basis prior");
  const std::size_t n = factor->dim();
  check_2d_size(n);
  std::shared_ptr<SpectralPrior> p(new SpectralPrior());
  p->grid_ = DesignGrid::tensor_square(factor->grid());
  p->spec_ = PriorSpec{PriorFamily::tensor, n, factor->m(), factor->spec().delta,
                       Boundary::mixed_dn, factor->spec().family};
  p->m_ = factor->m();
  p->label_ = "tensor[" + factor->label() + "]";
  std::vector<Entry> entries;
  entries.reserve(n * n);
  for (std::size_t i = 1; i <= n; ++i)
    for (std::size_t j = 1; j <= n; ++j)
      entries.push_back({factor->eigenvalue(i - 1) * factor->eigenvalue(j - 1),
                         static_cast<int>(i), static_cast<int>(j)});
  split_entries(std::move(entries), p->eigenvalues_, p->pairs_);
  p->basis_kind_ = SpectralPrior::BasisKind::tensor_bm_sine;
  p->check_invariants();
  return p;
}

PriorPtr tensor_prior_2d(std::size_t n, double m) {
  check_2d_size(n);
  return tensor_prior_2d(power_law_prior(n, m, 1.0));
}

PriorPtr sobolev_prior_2d(std::size_t n, double m) {
  check_2d_size(n);
  if (!(m >= 1.0)) throw std::invalid_argument("sobolev_prior_2d: m must be >= 1");
  std::shared_ptr<SpectralPrior> p(new SpectralPrior());
  p->grid_ = DesignGrid::tensor_square(DesignGrid::bm_special(n));
  p->spec_ = PriorSpec{PriorFamily::sobolev_2d, n, m, 1.0, Boundary::mixed_dn,
                       PriorFamily::brownian_motion};
  p->m_ = m;
  p->label_ = "sobolev_2d(n=" + std::to_string(n) + ",m=" + std::to_string(m) + ")";
  const double n2 = static_cast<double>(n) * static_cast<double>(n);
  std::vector<Entry> entries;
  entries.reserve(n * n);
  for (std::size_t i = 1; i <= n; ++i)
    for (std::size_t j = 1; j <= n; ++j)
      entries.push_back({n2 / std::pow(static_cast<double>(i * i + j * j), m),
                         static_cast<int>(i), static_cast<int>(j)});
  split_entries(std::move(entries), p->eigenvalues_, p->pairs_);
  p->basis_kind_ = SpectralPrior::BasisKind::tensor_bm_sine;
  p->check_invariants();
  return p;
}

Eigen::MatrixXd laplacian_matrix(std::size_t n, Boundary boundary) {
  if (n < 2) throw std::invalid_argument("laplacian: n must be >= 2");
  const auto N = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(N, N);
  for (Eigen::Index i = 0; i < N; ++i) {
    L(i, i) = -2.0;
    if (i > 0) L(i, i - 1) = 1.0;
    if (i + 1 < N) L(i, i + 1) = 1.0;
  }
  // f(0) = f(1) folds the ghost neighbour into the diagonal; f(0) = 0 drops it.
  if (boundary == Boundary::neumann) L(0, 0) = -1.0;
  if (boundary == Boundary::neumann || boundary == Boundary::mixed_dn) L(N - 1, N - 1) = -1.0;
  return L;
}

LaplacianSpectrum laplacian_spectrum(std::size_t n, Boundary boundary) {
  if (n < 2) throw std::invalid_argument("laplacian: n must be >= 2");
  const auto N = static_cast<Eigen::Index>(n);
  const double nd = static_cast<double>(n);
  LaplacianSpectrum s;
  s.eigenvalues.resize(n);
  s.eigenvectors.resize(N, N);
  for (std::size_t k = 0; k < n; ++k) {
    const auto col = static_cast<Eigen::Index>(k);
    switch (boundary) {
      case Boundary::dirichlet: {
        // Ordered by |mu| ascending: k = 1..n.
        s.eigenvalues[k] = -2.0 + 2.0 * std::cos(static_cast<double>(k + 1) * pi / (nd + 1.0));
        for (std::size_t i = 0; i < n; ++i)
          s.eigenvectors(static_cast<Eigen::Index>(i), col) = dirichlet_entry(k + 1, i + 1, n);
        break;
      }
      case Boundary::neumann: {
        s.eigenvalues[k] = -2.0 + 2.0 * std::cos(static_cast<double>(k) * pi / nd);
        const double scale = k == 0 ? std::sqrt(1.0 / nd) : std::sqrt(2.0 / nd);
        for (std::size_t i = 0; i < n; ++i)
          s.eigenvectors(static_cast<Eigen::Index>(i), col) =
              scale * std::cos(static_cast<double>(k) * pi * (static_cast<double>(i) + 0.5) / nd);
        break;
      }
      case Boundary::mixed_dn: {
        const double sn = std::sin((static_cast<double>(k) + 0.5) * pi / (2.0 * nd + 1.0));
        s.eigenvalues[k] = -4.0 * sn * sn;
        for (std::size_t i = 0; i < n; ++i)
          s.eigenvectors(static_cast<Eigen::Index>(i), col) = bm_basis_entry(k + 1, i + 1, n);
        break;
      }
    }
  }
  return s;
}

PriorPtr laplacian_prior(std::size_t n, Boundary boundary) {
  if (n < 2) throw std::invalid_argument("laplacian_prior: n must be >= 2");
  if (boundary == Boundary::neumann)
    throw std::domain_error("laplacian_prior: the Neumann Laplacian is singular (constant null vector)");
  const LaplacianSpectrum s = laplacian_spectrum(n, boundary);
  std::shared_ptr<SpectralPrior> p(new SpectralPrior());
  p->grid_ = boundary == Boundary::mixed_dn ? DesignGrid::bm_special(n) : DesignGrid::uniform(n);
  p->spec_ = PriorSpec{PriorFamily::laplacian, n, 2.0, 1.0, boundary, PriorFamily::brownian_motion};
  p->m_ = 2.0;
  p->label_ = "laplacian(n=" + std::to_string(n) + "," + to_string(boundary) + ")";
  p->eigenvalues_.resize(n);
  for (std::size_t k = 0; k < n; ++k) p->eigenvalues_[k] = -1.0 / s.eigenvalues[k];
  p->basis_kind_ = boundary == Boundary::mixed_dn ? SpectralPrior::BasisKind::bm_sine
                                                  : SpectralPrior::BasisKind::dirichlet_sine;
  p->check_invariants();
  return p;
}

PriorPtr custom_prior(DesignGrid grid, std::vector<double> eigenvalues, Eigen::MatrixXd basis,
                      double m, std::string label) {
  const auto N = static_cast<Eigen::Index>(eigenvalues.size());
  if (grid.coordinate_count() != eigenvalues.size() || basis.rows() != N || basis.cols() != N)
    throw std::invalid_argument("custom_prior: grid, eigenvalues and basis sizes differ");
  const double defect =
      (basis.transpose() * basis - Eigen::MatrixXd::Identity(N, N)).cwiseAbs().maxCoeff();
  if (defect > 1e-10) throw std::invalid_argument("custom_prior: basis is not orthonormal");
  std::shared_ptr<SpectralPrior> p(new SpectralPrior());
  p->grid_ = std::move(grid);
  p->spec_ = PriorSpec{PriorFamily::custom, p->grid_.n, m, 1.0, Boundary::mixed_dn,
                       PriorFamily::custom};
  p->eigenvalues_ = std::move(eigenvalues);
  p->m_ = m;
  p->label_ = std::move(label);
  p->basis_kind_ = SpectralPrior::BasisKind::dense;
  p->stored_basis_ = std::move(basis);
  p->check_invariants();
  return p;
}

PriorPtr make_prior(const PriorSpec& spec) {
  switch (spec.family) {
    case PriorFamily::brownian_motion: return brownian_motion_prior(spec.n);
    case PriorFamily::power_law: return power_law_prior(spec.n, spec.m, spec.delta);
    case PriorFamily::tensor:
      return spec.factor == PriorFamily::brownian_motion
                 ? tensor_prior_2d(brownian_motion_prior(spec.n))
                 : tensor_prior_2d(power_law_prior(spec.n, spec.m, spec.delta));
    case PriorFamily::sobolev_2d: return sobolev_prior_2d(spec.n, spec.m);
    case PriorFamily::laplacian: return laplacian_prior(spec.n, spec.boundary);
    case PriorFamily::custom: break;
  }
  throw std::invalid_argument("make_prior: custom priors cannot be built from a spec");
}

Eigen::MatrixXd covariance_matrix(const SpectralPrior& prior) {
  if (prior.dim() > kDenseCap)
    throw std::length_error("covariance_matrix: dimension exceeds the dense cap");
  const Eigen::MatrixXd& B = prior.basis_matrix();
  const Eigen::Map<const Eigen::VectorXd> lambda(prior.eigenvalues().data(),
                                                 static_cast<Eigen::Index>(prior.dim()));
  return B * lambda.asDiagonal() * B.transpose();
}

double orthonormality_defect(const SpectralPrior& prior) {
  const Eigen::MatrixXd& B = prior.basis_matrix();
  const auto N = B.cols();
  return (B.transpose() * B - Eigen::MatrixXd::Identity(N, N)).cwiseAbs().maxCoeff();
}

bool satisfies_spectrum_bounds(const SpectralPrior& prior, const SpectrumBoundParams& bounds) {
  bounds.validate();
  const double n = static_cast<double>(prior.dim());
  for (std::size_t j = 0; j < prior.dim(); ++j) {
    const double base = n / std::pow(static_cast<double>(j + 1), bounds.m);
    const double lambda = prior.eigenvalue(j);
    if (lambda < bounds.delta_lo * base || lambda > bounds.delta_hi * base) return false;
  }
  return true;
}

}  // namespace gpsim
