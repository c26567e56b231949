#include "gpsim/sequence_model.hpp"

#include "gpsim/rng.hpp"

#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace gpsim {

CoefficientVector::CoefficientVector(PriorPtr p, Eigen::VectorXd c)
    : prior(std::move(p)), coeffs(std::move(c)) {
  validate();
}

CoefficientVector CoefficientVector::zero(const PriorPtr& p) {
  return CoefficientVector(p, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p->dim())));
}

CoefficientVector CoefficientVector::unit(const PriorPtr& p, std::size_t j) {
  if (j >= p->dim()) throw std::out_of_range("unit coefficient index out of range");
  Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p->dim()));
  v[static_cast<Eigen::Index>(j)] = 1.0;
  return CoefficientVector(p, std::move(v));
}

void CoefficientVector::validate() const {
  if (!prior) throw std::invalid_argument("coefficient vector has no prior");
  if (size() != prior->dim())
    throw std::invalid_argument("coefficient vector length " + std::to_string(size()) +
                                " does not match prior dimension " + std::to_string(prior->dim()));
  if (!coeffs.allFinite()) throw std::invalid_argument("coefficient vector has non-finite entries");
}

void require_same_basis(const CoefficientVector& a, const CoefficientVector& b) {
  if (!a.prior || !b.prior || !a.prior->same_basis(*b.prior))
    throw std::invalid_argument("coefficient vectors refer to different eigenbases");
}

namespace {

bool use_dense(const SpectralPrior& prior) { return prior.dim() <= kDenseCap; }

}  // namespace

CoefficientVector to_coefficients(const PriorPtr& prior, const Eigen::VectorXd& values) {
  if (static_cast<std::size_t>(values.size()) != prior->dim())
    throw std::invalid_argument("to_coefficients: expected " + std::to_string(prior->dim()) +
                                " values, got " + std::to_string(values.size()));
  if (use_dense(*prior)) return CoefficientVector(prior, prior->basis_matrix().transpose() * values);
  Eigen::VectorXd out(values.size());
  for (std::size_t j = 0; j < prior->dim(); ++j) {
    double acc = 0.0;
    for (std::size_t i = 0; i < prior->dim(); ++i)
      acc += values[static_cast<Eigen::Index>(i)] * prior->basis_entry(j, i);
    out[static_cast<Eigen::Index>(j)] = acc;
  }
  return CoefficientVector(prior, std::move(out));
}

Eigen::VectorXd from_coefficients(const CoefficientVector& f) {
  f.validate();
  const SpectralPrior& prior = *f.prior;
  if (use_dense(prior)) return prior.basis_matrix() * f.coeffs;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(f.coeffs.size());
  for (std::size_t j = 0; j < prior.dim(); ++j) {
    const double fj = f[j];
    if (fj == 0.0) continue;
    for (std::size_t i = 0; i < prior.dim(); ++i)
      out[static_cast<Eigen::Index>(i)] += fj * prior.basis_entry(j, i);
  }
  return out;
}

Observation simulate_data(const CoefficientVector& f, std::uint64_t seed) {
  Observation obs;
  obs.y = from_coefficients(f);
  obs.seed = seed;
  Rng rng(seed);
  for (Eigen::Index i = 0; i < obs.y.size(); ++i) obs.y[i] += rng.normal();
  return obs;
}

CoefficientVector transformed_observation(const PriorPtr& prior, const Observation& obs) {
  if (!obs.y.allFinite()) throw std::invalid_argument("observation has non-finite entries");
  return to_coefficients(prior, obs.y);
}

CoefficientVector noise_coefficients(const PriorPtr& prior, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::VectorXd z(static_cast<Eigen::Index>(prior->dim()));
  for (Eigen::Index j = 0; j < z.size(); ++j) z[j] = rng.normal();
  return CoefficientVector(prior, std::move(z));
}

void write_observation_csv(std::ostream& out, const DesignGrid& grid, const Observation& obs) {
  if (static_cast<std::size_t>(obs.y.size()) != grid.coordinate_count())
    throw std::invalid_argument("write_observation_csv: length mismatch");
  std::ostringstream buf;
  buf.precision(17);
  if (grid.dimension == 1) {
    buf << "index,x,y\n";
    for (std::size_t p = 0; p < grid.n; ++p)
      buf << p + 1 << ',' << grid.axis[p] << ',' << obs.y[static_cast<Eigen::Index>(p)] << '\n';
  } else {
    buf << "i,j,x1,x2,y\n";
    for (std::size_t p = 0; p < grid.coordinate_count(); ++p) {
      const auto [x1, x2] = grid.point(p);
      buf << p / grid.n + 1 << ',' << p % grid.n + 1 << ',' << x1 << ',' << x2 << ','
          << obs.y[static_cast<Eigen::Index>(p)] << '\n';
    }
  }
  out << buf.str();
}

Observation read_observation_csv(std::istream& in, const DesignGrid& grid) {
  const bool two_d = grid.dimension == 2;
  const std::string expected = two_d ? "i,j,x1,x2,y" : "index,x,y";
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("observation CSV is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != expected)
    throw std::runtime_error("observation CSV header must be '" + expected + "', got '" + line + "'");

  Observation obs;
  obs.y = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(grid.coordinate_count()),
                                    std::numeric_limits<double>::quiet_NaN());
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    const std::size_t want = two_d ? 5 : 3;
    if (cells.size() != want)
      throw std::runtime_error("observation CSV row " + std::to_string(row) + ": expected " +
                               std::to_string(want) + " fields");
    std::size_t p = 0;
    try {
      if (two_d) {
        const auto i = std::stoul(cells[0]);
        const auto j = std::stoul(cells[1]);
        if (i < 1 || j < 1 || i > grid.n || j > grid.n) throw std::out_of_range("index");
        p = (i - 1) * grid.n + (j - 1);
      } else {
        const auto i = std::stoul(cells[0]);
        if (i < 1 || i > grid.n) throw std::out_of_range("index");
        p = i - 1;
      }
      obs.y[static_cast<Eigen::Index>(p)] = std::stod(cells[want - 1]);
    } catch (const std::logic_error&) {
      throw std::runtime_error("observation CSV row " + std::to_string(row) + ": bad index or value");
    }
  }
  if (!obs.y.allFinite())
    throw std::runtime_error("observation CSV does not cover every design point with a finite value");
  return obs;
}

}  // namespace gpsim
