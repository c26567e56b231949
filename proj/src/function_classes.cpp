#include "gpsim/function_classes.hpp"

#include "gpsim/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace gpsim {

using std::numbers::pi;

namespace {

double index_weight(const SpectralPrior& prior, std::size_t k, NormWeighting weighting) {
  if (!prior.is_two_dimensional() || weighting == NormWeighting::sorted_position)
    return static_cast<double>(k + 1);
  const auto [i, j] = prior.index_pair(k);
  if (weighting == NormWeighting::native_product) return static_cast<double>(i) * j;
  return std::sqrt(static_cast<double>(i) * i + static_cast<double>(j) * j);
}

void require_alpha(double alpha) {
  if (!(alpha > 0.0)) throw std::domain_error("smoothness alpha must be > 0");
}

void require_sine_prior(const PriorPtr& prior) {
  if (!prior || prior->is_two_dimensional() ||
      prior->basis_kind() != SpectralPrior::BasisKind::bm_sine)
    throw std::invalid_argument("aliasing needs a 1-D prior with the Brownian-motion sine basis");
}

}  // namespace

double sobolev_norm(const CoefficientVector& f, double alpha, NormWeighting weighting) {
  require_alpha(alpha);
  f.validate();
  double acc = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k)
    acc += std::pow(index_weight(*f.prior, k, weighting), 2.0 * alpha) * f[k] * f[k];
  return std::sqrt(acc / static_cast<double>(f.size()));
}

double hyperrect_norm(const CoefficientVector& f, double alpha) {
  require_alpha(alpha);
  f.validate();
  double best = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k)
    best = std::max(best, std::pow(static_cast<double>(k + 1), 1.0 + 2.0 * alpha) * f[k] * f[k]);
  return std::sqrt(best / static_cast<double>(f.size()));
}

SmoothnessReport smoothness(const CoefficientVector& f, double alpha, NormWeighting weighting) {
  return {alpha, sobolev_norm(f, alpha, weighting), hyperrect_norm(f, alpha), weighting};
}

void PolishedTailParams::validate_discrete() const {
  if (!(L >= 1.0)) throw std::invalid_argument("polished tail needs L >= 1");
  if (!(rho > 1.0)) throw std::invalid_argument("discrete polished tail needs rho > 1");
  if (m_min < 2) throw std::invalid_argument("polished tail needs m_min >= 2");
}

void PolishedTailParams::validate_eigen() const {
  if (!(L >= 1.0)) throw std::invalid_argument("polished tail needs L >= 1");
  if (!(rho > 0.0 && rho <= 1.0)) throw std::invalid_argument("eigenvalue polished tail needs rho in (0, 1]");
}

PolishedTailResult polished_tail_discrete(const Eigen::VectorXd& coeffs, const PolishedTailParams& p) {
  p.validate_discrete();
  const std::size_t N = static_cast<std::size_t>(coeffs.size());
  // suffix[k] = sum_{j >= k} f_j^2 over 0-based k.
  std::vector<double> suffix(N + 1, 0.0);
  for (std::size_t k = N; k-- > 0;) suffix[k] = suffix[k + 1] + coeffs[static_cast<Eigen::Index>(k)] * coeffs[static_cast<Eigen::Index>(k)];
  PolishedTailResult r;
  for (std::size_t m = p.m_min; m <= N; ++m) {
    const auto upper = std::min<std::size_t>(N, static_cast<std::size_t>(std::floor(p.rho * static_cast<double>(m))));
    const double tail = suffix[m - 1];
    const double block = suffix[m - 1] - suffix[upper];
    if (tail > p.L * block) {
      r.holds = false;
      r.first_violation = m;
      break;
    }
  }
  return r;
}

PolishedTailResult polished_tail_discrete(const CoefficientVector& f, const PolishedTailParams& p) {
  f.validate();
  return polished_tail_discrete(f.coeffs, p);
}

bool polished_tail_eigen_at(const CoefficientVector& f, double c, double L, double rho) {
  double tail = 0.0;
  double block = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) {
    const double cl = c * f.prior->eigenvalue(j);
    if (cl > 1.0) continue;
    const double e = f[j] * f[j];
    tail += e;
    if (cl >= rho) block += e;
  }
  return L * block >= tail;
}

PolishedTailResult polished_tail_eigen(const CoefficientVector& f, const PolishedTailParams& p,
                                       std::size_t grid_points) {
  p.validate_eigen();
  f.validate();
  const auto ev = f.prior->eigenvalues();
  const double lo = 1.0 / ev.front();
  const double hi = 1.0 / ev.back();
  PolishedTailResult r;
  const std::size_t G = hi > lo ? std::max<std::size_t>(grid_points, 2) : 1;
  for (std::size_t k = 0; k < G; ++k) {
    const double c = G == 1 ? lo
                            : std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) *
                                                          static_cast<double>(k) / static_cast<double>(G - 1));
    if (!polished_tail_eigen_at(f, c, p.L, p.rho)) {
      r.holds = false;
      r.violating_c = c;
      break;
    }
  }
  return r;
}

double bias_term(const CoefficientVector& f, double c, CriterionKind kind) {
  double acc = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) {
    const double q = 1.0 + c * f.prior->eigenvalue(j);
    acc += f[j] * f[j] / (kind == CriterionKind::risk ? q * q : q);
  }
  return acc;
}

GoodBiasResult good_bias_check(const CoefficientVector& f, CriterionKind kind, double a,
                               const std::vector<double>& c_grid, const std::vector<double>& K_grid) {
  if (!(a > 0.0)) throw std::domain_error("good bias exponent a must be > 0");
  if (c_grid.empty() || K_grid.empty()) throw std::invalid_argument("good_bias_check: empty grid");
  f.validate();
  GoodBiasResult r;
  for (double c : c_grid) {
    const double base = bias_term(f, c, kind);
    for (double K : K_grid) {
      if (!(K > 1.0)) continue;
      const double lhs = bias_term(f, K * c, kind);
      const double rhs = std::pow(K, -a) * base;
      // 0 <= 0 when f carries no energy.
      const double ratio = rhs > 0.0 ? lhs / rhs : (lhs > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
      if (ratio > r.worst_ratio) {
        r.worst_ratio = ratio;
        r.worst_c = c;
        r.worst_K = K;
      }
      if (lhs > rhs) r.holds = false;
    }
  }
  return r;
}

std::optional<double> good_bias_exponent(const CoefficientVector& f, CriterionKind kind,
                                         const std::vector<double>& c_grid,
                                         const std::vector<double>& K_grid) {
  double lo = 1e-3;
  double hi = 8.0;
  if (!good_bias_check(f, kind, lo, c_grid, K_grid).holds) return std::nullopt;
  if (good_bias_check(f, kind, hi, c_grid, K_grid).holds) return hi;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (good_bias_check(f, kind, mid, c_grid, K_grid).holds ? lo : hi) = mid;
  }
  return lo;
}

void GoodnessParams::validate() const {
  if (!(a > 0.0 && b > 0.0 && B > 0.0 && B_prime > 0.0))
    throw std::invalid_argument("goodness constants must all be > 0");
}

namespace {

double variance_term(const SpectralPrior& prior, double c, CriterionKind kind) {
  double acc = 0.0;
  for (std::size_t j = 0; j < prior.dim(); ++j) {
    const double cl = c * prior.eigenvalue(j);
    const double q = 1.0 + cl;
    acc += kind == CriterionKind::risk ? (cl / q) * (cl / q) : std::log1p(cl) - cl / q;
  }
  return acc;
}

}  // namespace

bool good_variance_check(const SpectralPrior& prior, CriterionKind kind, const GoodnessParams& g,
                         const std::vector<double>& c_grid, const std::vector<double>& k_grid) {
  if (!(g.b > 0.0 && g.B > 0.0 && g.B_prime > 0.0))
    throw std::invalid_argument("good variance needs b, B, B' > 0");
  for (double c : c_grid) {
    const double base = variance_term(prior, c, kind);
    for (double k : k_grid) {
      if (!(k > 0.0 && k < 1.0)) continue;
      const double v = variance_term(prior, k * c, kind);
      const double scale = std::pow(k, g.b) * base;
      if (v < g.B * scale || v > g.B_prime * scale) return false;
    }
  }
  return true;
}

AliasResult alias_coefficients(const Sequence& fourier, const PriorPtr& prior,
                               std::optional<double> tol) {
  require_sine_prior(prior);
  const std::uint64_t n = prior->dim();
  const double scale = std::sqrt(static_cast<double>(n) + 0.5);
  const double stop = tol.value_or(1e-12 * scale);
  const std::uint64_t period = 2 * n + 1;
  AliasResult res;
  Eigen::VectorXd out(static_cast<Eigen::Index>(n));
  for (std::uint64_t i = 1; i <= n; ++i) {
    double acc = 0.0;
    int quiet = 0;
    std::size_t l = 0;
    for (; l < kMaxAliasPeriods && quiet < 2; ++l) {
      const double term = fourier(period * l + i) - fourier(period * l + 2 * n + 2 - i);
      acc += term;
      quiet = std::abs(term) < stop ? quiet + 1 : 0;
    }
    if (quiet < 2) res.converged = false;
    res.periods = std::max(res.periods, l);
    out[static_cast<Eigen::Index>(i - 1)] = scale * acc;
  }
  res.coeffs = CoefficientVector(prior, std::move(out));
  return res;
}

Sequence power_sequence(double alpha) {
  require_alpha(alpha);
  return [alpha](std::uint64_t j) { return std::pow(static_cast<double>(j), -0.5 - alpha); };
}

namespace {

struct Block {
  std::uint64_t begin;
  std::uint64_t end;  // inclusive
  std::uint64_t key;  // seed of the accepted attempt
};

class SelfSimilarState {
public:
  explicit SelfSimilarState(const SelfSimilarParams& p) : p_(p) {}

  double value(std::uint64_t j) {
    const Block b = block_for(j);
    return envelope(j) * unit(b.key, j);
  }

private:
  double envelope(std::uint64_t j) const {
    return p_.M * std::pow(static_cast<double>(j), -0.5 - p_.alpha);
  }

  static double unit(std::uint64_t key, std::uint64_t j) {
    const std::uint64_t bits = splitmix64(key ^ splitmix64(j));
    return 2.0 * ((static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53) - 1.0;
  }

  Block block_for(std::uint64_t j) {
    std::lock_guard lock(mutex_);
    while (blocks_.empty() || blocks_.back().end < j) append_block();
    const auto it = std::lower_bound(blocks_.begin(), blocks_.end(), j,
                                     [](const Block& b, std::uint64_t x) { return b.end < x; });
    return *it;
  }

  void append_block() {
    const std::uint64_t begin = blocks_.empty() ? 1 : blocks_.back().end + 1;
    const auto end = std::max<std::uint64_t>(
        begin, static_cast<std::uint64_t>(std::floor(p_.rho * static_cast<double>(begin))));
    const double need = p_.M * p_.M * p_.L * std::pow(static_cast<double>(begin), -2.0 * p_.alpha);
    const std::uint64_t index = blocks_.size();
    for (std::uint64_t attempt = 0; attempt < 1000; ++attempt) {
      const std::uint64_t key = mix_seed({p_.seed, index, attempt});
      double energy = 0.0;
      for (std::uint64_t j = begin; j <= end; ++j) {
        const double v = envelope(j) * unit(key, j);
        energy += v * v;
      }
      if (energy >= need) {
        blocks_.push_back({begin, end, key});
        return;
      }
    }
    throw std::runtime_error("self-similar sequence: block starting at " + std::to_string(begin) +
                             " failed its energy bound after 1000 draws");
  }

  SelfSimilarParams p_;
  std::mutex mutex_;
  std::vector<Block> blocks_;
};

}  // namespace

Sequence self_similar_sequence(const SelfSimilarParams& params) {
  require_alpha(params.alpha);
  if (!(params.M > 0.0) || !(params.rho > 1.0) || !(params.L > 0.0))
    throw std::invalid_argument("self-similar sequence needs M > 0, rho > 1, L > 0");
  auto state = std::make_shared<SelfSimilarState>(params);
  return [state](std::uint64_t j) { return state->value(j); };
}

namespace {

/// sum_{l >= l0} (a + b l)^-p via Euler-Maclaurin, accurate once a + b l0 is large.
double power_tail(double a, double b, double p, double l0) {
  const double x = a + b * l0;
  return std::pow(x, 1.0 - p) / (b * (p - 1.0)) + 0.5 * std::pow(x, -p) +
         p * b * std::pow(x, -p - 1.0) / 12.0;
}

void check_draw_args(double alpha, double delta) {
  require_alpha(alpha);
  if (!(delta > -1.0)) throw std::domain_error("prior draw needs delta > -1 so that j + delta > 0");
}

}  // namespace

double prior_draw_variance(std::size_t n, std::size_t i, double alpha, double delta) {
  check_draw_args(alpha, delta);
  if (i < 1 || i > n) throw std::out_of_range("prior_draw_variance: i must lie in 1..n");
  const double p = 1.0 + 2.0 * alpha;
  const double b = 2.0 * static_cast<double>(n) + 1.0;
  const double a1 = delta + static_cast<double>(i);
  const double a2 = delta + 2.0 * static_cast<double>(n) + 2.0 - static_cast<double>(i);
  const std::size_t explicit_terms = 64;
  double acc = 0.0;
  for (std::size_t l = 0; l < explicit_terms; ++l) {
    const double ld = static_cast<double>(l);
    acc += std::pow(a1 + b * ld, -p) + std::pow(a2 + b * ld, -p);
  }
  return acc + power_tail(a1, b, p, explicit_terms) + power_tail(a2, b, p, explicit_terms);
}

CoefficientVector prior_draw(const PriorPtr& prior, double alpha, double delta, std::uint64_t seed,
                             std::size_t explicit_periods) {
  require_sine_prior(prior);
  check_draw_args(alpha, delta);
  if (explicit_periods < 1) throw std::invalid_argument("prior_draw needs at least one explicit period");
  const std::size_t n = prior->dim();
  const double half_p = 0.5 + alpha;
  const double p = 2.0 * half_p;
  const double b = 2.0 * static_cast<double>(n) + 1.0;
  const double scale = std::sqrt(static_cast<double>(n) + 0.5);
  Rng rng(seed);
  Eigen::VectorXd out(static_cast<Eigen::Index>(n));
  for (std::size_t i = 1; i <= n; ++i) {
    const double a1 = delta + static_cast<double>(i);
    const double a2 = delta + 2.0 * static_cast<double>(n) + 2.0 - static_cast<double>(i);
    double acc = 0.0;
    for (std::size_t l = 0; l < explicit_periods; ++l) {
      const double ld = static_cast<double>(l);
      const double z1 = rng.normal();
      const double z2 = rng.normal();
      acc += z1 * std::pow(a1 + b * ld, -half_p) - z2 * std::pow(a2 + b * ld, -half_p);
    }
    const double tail_var = power_tail(a1, b, p, static_cast<double>(explicit_periods)) +
                            power_tail(a2, b, p, static_cast<double>(explicit_periods));
    acc += std::sqrt(tail_var) * rng.normal();
    out[static_cast<Eigen::Index>(i - 1)] = scale * acc;
  }
  return CoefficientVector(prior, std::move(out));
}

std::vector<double> fourier_expand(const std::function<double(double)>& fn, std::size_t J,
                                   std::size_t panels) {
  if (panels < 2 || panels % 2 != 0) throw std::invalid_argument("Simpson rule needs an even panel count");
  const double h = 1.0 / static_cast<double>(panels);
  std::vector<double> values(panels + 1);
  for (std::size_t k = 0; k <= panels; ++k) {
    values[k] = fn(static_cast<double>(k) * h);
    if (!std::isfinite(values[k])) throw std::domain_error("fourier_expand: function is not finite on [0, 1]");
  }
  std::vector<double> out(J);
  for (std::size_t j = 1; j <= J; ++j) {
    const double freq = (static_cast<double>(j) - 0.5) * pi;
    double acc = 0.0;
    for (std::size_t k = 0; k <= panels; ++k) {
      const double w = (k == 0 || k == panels) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
      acc += w * values[k] * std::sin(freq * static_cast<double>(k) * h);
    }
    out[j - 1] = std::sqrt(2.0) * acc * h / 3.0;
  }
  return out;
}

double fourier_evaluate(const std::vector<double>& coeffs, double x) {
  double acc = 0.0;
  for (std::size_t j = 1; j <= coeffs.size(); ++j)
    acc += coeffs[j - 1] * std::sin((static_cast<double>(j) - 0.5) * pi * x);
  return std::sqrt(2.0) * acc;
}

CoefficientVector gap_sequence(const PriorPtr& prior) {
  CoefficientVector f = CoefficientVector::zero(prior);
  double value = 0.5;
  for (std::size_t pos = 4; pos <= f.size(); pos *= 4, value *= 0.5)
    f.coeffs[static_cast<Eigen::Index>(pos - 1)] = value;
  return f;
}

}  // namespace gpsim
