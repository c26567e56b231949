#pragma once

#include "gpsim/posterior.hpp"
#include "gpsim/scale_selection.hpp"
#include "gpsim/spectral_prior.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace gpsim {

enum class ExperimentKind {
  coverage,
  pointwise_coverage,
  rate,
  oracle,
  hb_concentration,
  prior_polished,
  d2_asymptotics
};

std::string to_string(ExperimentKind kind);
ExperimentKind experiment_kind_from_string(const std::string& s);

enum class TruthKind { zero, power, self_similar, prior_draw, fourier, custom_csv };

std::string to_string(TruthKind kind);
TruthKind truth_kind_from_string(const std::string& s);

struct TruthSpec {
  TruthKind kind = TruthKind::power;
  double alpha = 1.0;
  double scale = 1.0;
  std::uint64_t seed = 1;
  /// prior_draw offset in (j + delta)^(-1/2-alpha).
  double delta = -0.5;
  /// self_similar envelope constant, block ratio and block energy fraction.
  double M = 1.0;
  double rho = 2.0;
  double L = 0.1;
  /// fourier: name of a built-in sample function evaluated on the grid.
  std::string function = "identity";
  /// custom_csv: observation-format file holding the truth values in its y column.
  std::string path;
};

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::coverage;
  /// Prior template; `n` is filled in from n_list.
  PriorSpec prior;
  TruthSpec truth;
  std::vector<ScaleMethod> methods{ScaleMethod::lik_eb, ScaleMethod::risk_eb, ScaleMethod::hb};
  std::vector<std::size_t> n_list{256, 512, 1024};
  std::size_t replications = 200;
  double eta = 0.95;
  /// Credibility of the HB scale interval (eta1); `eta` is used for the balls.
  double eta_scale = 0.95;
  std::vector<double> M_list{1.0, 2.0, 3.0};
  std::uint64_t seed = 20240601;
  RadiusMethod radius_method;
  std::size_t grid_points = kDefaultGridSize;
  double hb_kappa = 1.0;
  double hb_lambda = 1.0;
  std::size_t hb_subgrid = 32;
  /// Pointwise intervals: J_n constant and the per-replication fraction threshold.
  double interval_C = 0.5;
  double fraction_level = 0.9;
  /// Oracle exceedance levels.
  std::vector<double> epsilons{0.25, 0.5, 1.0};
  /// HB concentration window factors and mass threshold.
  std::vector<double> K_list{3.0, 10.0};
  double mass_level = 0.9;
  /// Polished-tail classifier constants.
  double pt_L = 16.0;
  double pt_rho = 2.0;
  std::size_t pt_m_min = 8;
  /// d2_asymptotics: number of log-spaced scales per n, endpoints included.
  std::size_t d2_scales = 9;
  std::size_t jobs = 1;
  std::filesystem::path output = "out";
  bool trace = false;

  /// Throws ConfigError listing every problem.
  void validate() const;
  nlohmann::json to_json() const;
  /// FNV-1a of the canonical JSON echo, as 16 hex digits.
  std::string hash() const;
};

class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

private:
  std::vector<std::string> problems_;
};

/// Parse a YAML document. Unknown keys are rejected with their path.
ExperimentConfig load_config(const std::string& text);
ExperimentConfig load_config_file(const std::filesystem::path& path);

}  // namespace gpsim
