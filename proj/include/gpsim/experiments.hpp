#pragma once

#include "gpsim/config.hpp"
#include "gpsim/report.hpp"
#include "gpsim/sequence_model.hpp"

#include <functional>

namespace gpsim {

ExperimentReport run_experiment(const ExperimentConfig& config);

ExperimentReport run_coverage(const ExperimentConfig& config);
ExperimentReport run_pointwise_coverage(const ExperimentConfig& config);
ExperimentReport run_rate(const ExperimentConfig& config);
ExperimentReport run_oracle(const ExperimentConfig& config);
ExperimentReport run_hb_concentration(const ExperimentConfig& config);
ExperimentReport run_prior_polished(const ExperimentConfig& config);
ExperimentReport run_d2_asymptotics(const ExperimentConfig& config);

/// Prior for side length n from the config template.
PriorPtr prior_for(const PriorSpec& tmpl, std::size_t n);

/// Truth coefficients on `prior`. Power truths on 1-D sine-basis priors are the aliased
/// coefficients of j^(-1/2-alpha); elsewhere sequences are placed directly on the sorted
/// spectral positions with a sqrt(N) grid scaling.
CoefficientVector make_truth(const TruthSpec& truth, const PriorPtr& prior);

/// Seed of replication r in cell (n, method); independent of every other cell.
std::uint64_t replication_seed(std::uint64_t base, std::size_t n, const std::string& method,
                               std::size_t r);

/// Runs fn(0..count-1) on `jobs` threads. Each index is processed exactly once.
void parallel_for(std::size_t count, std::size_t jobs, const std::function<void(std::size_t)>& fn);

/// C_{gamma,nu,m} = int_0^inf u^gamma / (u^m + 1)^nu du.
double power_integral(double gamma, double nu, double m);

/// Least-squares slope of log y against log x.
double log_log_slope(const std::vector<double>& x, const std::vector<double>& y);

double median(std::vector<double> v);

}  // namespace gpsim
