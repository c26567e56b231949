#pragma once

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace gpsim {

inline constexpr const char* kVersion = "0.1.0";

/// One cell-statistic line of report.csv. `M` is NaN for cells without a blow-up factor.
struct ReportRow {
  std::string experiment;
  std::size_t n = 0;
  std::string method;
  double M = std::numeric_limits<double>::quiet_NaN();
  std::string param;
  std::string statistic;
  double value = 0.0;
};

/// Named values from a single replication, kept for the optional trace output.
struct TraceRecord {
  std::size_t replication = 0;
  std::uint64_t seed = 0;
  bool ok = true;
  std::string error;
  std::vector<std::pair<std::string, double>> values;
};

struct ExperimentReport {
  std::string experiment;
  std::string config_hash;
  nlohmann::json config_echo;
  std::vector<ReportRow> rows;
  /// Keyed by cell label, e.g. "n256_risk_eb".
  std::map<std::string, std::vector<TraceRecord>> traces;

  void add(std::size_t n, const std::string& method, double M, const std::string& param,
           const std::string& statistic, double value);
  /// First row matching the given cell and statistic; throws if absent.
  const ReportRow& find(std::size_t n, const std::string& method, const std::string& statistic,
                        double M = std::numeric_limits<double>::quiet_NaN(),
                        const std::string& param = "") const;
  double value(std::size_t n, const std::string& method, const std::string& statistic,
               double M = std::numeric_limits<double>::quiet_NaN(),
               const std::string& param = "") const {
    return find(n, method, statistic, M, param).value;
  }
};

/// Long-format CSV: experiment,n,method,M,param,statistic,value,config_hash.
std::string report_csv(const ExperimentReport& report);
nlohmann::json report_meta(const ExperimentReport& report);

/// Writes report.csv, meta.json and, when `trace` is set, trace/<cell>.csv under `dir`.
void write_report(const ExperimentReport& report, const std::filesystem::path& dir, bool trace);

std::string format_number(double v);

}  // namespace gpsim
