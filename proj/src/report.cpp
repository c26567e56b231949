#include "gpsim/report.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <set>
#include <stdexcept>

namespace gpsim {

std::string format_number(double v) {
  if (std::isnan(v)) return "";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return fmt::format("{}", v);
}

void ExperimentReport::add(std::size_t n, const std::string& method, double M,
                           const std::string& param, const std::string& statistic, double value) {
  rows.push_back({experiment, n, method, M, param, statistic, value});
}

const ReportRow& ExperimentReport::find(std::size_t n, const std::string& method,
                                        const std::string& statistic, double M,
                                        const std::string& param) const {
  for (const ReportRow& r : rows) {
    if (r.n != n || r.method != method || r.statistic != statistic || r.param != param) continue;
    const bool m_match = std::isnan(M) ? std::isnan(r.M) : r.M == M;
    if (m_match) return r;
  }
  throw std::out_of_range(fmt::format("no report row for n={} method={} statistic={} M={} param={}",
                                      n, method, statistic, format_number(M), param));
}

std::string report_csv(const ExperimentReport& report) {
  std::string out = "experiment,n,method,M,param,statistic,value,config_hash\n";
  for (const ReportRow& r : report.rows)
    out += fmt::format("{},{},{},{},{},{},{},{}\n", r.experiment, r.n, r.method, format_number(r.M),
                       r.param, r.statistic, format_number(r.value), report.config_hash);
  return out;
}

nlohmann::json report_meta(const ExperimentReport& report) {
  return {{"experiment", report.experiment},
          {"config_hash", report.config_hash},
          {"config", report.config_echo},
          {"versions", {{"gpsim", kVersion}, {"fmt", FMT_VERSION}}},
          {"rows", report.rows.size()}};
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

}  // namespace

void write_report(const ExperimentReport& report, const std::filesystem::path& dir, bool trace) {
  std::filesystem::create_directories(dir);
  write_file(dir / "report.csv", report_csv(report));
  write_file(dir / "meta.json", report_meta(report).dump(2) + "\n");
  if (!trace) return;
  const auto tdir = dir / "trace";
  std::filesystem::create_directories(tdir);
  for (const auto& [cell, records] : report.traces) {
    std::vector<std::string> columns;
    std::set<std::string> known;
    for (const TraceRecord& rec : records)
      for (const auto& [name, v] : rec.values)
        if (known.insert(name).second) columns.push_back(name);
    std::string text = "replication,seed,ok,error";
    for (const auto& c : columns) text += "," + c;
    text += "\n";
    for (const TraceRecord& rec : records) {
      text += fmt::format("{},{},{},{}", rec.replication, rec.seed, rec.ok ? 1 : 0, rec.error);
      for (const auto& c : columns) {
        std::string cellv;
        for (const auto& [name, v] : rec.values)
          if (name == c) cellv = format_number(v);
        text += "," + cellv;
      }
      text += "\n";
    }
    write_file(tdir / (cell + ".csv"), text);
  }
}

}  // namespace gpsim
