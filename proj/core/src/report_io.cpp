#include "coag/report_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include <json.hpp>

#include "coag/errors.hpp"

namespace coag {

namespace {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// JSON has no infinities; they become strings so the file stays valid.
nlohmann::json json_number(double v) {
  if (std::isfinite(v)) return v;
  return format_number(v);
}

}  // namespace

void write_csv(std::ostream& os, const Table& table) {
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    os << (i ? "," : "") << table.columns[i];
  }
  os << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_number(row[i]);
    os << '\n';
  }
}

std::string report_to_json(const ExperimentReport& report) {
  using nlohmann::json;
  json j;
  j["scenario"] = to_string(report.scenario);
  j["passed"] = report.all_passed();
  j["config"] = json::parse(config_to_json(report.config));
  json verdicts = json::array();
  for (const auto& v : report.verdicts) {
    json item{{"name", v.name},
              {"passed", v.passed},
              {"value", json_number(v.value)},
              {"comparison", v.comparison},
              {"tolerance", json_number(v.tolerance)},
              {"anchor", v.anchor}};
    if (v.comparison == "band") item["target"] = v.target;
    verdicts.push_back(std::move(item));
  }
  j["verdicts"] = std::move(verdicts);
  json summary = json::object();
  for (const auto& [k, v] : report.summary) summary[k] = json_number(v);
  j["summary"] = std::move(summary);
  j["files"] = report.files;
  j["note"] = "thresholds are calibration choices; the theory gives limits, not rates";
  return j.dump(2);
}

void write_report(ExperimentReport& report, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create " + dir.string() + ": " + ec.message());
  for (const auto& table : report.tables) {
    const std::string name = table.name + ".csv";
    std::ofstream out(dir / name);
    if (!out) throw Error("cannot write " + (dir / name).string());
    write_csv(out, table);
    if (!out) throw Error("write failed for " + (dir / name).string());
    report.files.push_back(name);
  }
  report.files.push_back("report.json");
  std::ofstream out(dir / "report.json");
  if (!out) throw Error("cannot write " + (dir / "report.json").string());
  out << report_to_json(report) << '\n';
  if (!out) throw Error("write failed for report.json");
}

}  // namespace coag
