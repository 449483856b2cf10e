#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "coag/experiments.hpp"

namespace coag {

/// Writes a table as CSV with every value printed to 17 significant digits, so reruns
/// of a deterministic scenario give byte-identical files.
void write_csv(std::ostream& os, const Table& table);

/// JSON document with scenario, config echo, verdicts, summary and the list of files.
std::string report_to_json(const ExperimentReport& report);

/// Writes report.json and one CSV per table into dir, creating it if needed, and records
/// the file names in report.files. Throws Error on IO failure.
void write_report(ExperimentReport& report, const std::filesystem::path& dir);

}  // namespace coag
