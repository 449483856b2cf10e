#pragma once

#include <filesystem>
#include <string>

#include "coag/experiments.hpp"

namespace coag {

/// Standalone SVG line chart. Non-finite points and, on a log axis, nonpositive ones
/// are skipped.
std::string render_svg(const Plot& plot, int width = 720, int height = 440);

struct EmitResult {
  std::size_t written = 0;
  /// Set when there was nothing to plot.
  std::string warning;
};

/// One SVG per plot of the report. An empty report writes nothing and returns a warning.
/// IO failures throw Error.
EmitResult emit_plots(ExperimentReport& report, const std::filesystem::path& dir);

}  // namespace coag
