#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "sigmove/harness/experiment.hpp"
#include "sigmove/harness/grid_config.hpp"

namespace sigmove::harness {

struct ReportOptions {
  ChartLayout layout = ChartLayout::facet;
};

/// Per ticker: <ticker>_results.csv and one SVG chart per direction present
/// (<ticker>_<direction>.svg, AUC against fraction). Plus summary.csv with
/// the best model for every (ticker, direction, window, fraction).
/// Returns the written paths.
std::vector<std::filesystem::path> emit_report(const std::vector<ResultRow>& results,
                                               const std::filesystem::path& outdir,
                                               const ReportOptions& options = {});

// Standalone SVG for one ticker and direction. Undefined AUCs break the line.
std::string render_auc_chart(const std::vector<ResultRow>& rows, const std::string& ticker, Direction direction,
                             ChartLayout layout);

}  // namespace sigmove::harness
