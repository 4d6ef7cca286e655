#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "sigmove/harness/experiment.hpp"
#include "sigmove/harness/grid_config.hpp"
#include "sigmove/market_data.hpp"

namespace sigmove::harness {

// Stable 64-bit seed from the master seed and the cell coordinates.
std::uint64_t cell_seed(std::uint64_t master_seed, const std::string& ticker, ModelType model, std::size_t window,
                        double fraction, Direction direction);

// Cells in canonical order: ticker, model, window, fraction, direction.
std::vector<ExperimentSpec> enumerate_cells(const GridConfig& config);

struct GridRunStats {
  std::size_t total = 0;
  std::size_t skipped = 0;  // already present from an earlier run
  std::size_t executed = 0;
};

using GridProgress = std::function<void(const ResultRow&, std::size_t done, std::size_t total)>;

// Runs every cell on config.parallelism worker threads, appending each row to
// <output_dir>/results.csv as it completes. Cells already in that file are
// skipped. On completion the file is rewritten in canonical order and the
// full table returned in that order.
std::vector<ResultRow> run_grid(const GridConfig& config, GridRunStats* stats = nullptr,
                                const GridProgress& progress = {});

// Same, over already-loaded series (ticker -> series) instead of config.data.
std::vector<ResultRow> run_grid(const GridConfig& config, const std::map<std::string, PriceSeries>& series,
                                GridRunStats* stats = nullptr, const GridProgress& progress = {});

// Canonical ordering over rows from the same grid.
void sort_results(std::vector<ResultRow>& rows);

}  // namespace sigmove::harness
