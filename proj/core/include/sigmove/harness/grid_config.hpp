#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sigmove/features.hpp"
#include "sigmove/forest.hpp"
#include "sigmove/harness/experiment.hpp"
#include "sigmove/nn/train.hpp"

namespace sigmove::harness {

enum class ChartLayout { facet, combined };

/// Experiment grid: every (ticker, model, window, fraction, direction) cell.
struct GridConfig {
  std::map<std::string, std::filesystem::path> data;  // ticker -> price csv
  std::vector<std::size_t> windows{7, 14, 30, 60};
  std::vector<double> fractions = default_fractions();
  std::vector<Direction> directions{Direction::positive, Direction::negative};
  std::vector<ModelType> models = all_model_types();
  std::uint64_t master_seed = 0;
  std::filesystem::path output_dir = "results";
  std::size_t parallelism = 1;

  double train_ratio = 0.75;
  bool standardize = false;
  std::size_t repeats = 1;
  bool record_timing = true;
  nn::TrainConfig train;
  ForestConfig forest;
  ChartLayout chart_layout = ChartLayout::facet;

  // 1.0, 1.1, ..., 1.5
  static std::vector<double> default_fractions();
  // start, start+step, ... <= stop (+1e-9), each rounded to 1e-9.
  static std::vector<double> fraction_range(double start, double stop, double step);

  std::size_t cardinality() const noexcept {
    return data.size() * models.size() * windows.size() * fractions.size() * directions.size();
  }
};

// JSON document whose keys are the GridConfig field names. Unknown keys are
// a UsageError; relative data paths resolve against the config's directory.
GridConfig load_grid_config(const std::filesystem::path& path);
GridConfig parse_grid_config(const std::string& json_text, const std::filesystem::path& base_dir = {});

// Throws UsageError when an axis is empty or a value is out of range.
void validate_grid_config(const GridConfig& config);

}  // namespace sigmove::harness
