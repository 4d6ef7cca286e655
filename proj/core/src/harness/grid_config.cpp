#include "sigmove/harness/grid_config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "sigmove/error.hpp"

namespace sigmove::harness {

using nlohmann::json;

std::vector<double> GridConfig::default_fractions() { return fraction_range(1.0, 1.5, 0.1); }

std::vector<double> GridConfig::fraction_range(double start, double stop, double step) {
  if (!(step > 0.0) || stop < start) throw UsageError("invalid fraction range");
  std::vector<double> out;
  for (std::size_t i = 0;; ++i) {
    const double v = start + static_cast<double>(i) * step;
    if (v > stop + 1e-9) break;
    out.push_back(std::round(v * 1e9) / 1e9);
  }
  return out;
}

namespace {

template <typename T>
T get(const json& j, const char* key) {
  try {
    return j.get<T>();
  } catch (const json::exception& e) {
    throw UsageError(std::string("grid config: bad value for `") + key + "`: " + e.what());
  }
}

}  // namespace

GridConfig parse_grid_config(const std::string& json_text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw UsageError(std::string("grid config: ") + e.what());
  }
  if (!doc.is_object()) throw UsageError("grid config: top level must be an object");

  static const std::set<std::string> known{
      "data",     "windows",       "fractions",     "directions",    "models",     "master_seed",
      "output_dir", "parallelism", "train_ratio",   "standardize",   "repeats",    "record_timing",
      "epochs",   "batch_size",    "learning_rate", "n_trees",       "max_features", "max_depth",
      "min_samples_split", "chart_layout"};
  for (const auto& [key, value] : doc.items())
    if (!known.contains(key)) throw UsageError("grid config: unknown key `" + key + "`");

  GridConfig cfg;
  if (!doc.contains("data")) throw UsageError("grid config: `data` is required");
  if (!doc["data"].is_object()) throw UsageError("grid config: `data` must map ticker to path");
  for (const auto& [ticker, path] : doc["data"].items()) {
    std::filesystem::path p = get<std::string>(path, "data");
    if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
    cfg.data[ticker] = p;
  }
  if (doc.contains("windows")) cfg.windows = get<std::vector<std::size_t>>(doc["windows"], "windows");
  if (doc.contains("fractions")) {
    const auto& f = doc["fractions"];
    if (f.is_object()) {
      for (const auto& [key, value] : f.items())
        if (key != "start" && key != "stop" && key != "step")
          throw UsageError("grid config: unknown key `fractions." + key + "`");
      cfg.fractions = GridConfig::fraction_range(get<double>(f.at("start"), "fractions.start"),
                                                 get<double>(f.at("stop"), "fractions.stop"),
                                                 get<double>(f.at("step"), "fractions.step"));
    } else {
      cfg.fractions = get<std::vector<double>>(f, "fractions");
    }
  }
  if (doc.contains("directions")) {
    cfg.directions.clear();
    for (const auto& d : get<std::vector<std::string>>(doc["directions"], "directions"))
      cfg.directions.push_back(parse_direction(d));
  }
  if (doc.contains("models")) {
    cfg.models.clear();
    for (const auto& m : get<std::vector<std::string>>(doc["models"], "models"))
      cfg.models.push_back(parse_model_type(m));
  }
  if (doc.contains("master_seed")) cfg.master_seed = get<std::uint64_t>(doc["master_seed"], "master_seed");
  if (doc.contains("output_dir")) {
    std::filesystem::path out = get<std::string>(doc["output_dir"], "output_dir");
    if (out.is_relative() && !base_dir.empty()) out = base_dir / out;
    cfg.output_dir = out;
  }
  if (doc.contains("parallelism")) cfg.parallelism = get<std::size_t>(doc["parallelism"], "parallelism");
  if (doc.contains("train_ratio")) cfg.train_ratio = get<double>(doc["train_ratio"], "train_ratio");
  if (doc.contains("standardize")) cfg.standardize = get<bool>(doc["standardize"], "standardize");
  if (doc.contains("repeats")) cfg.repeats = get<std::size_t>(doc["repeats"], "repeats");
  if (doc.contains("record_timing")) cfg.record_timing = get<bool>(doc["record_timing"], "record_timing");
  if (doc.contains("epochs")) cfg.train.epochs = get<std::size_t>(doc["epochs"], "epochs");
  if (doc.contains("batch_size")) cfg.train.batch_size = get<std::size_t>(doc["batch_size"], "batch_size");
  if (doc.contains("learning_rate")) cfg.train.learning_rate = get<double>(doc["learning_rate"], "learning_rate");
  if (doc.contains("n_trees")) cfg.forest.n_trees = get<std::size_t>(doc["n_trees"], "n_trees");
  if (doc.contains("max_features")) cfg.forest.max_features = get<std::size_t>(doc["max_features"], "max_features");
  if (doc.contains("max_depth") && !doc["max_depth"].is_null())
    cfg.forest.max_depth = get<std::size_t>(doc["max_depth"], "max_depth");
  if (doc.contains("min_samples_split"))
    cfg.forest.min_samples_split = get<std::size_t>(doc["min_samples_split"], "min_samples_split");
  if (doc.contains("chart_layout")) {
    const auto layout = get<std::string>(doc["chart_layout"], "chart_layout");
    if (layout == "facet") cfg.chart_layout = ChartLayout::facet;
    else if (layout == "combined") cfg.chart_layout = ChartLayout::combined;
    else throw UsageError("grid config: chart_layout must be facet|combined");
  }
  validate_grid_config(cfg);
  return cfg;
}

GridConfig load_grid_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open grid config: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_grid_config(ss.str(), path.parent_path());
}

void validate_grid_config(const GridConfig& c) {
  if (c.data.empty() || c.windows.empty() || c.fractions.empty() || c.directions.empty() || c.models.empty())
    throw UsageError("grid config: every axis must be non-empty");
  for (auto w : c.windows)
    if (w < 2) throw UsageError("grid config: windows must be >= 2");
  for (auto f : c.fractions)
    if (!(f > 0.0)) throw UsageError("grid config: fractions must be positive");
  if (!(c.train_ratio > 0.0 && c.train_ratio < 1.0)) throw UsageError("grid config: train_ratio must lie in (0, 1)");
  if (c.parallelism == 0) throw UsageError("grid config: parallelism must be >= 1");
  if (c.repeats == 0) throw UsageError("grid config: repeats must be >= 1");
}

}  // namespace sigmove::harness
