// sigmove: command line front end for the significant-move toolkit.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 runtime failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "sigmove/error.hpp"
#include "sigmove/features.hpp"
#include "sigmove/forest.hpp"
#include "sigmove/harness/experiment.hpp"
#include "sigmove/harness/grid.hpp"
#include "sigmove/harness/grid_config.hpp"
#include "sigmove/harness/report.hpp"
#include "sigmove/harness/results_csv.hpp"
#include "sigmove/harness/synthetic.hpp"
#include "sigmove/indicators.hpp"
#include "sigmove/market_data.hpp"
#include "sigmove/metrics.hpp"
#include "sigmove/nn/model_io.hpp"
#include "sigmove/nn/train.hpp"

namespace {

using namespace sigmove;

enum ExitCode { kOk = 0, kUsage = 1, kData = 2, kRuntime = 3 };

// Writes to the named file, or stdout when the name is empty.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (path.empty()) return;
    file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
    if (!*file_) throw std::runtime_error("cannot write " + path);
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

int cmd_validate(const std::string& csv) {
  const auto series = parse_price_csv(csv);
  const auto report = validate_series(series);
  std::cout << series.ticker << ": " << report.row_count << " rows, " << (report.ok ? "ok" : "INVALID") << '\n';
  for (const auto& e : report.errors)
    std::cout << "  [" << to_string(e.kind) << "] index " << e.index << ": " << e.message << '\n';
  return report.ok ? kOk : kData;
}

int cmd_returns(const std::string& csv, const std::string& out_path) {
  const auto returns = compute_log_returns(parse_price_csv(csv));
  Output out(out_path);
  out.stream() << "date,log_return\n";
  for (std::size_t t = 0; t < returns.size(); ++t)
    out.stream() << format_iso_date(returns.dates[t]) << ',' << format_double(returns.returns[t]) << '\n';
  return kOk;
}

int cmd_rsi(const std::string& csv, std::size_t lookback, const std::string& out_path) {
  const auto series = parse_price_csv(csv);
  Output out(out_path);
  write_rsi_csv(wilder_rsi(series, lookback), series.dates, out.stream());
  return kOk;
}

struct LabelArgs {
  std::size_t window = 7;
  double fraction = 1.2;
  std::string direction = "pos";
  double train_ratio = 0.75;
  bool standardize = false;
};

LabeledDataset make_dataset(const PriceSeries& series, const LabelArgs& a) {
  return build_dataset(compute_log_returns(series),
                       {a.window, parse_direction(a.direction), a.fraction, a.train_ratio, a.standardize});
}

int cmd_label(const std::string& csv, const LabelArgs& args, const std::string& dump_path) {
  const auto ds = make_dataset(parse_price_csv(csv), args);
  std::size_t pos_train = 0, pos_test = 0;
  for (std::size_t k = 0; k < ds.size(); ++k) (k < ds.split_index ? pos_train : pos_test) += ds.labels[k];
  std::cout << "samples " << ds.size() << " (train " << ds.n_train() << ", test " << ds.n_test() << ")\n"
            << "sigma_train " << format_double(ds.sigma_train) << '\n'
            << "threshold " << format_double(ds.threshold) << " (" << to_string(ds.direction) << ", fraction "
            << format_double(ds.fraction) << ")\n"
            << "significant train " << pos_train << " (" << 100.0 * static_cast<double>(pos_train) / static_cast<double>(ds.n_train())
            << "%), test " << pos_test << " (" << 100.0 * static_cast<double>(pos_test) / static_cast<double>(ds.n_test()) << "%)\n";
  if (!dump_path.empty()) {
    Output out(dump_path);
    write_dataset_csv(ds, out.stream());
  }
  return kOk;
}

struct TrainArgs {
  LabelArgs label;
  std::string model = "mlp";
  nn::TrainConfig train;
  ForestConfig forest;
  std::size_t rsi_lookback = 0;
  std::string save_path;
  std::string roc_path;
};

int cmd_train(const std::string& csv, TrainArgs a) {
  const auto series = parse_price_csv(csv);
  const auto ds = make_dataset(series, a.label);
  const auto model = harness::parse_model_type(a.model);
  FeatureMatrix test;
  test.rows = ds.n_test();
  test.cols = ds.features.cols;
  test.values.assign(ds.features.values.begin() + static_cast<std::ptrdiff_t>(ds.split_index * test.cols),
                     ds.features.values.end());

  std::vector<double> scores;
  std::optional<double> loss;
  switch (model) {
    case harness::ModelType::mlp:
    case harness::ModelType::cnn:
    case harness::ModelType::lstm: {
      const auto spec = nn::NetworkSpec::make(nn::parse_model_kind(a.model), ds.window);
      const auto trained = nn::train(spec, ds, a.train);
      if (trained.single_class) std::cerr << "warning: training labels contain a single class\n";
      scores = nn::predict_proba(spec, trained.params, test);
      loss = trained.loss_history.back();
      if (!a.save_path.empty()) {
        Output out(a.save_path);
        nn::save_network(spec, trained.params, out.stream());
      }
      break;
    }
    case harness::ModelType::rf: {
      const auto forest = fit_forest(ds, a.forest);
      scores = forest_predict_proba(forest, test);
      if (!a.save_path.empty()) {
        Output out(a.save_path);
        save_forest(forest, out.stream());
      }
      break;
    }
    case harness::ModelType::rsi:
      scores = harness::rsi_test_scores(series, ds, a.rsi_lookback ? a.rsi_lookback : ds.window);
      break;
  }

  const std::span<const std::uint8_t> labels(ds.labels.data() + ds.split_index, ds.n_test());
  std::cout << "model " << a.model << ", window " << ds.window << ", fraction " << format_double(ds.fraction) << ", "
            << to_string(ds.direction) << '\n'
            << "train " << ds.n_train() << ", test " << ds.n_test() << '\n';
  if (loss) std::cout << "final training loss " << format_double(*loss) << '\n';
  try {
    const auto roc = roc_curve(scores, labels);
    std::cout << "test AUC " << format_double(roc.auc) << " (" << roc.n_pos << " significant of " << ds.n_test()
              << ")\n";
    if (!a.roc_path.empty()) {
      Output out(a.roc_path);
      write_roc_csv(roc, out.stream());
    }
  } catch (const DataError& e) {
    std::cout << "test AUC undefined: " << e.what() << '\n';
  }
  return kOk;
}

int cmd_grid(const std::string& config_path, std::optional<std::size_t> parallelism,
             std::optional<std::size_t> repeats, bool quiet) {
  auto cfg = harness::load_grid_config(config_path);
  if (parallelism) cfg.parallelism = *parallelism;
  if (repeats) cfg.repeats = *repeats;
  harness::GridRunStats stats;
  const auto rows = harness::run_grid(cfg, &stats, [&](const harness::ResultRow& r, std::size_t done, std::size_t total) {
    if (quiet) return;
    std::cerr << '[' << done << '/' << total << "] " << r.ticker << ' ' << to_string(r.model) << " p=" << r.window
              << " c=" << format_double(r.fraction) << ' ' << to_string(r.direction) << " auc="
              << (r.auc ? format_double(*r.auc) : std::string("undefined")) << " (" << r.status << ")\n";
  });
  const auto files = harness::emit_report(rows, cfg.output_dir, {cfg.chart_layout});
  std::cout << "grid: " << stats.total << " cells (" << stats.executed << " run, " << stats.skipped
            << " resumed)\nresults: " << (cfg.output_dir / "results.csv").string() << '\n';
  for (const auto& f : files) std::cout << "wrote " << f.string() << '\n';
  return kOk;
}

int cmd_report(const std::string& results, const std::string& outdir, const std::string& layout) {
  harness::ReportOptions options;
  if (layout == "combined") options.layout = harness::ChartLayout::combined;
  else if (layout != "facet") throw UsageError("--layout must be facet|combined");
  for (const auto& f : harness::emit_report(harness::read_results_csv(results), outdir, options))
    std::cout << "wrote " << f.string() << '\n';
  return kOk;
}

int cmd_synth(const std::string& kind, std::size_t n, std::uint64_t seed, const std::string& out_path) {
  const auto series = harness::generate_synthetic(harness::parse_synthetic_kind(kind), n, seed);
  Output out(out_path);
  write_price_csv(series, out.stream());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Forecasting significant daily stock-price moves: labeling, models, ROC/AUC grids"};
  app.require_subcommand(1);
  int rc = kOk;
  std::function<int()> action;

  std::string csv, out;

  auto* validate = app.add_subcommand("validate", "Check a price CSV and list every problem");
  validate->add_option("csv", csv, "price file (date,adj_close)")->required();
  validate->callback([&] { action = [&] { return cmd_validate(csv); }; });

  auto* returns = app.add_subcommand("returns", "Print daily log returns");
  returns->add_option("csv", csv)->required();
  returns->add_option("--out", out, "output file (default stdout)");
  returns->callback([&] { action = [&] { return cmd_returns(csv, out); }; });

  std::size_t lookback = kDefaultRsiLookback;
  auto* rsi = app.add_subcommand("rsi", "Wilder RSI as date,rsi");
  rsi->add_option("csv", csv)->required();
  rsi->add_option("--lookback", lookback, "lookback days")->check(CLI::PositiveNumber);
  rsi->add_option("--out", out);
  rsi->callback([&] { action = [&] { return cmd_rsi(csv, lookback, out); }; });

  LabelArgs label_args;
  std::string dump;
  auto add_label_opts = [](CLI::App* cmd, LabelArgs& a) {
    cmd->add_option("--window", a.window, "lookback window p")->check(CLI::PositiveNumber);
    cmd->add_option("--fraction", a.fraction, "threshold as a fraction of training sigma")->check(CLI::PositiveNumber);
    cmd->add_option("--direction", a.direction, "pos|neg")->check(CLI::IsMember({"pos", "neg", "positive", "negative"}));
    cmd->add_option("--train-ratio", a.train_ratio, "temporal train fraction")->check(CLI::Range(0.0, 1.0));
    cmd->add_flag("--standardize", a.standardize, "z-score features with training mean/sigma");
  };
  auto* label = app.add_subcommand("label", "Label significant moves and build windowed samples");
  label->add_option("csv", csv)->required();
  add_label_opts(label, label_args);
  label->add_option("--dump", dump, "write feature_1..feature_p,label,date CSV");
  label->callback([&] { action = [&] { return cmd_label(csv, label_args, dump); }; });

  TrainArgs train_args;
  std::size_t max_depth = 0;
  auto* train = app.add_subcommand("train", "Fit one model and report its test AUC");
  train->add_option("csv", csv)->required();
  add_label_opts(train, train_args.label);
  train->add_option("--model", train_args.model, "mlp|cnn|lstm|rf|rsi")
      ->check(CLI::IsMember({"mlp", "cnn", "lstm", "rf", "rsi"}));
  train->add_option("--epochs", train_args.train.epochs)->check(CLI::PositiveNumber);
  train->add_option("--batch-size", train_args.train.batch_size)->check(CLI::PositiveNumber);
  train->add_option("--lr", train_args.train.learning_rate)->check(CLI::PositiveNumber);
  train->add_option("--seed", train_args.train.seed);
  train->add_option("--n-trees", train_args.forest.n_trees)->check(CLI::PositiveNumber);
  train->add_option("--max-features", train_args.forest.max_features);
  train->add_option("--max-depth", max_depth, "0 = unlimited");
  train->add_option("--lookback", train_args.rsi_lookback, "RSI lookback (default: window)");
  train->add_option("--save", train_args.save_path, "write the fitted model");
  train->add_option("--roc-out", train_args.roc_path, "write threshold,fpr,tpr");
  train->callback([&] {
    action = [&] {
      train_args.forest.seed = train_args.train.seed;
      if (max_depth) train_args.forest.max_depth = max_depth;
      return cmd_train(csv, train_args);
    };
  });

  std::string config;
  std::optional<std::size_t> parallelism, repeats;
  bool quiet = false;
  auto* grid = app.add_subcommand("grid", "Run the experiment grid and write results plus report");
  grid->add_option("--config", config, "grid config (JSON)")->required();
  grid->add_option("--parallelism", parallelism, "worker threads")->check(CLI::PositiveNumber);
  grid->add_option("--repeats", repeats, "training runs per cell, AUC averaged")->check(CLI::PositiveNumber);
  grid->add_flag("--quiet", quiet, "no per-cell progress");
  grid->callback([&] { action = [&] { return cmd_grid(config, parallelism, repeats, quiet); }; });

  std::string results, outdir, layout = "facet";
  auto* report = app.add_subcommand("report", "Render CSV tables and SVG charts from a results file");
  report->add_option("--results", results)->required();
  report->add_option("--out", outdir)->required();
  report->add_option("--layout", layout, "facet|combined");
  report->callback([&] { action = [&] { return cmd_report(results, outdir, layout); }; });

  std::string kind;
  std::size_t n = 2500;
  std::uint64_t seed = 0;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic price series");
  synth->add_option("--kind", kind, "gaussian|planted")->required()->check(CLI::IsMember({"gaussian", "planted"}));
  synth->add_option("--n", n, "number of prices (>= 200)");
  synth->add_option("--seed", seed);
  synth->add_option("--out", out)->required();
  synth->callback([&] { action = [&] { return cmd_synth(kind, n, seed, out); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    rc = action ? action() : kUsage;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntime;
  }
  return rc;
}
