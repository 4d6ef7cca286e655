#include "sigmove/harness/grid.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>
#include <tuple>

#include "sigmove/error.hpp"
#include "sigmove/harness/results_csv.hpp"
#include "sigmove/seed.hpp"

namespace sigmove::harness {

namespace {

using CellKey = std::tuple<std::string, ModelType, std::size_t, std::string, Direction>;

CellKey key_of(const std::string& ticker, ModelType m, std::size_t w, double f, Direction d) {
  return {ticker, m, w, format_double(f), d};
}

std::vector<ResultRow> read_completed(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return {};
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  // Drop a trailing partial line left by an interrupted write.
  const auto last_newline = text.rfind('\n');
  text.resize(last_newline == std::string::npos ? 0 : last_newline + 1);
  if (text.empty()) return {};
  std::istringstream ss(text);
  return read_results_csv(ss);
}

}  // namespace

std::uint64_t cell_seed(std::uint64_t master_seed, const std::string& ticker, ModelType model, std::size_t window,
                        double fraction, Direction direction) {
  std::ostringstream os;
  os << ticker << '|' << to_string(model) << '|' << window << '|' << format_double(fraction) << '|'
     << to_string(direction);
  return derive_seed(master_seed, {hash_string(os.str())});
}

std::vector<ExperimentSpec> enumerate_cells(const GridConfig& config) {
  std::vector<ExperimentSpec> cells;
  cells.reserve(config.cardinality());
  for (const auto& [ticker, path] : config.data)
    for (auto model : config.models)
      for (auto window : config.windows)
        for (auto fraction : config.fractions)
          for (auto direction : config.directions) {
            ExperimentSpec s;
            s.ticker = ticker;
            s.model = model;
            s.window = window;
            s.fraction = fraction;
            s.direction = direction;
            s.seed = cell_seed(config.master_seed, ticker, model, window, fraction, direction);
            s.train_ratio = config.train_ratio;
            s.standardize = config.standardize;
            s.repeats = config.repeats;
            s.train = config.train;
            s.forest = config.forest;
            s.record_timing = config.record_timing;
            cells.push_back(std::move(s));
          }
  return cells;
}

void sort_results(std::vector<ResultRow>& rows) {
  auto rank = [](const ResultRow& r) {
    return std::make_tuple(r.ticker, static_cast<int>(r.model), r.window, r.fraction, static_cast<int>(r.direction));
  };
  std::stable_sort(rows.begin(), rows.end(), [&](const auto& a, const auto& b) { return rank(a) < rank(b); });
}

std::vector<ResultRow> run_grid(const GridConfig& config, const std::map<std::string, PriceSeries>& series,
                                GridRunStats* stats, const GridProgress& progress) {
  validate_grid_config(config);
  const auto cells = enumerate_cells(config);
  std::filesystem::create_directories(config.output_dir);
  const auto results_path = config.output_dir / "results.csv";

  std::map<CellKey, ResultRow> done;
  for (auto& r : read_completed(results_path))
    done.insert_or_assign(key_of(r.ticker, r.model, r.window, r.fraction, r.direction), std::move(r));

  std::vector<std::size_t> pending;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto& c = cells[i];
    if (!done.contains(key_of(c.ticker, c.model, c.window, c.fraction, c.direction))) pending.push_back(i);
  }

  // Rewrite the file so it holds exactly the completed rows before appending.
  {
    std::vector<ResultRow> existing;
    for (const auto& [k, r] : done) existing.push_back(r);
    write_results_csv(existing, results_path);
  }
  std::ofstream sink(results_path, std::ios::binary | std::ios::app);
  if (!sink) throw std::runtime_error("cannot append to " + results_path.string());

  std::vector<ResultRow> fresh(cells.size());
  std::mutex sink_mutex;
  std::atomic<std::size_t> next{0};
  std::size_t finished = 0;
  std::exception_ptr failure;

  auto worker = [&] {
    for (;;) {
      const std::size_t slot = next.fetch_add(1);
      if (slot >= pending.size()) return;
      const ExperimentSpec& spec = cells[pending[slot]];
      ResultRow row;
      const auto it = series.find(spec.ticker);
      if (it == series.end()) {
        row.ticker = spec.ticker;
        row.model = spec.model;
        row.window = spec.window;
        row.fraction = spec.fraction;
        row.direction = spec.direction;
        row.seed = spec.seed;
        row.status = "data_error: no series loaded";
      } else {
        row = run_experiment(spec, it->second);
      }
      std::lock_guard lock(sink_mutex);
      try {
        write_result_row(row, sink);
        sink.flush();
      } catch (...) {
        if (!failure) failure = std::current_exception();
      }
      ++finished;
      if (progress) progress(row, finished, pending.size());
      fresh[pending[slot]] = std::move(row);
    }
  };

  const std::size_t n_threads = std::min<std::size_t>(config.parallelism, std::max<std::size_t>(pending.size(), 1));
  std::vector<std::jthread> threads;
  for (std::size_t t = 1; t < n_threads; ++t) threads.emplace_back(worker);
  worker();
  threads.clear();
  sink.close();
  if (failure) std::rethrow_exception(failure);

  std::vector<ResultRow> all;
  all.reserve(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto& c = cells[i];
    auto it = done.find(key_of(c.ticker, c.model, c.window, c.fraction, c.direction));
    all.push_back(it != done.end() ? it->second : fresh[i]);
  }
  write_results_csv(all, results_path);

  if (stats) *stats = {cells.size(), cells.size() - pending.size(), pending.size()};
  return all;
}

std::vector<ResultRow> run_grid(const GridConfig& config, GridRunStats* stats, const GridProgress& progress) {
  validate_grid_config(config);
  std::map<std::string, PriceSeries> series;
  for (const auto& [ticker, path] : config.data) series.emplace(ticker, parse_price_csv(path, ticker));
  return run_grid(config, series, stats, progress);
}

}  // namespace sigmove::harness
