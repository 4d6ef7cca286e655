#include "sigmove/harness/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "sigmove/harness/results_csv.hpp"

namespace sigmove::harness {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
constexpr const char* kDashes[] = {"", "6,3", "2,2", "8,3,2,3", "1,3"};

std::string fmt(double v) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(2);
  os << v;
  return os.str();
}

struct Series {
  std::string label;
  std::string color;
  std::string dash;
  std::vector<std::pair<double, std::optional<double>>> points;  // sorted by fraction
};

struct Panel {
  std::string title;
  std::string model;
  std::vector<Series> series;
};

struct Frame {
  double x0, y0, width, height;
  double xmin, xmax, ymin, ymax;
  double px(double x) const { return x0 + (xmax == xmin ? 0.5 : (x - xmin) / (xmax - xmin)) * width; }
  double py(double y) const { return y0 + height - (y - ymin) / (ymax - ymin) * height; }
};

void draw_panel(std::ostringstream& svg, const Panel& panel, const Frame& f, const std::vector<double>& xticks) {
  svg << "<g class=\"panel\" data-model=\"" << panel.model << "\" data-x-min=\"" << format_double(f.xmin)
      << "\" data-x-max=\"" << format_double(f.xmax) << "\">\n";
  svg << "<rect x=\"" << fmt(f.x0) << "\" y=\"" << fmt(f.y0) << "\" width=\"" << fmt(f.width) << "\" height=\""
      << fmt(f.height) << "\" fill=\"none\" stroke=\"#444\"/>\n";
  svg << "<text x=\"" << fmt(f.x0 + f.width / 2) << "\" y=\"" << fmt(f.y0 - 8)
      << "\" text-anchor=\"middle\" font-size=\"13\">" << panel.title << "</text>\n";

  for (double x : xticks) {
    svg << "<line x1=\"" << fmt(f.px(x)) << "\" y1=\"" << fmt(f.y0 + f.height) << "\" x2=\"" << fmt(f.px(x))
        << "\" y2=\"" << fmt(f.y0 + f.height + 4) << "\" stroke=\"#444\"/>\n";
    svg << "<text class=\"xtick\" x=\"" << fmt(f.px(x)) << "\" y=\"" << fmt(f.y0 + f.height + 16)
        << "\" text-anchor=\"middle\" font-size=\"10\">" << format_double(x) << "</text>\n";
  }
  const int first = static_cast<int>(std::round(f.ymin * 10)), last = static_cast<int>(std::round(f.ymax * 10));
  for (int k = first; k <= last; ++k) {
    const double y = k / 10.0;
    svg << "<line x1=\"" << fmt(f.x0) << "\" y1=\"" << fmt(f.py(y)) << "\" x2=\"" << fmt(f.x0 + f.width)
        << "\" y2=\"" << fmt(f.py(y)) << "\" stroke=\"#ddd\"/>\n";
    svg << "<text x=\"" << fmt(f.x0 - 5) << "\" y=\"" << fmt(f.py(y) + 3)
        << "\" text-anchor=\"end\" font-size=\"10\">" << fmt(y) << "</text>\n";
  }
  svg << "<text x=\"" << fmt(f.x0 + f.width / 2) << "\" y=\"" << fmt(f.y0 + f.height + 32)
      << "\" text-anchor=\"middle\" font-size=\"11\">threshold fraction of sigma</text>\n";
  svg << "<text transform=\"translate(" << fmt(f.x0 - 36) << ',' << fmt(f.y0 + f.height / 2)
      << ") rotate(-90)\" text-anchor=\"middle\" font-size=\"11\">AUC</text>\n";

  for (const auto& s : panel.series) {
    std::vector<std::vector<std::pair<double, double>>> runs(1);
    for (const auto& [x, y] : s.points) {
      if (!y) {
        if (!runs.back().empty()) runs.emplace_back();
        continue;
      }
      runs.back().emplace_back(x, *y);
    }
    for (const auto& run : runs) {
      if (run.empty()) continue;
      svg << "<polyline class=\"series\" data-series=\"" << s.label << "\" fill=\"none\" stroke=\"" << s.color
          << "\" stroke-width=\"1.6\"";
      if (!s.dash.empty()) svg << " stroke-dasharray=\"" << s.dash << "\"";
      svg << " points=\"";
      for (std::size_t i = 0; i < run.size(); ++i)
        svg << (i ? " " : "") << fmt(f.px(run[i].first)) << ',' << fmt(f.py(run[i].second));
      svg << "\"/>\n";
      for (const auto& [x, y] : run)
        svg << "<circle cx=\"" << fmt(f.px(x)) << "\" cy=\"" << fmt(f.py(y)) << "\" r=\"2.2\" fill=\"" << s.color
            << "\"/>\n";
    }
  }
  svg << "</g>\n";
}

void draw_legend(std::ostringstream& svg, const std::vector<Series>& series, double x, double y) {
  svg << "<g class=\"legend\">\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double yy = y + static_cast<double>(i) * 15;
    svg << "<line x1=\"" << fmt(x) << "\" y1=\"" << fmt(yy) << "\" x2=\"" << fmt(x + 22) << "\" y2=\"" << fmt(yy)
        << "\" stroke=\"" << series[i].color << "\" stroke-width=\"2\"";
    if (!series[i].dash.empty()) svg << " stroke-dasharray=\"" << series[i].dash << "\"";
    svg << "/>\n<text x=\"" << fmt(x + 28) << "\" y=\"" << fmt(yy + 4) << "\" font-size=\"11\">" << series[i].label
        << "</text>\n";
  }
  svg << "</g>\n";
}

std::string series_label(ModelType model, std::size_t window, ChartLayout layout) {
  std::ostringstream os;
  if (layout == ChartLayout::combined) os << to_string(model) << ' ';
  os << "p=" << window;
  return os.str();
}

}  // namespace

std::string render_auc_chart(const std::vector<ResultRow>& rows, const std::string& ticker, Direction direction,
                             ChartLayout layout) {
  std::set<double> fractions;
  std::vector<ModelType> models;
  std::set<std::size_t> windows;
  for (const auto& r : rows) {
    if (r.ticker != ticker) continue;
    fractions.insert(r.fraction);
    windows.insert(r.window);
    if (std::find(models.begin(), models.end(), r.model) == models.end()) models.push_back(r.model);
  }
  std::sort(models.begin(), models.end(), [](auto a, auto b) { return static_cast<int>(a) < static_cast<int>(b); });
  const std::vector<double> xticks(fractions.begin(), fractions.end());

  double lo = 0.5, hi = 0.5;
  for (const auto& r : rows)
    if (r.ticker == ticker && r.direction == direction && r.auc) {
      lo = std::min(lo, *r.auc);
      hi = std::max(hi, *r.auc);
    }
  const double ymin = std::max(0.0, std::floor(lo * 10 - 1e-9) / 10);
  const double ymax = std::min(1.0, std::max(ymin + 0.1, std::ceil(hi * 10 + 1e-9) / 10));

  auto collect = [&](ModelType model, std::size_t window) {
    std::vector<std::pair<double, std::optional<double>>> pts;
    for (const auto& r : rows)
      if (r.ticker == ticker && r.direction == direction && r.model == model && r.window == window)
        pts.emplace_back(r.fraction, r.auc);
    std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    return pts;
  };

  std::vector<Panel> panels;
  if (layout == ChartLayout::facet) {
    for (auto m : models) {
      Panel p{std::string(to_string(m)), std::string(to_string(m)), {}};
      std::size_t k = 0;
      for (auto w : windows) {
        auto pts = collect(m, w);
        if (pts.empty()) continue;
        p.series.push_back({series_label(m, w, layout), kPalette[k % 10], "", std::move(pts)});
        ++k;
      }
      panels.push_back(std::move(p));
    }
  } else {
    Panel p{"all models", "all", {}};
    std::size_t mi = 0;
    for (auto m : models) {
      std::size_t wi = 0;
      for (auto w : windows) {
        auto pts = collect(m, w);
        if (!pts.empty()) p.series.push_back({series_label(m, w, layout), kPalette[mi % 10], kDashes[wi % 5], std::move(pts)});
        ++wi;
      }
      ++mi;
    }
    panels.push_back(std::move(p));
  }

  const double panel_w = layout == ChartLayout::facet ? 230 : 620;
  const double panel_h = layout == ChartLayout::facet ? 200 : 380;
  const double left = 60, top = 50, gap = 60;
  const double legend_w = layout == ChartLayout::facet ? 90 : 140;
  const double total_w = left + static_cast<double>(panels.size()) * (panel_w + gap) + legend_w;
  const double total_h = top + panel_h + 60;
  const double xmin = xticks.empty() ? 0.0 : xticks.front();
  const double xmax = xticks.empty() ? 1.0 : xticks.back();

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(total_w) << "\" height=\"" << fmt(total_h)
      << "\" viewBox=\"0 0 " << fmt(total_w) << ' ' << fmt(total_h) << "\" font-family=\"sans-serif\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << fmt(left) << "\" y=\"20\" font-size=\"15\">" << ticker << ": significant " << to_string(direction)
      << " daily returns, test AUC</text>\n";
  for (std::size_t i = 0; i < panels.size(); ++i) {
    Frame f{left + static_cast<double>(i) * (panel_w + gap), top, panel_w, panel_h, xmin, xmax, ymin, ymax};
    draw_panel(svg, panels[i], f, xticks);
  }
  if (!panels.empty())
    draw_legend(svg, panels.front().series, left + static_cast<double>(panels.size()) * (panel_w + gap) - gap + 15,
                top + 10);
  svg << "</svg>\n";
  return svg.str();
}

std::vector<std::filesystem::path> emit_report(const std::vector<ResultRow>& results,
                                               const std::filesystem::path& outdir, const ReportOptions& options) {
  if (results.empty()) throw std::invalid_argument("emit_report: no results");
  std::filesystem::create_directories(outdir);
  std::vector<std::filesystem::path> written;
  auto write_file = [&](const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << text)) throw std::runtime_error("cannot write " + path.string());
    written.push_back(path);
  };

  std::map<std::string, std::vector<ResultRow>> by_ticker;
  for (const auto& r : results) by_ticker[r.ticker].push_back(r);

  for (const auto& [ticker, rows] : by_ticker) {
    std::ostringstream csv;
    write_results_csv(rows, csv);
    write_file(outdir / (ticker + "_results.csv"), csv.str());
    for (auto d : {Direction::positive, Direction::negative}) {
      if (std::none_of(rows.begin(), rows.end(), [&](const auto& r) { return r.direction == d; })) continue;
      write_file(outdir / (ticker + "_" + std::string(to_string(d)) + ".svg"),
                 render_auc_chart(rows, ticker, d, options.layout));
    }
  }

  // Best model per (ticker, direction, window, fraction).
  using Cell = std::tuple<std::string, int, std::size_t, double>;
  std::map<Cell, const ResultRow*> best;
  for (const auto& r : results) {
    if (!r.auc) continue;
    const Cell key{r.ticker, static_cast<int>(r.direction), r.window, r.fraction};
    auto [it, inserted] = best.emplace(key, &r);
    if (!inserted && *r.auc > *it->second->auc) it->second = &r;
  }
  std::ostringstream summary;
  summary << "ticker,direction,window,fraction,best_model,best_auc\n";
  for (const auto& [key, r] : best)
    summary << r->ticker << ',' << to_string(r->direction) << ',' << r->window << ',' << format_double(r->fraction)
            << ',' << to_string(r->model) << ',' << format_double(*r->auc) << '\n';
  write_file(outdir / "summary.csv", summary.str());
  return written;
}

}  // namespace sigmove::harness
