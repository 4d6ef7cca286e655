#include "sigmove/indicators.hpp"

#include <ostream>

#include "sigmove/error.hpp"

namespace sigmove {

double rsi_from_averages(double avg_gain, double avg_loss) noexcept {
  if (avg_loss == 0.0) return avg_gain == 0.0 ? 50.0 : 100.0;
  return 100.0 - 100.0 / (1.0 + avg_gain / avg_loss);
}

RsiSeries wilder_rsi(const PriceSeries& series, std::size_t lookback) {
  if (lookback == 0) throw UsageError("RSI lookback must be positive");
  if (series.size() < lookback + 1)
    throw DataError("series too short for RSI lookback " + std::to_string(lookback));

  RsiSeries out;
  out.ticker = series.ticker;
  out.lookback = lookback;
  out.values.assign(series.size(), std::nullopt);

  const auto& c = series.closes;
  const double n = static_cast<double>(lookback);
  double avg_gain = 0.0, avg_loss = 0.0;
  for (std::size_t t = 1; t <= lookback; ++t) {
    const double delta = c[t] - c[t - 1];
    avg_gain += delta > 0.0 ? delta : 0.0;
    avg_loss += delta < 0.0 ? -delta : 0.0;
  }
  avg_gain /= n;
  avg_loss /= n;
  out.values[lookback] = rsi_from_averages(avg_gain, avg_loss);

  for (std::size_t t = lookback + 1; t < c.size(); ++t) {
    const double delta = c[t] - c[t - 1];
    avg_gain = (avg_gain * (n - 1.0) + (delta > 0.0 ? delta : 0.0)) / n;
    avg_loss = (avg_loss * (n - 1.0) + (delta < 0.0 ? -delta : 0.0)) / n;
    out.values[t] = rsi_from_averages(avg_gain, avg_loss);
  }
  return out;
}

std::vector<std::uint8_t> rsi_signal(const RsiSeries& rsi, Direction direction) {
  std::vector<std::uint8_t> signal(rsi.values.size(), 0);
  for (std::size_t t = 0; t < rsi.values.size(); ++t) {
    if (!rsi.values[t]) continue;
    const double v = *rsi.values[t];
    signal[t] = direction == Direction::negative ? v >= kRsiOverbought : v <= kRsiOversold;
  }
  return signal;
}

std::vector<double> rsi_score(const RsiSeries& rsi, Direction direction) {
  std::vector<double> score(rsi.values.size(), 0.5);
  for (std::size_t t = 0; t < rsi.values.size(); ++t) {
    if (!rsi.values[t]) continue;
    const double v = *rsi.values[t];
    score[t] = direction == Direction::negative ? v / 100.0 : (100.0 - v) / 100.0;
  }
  return score;
}

void write_rsi_csv(const RsiSeries& rsi, const std::vector<Date>& dates, std::ostream& out) {
  out << "date,rsi\n";
  for (std::size_t t = 0; t < rsi.values.size() && t < dates.size(); ++t) {
    out << format_iso_date(dates[t]) << ',';
    if (rsi.values[t]) out << format_double(*rsi.values[t]);
    out << '\n';
  }
}

}  // namespace sigmove
