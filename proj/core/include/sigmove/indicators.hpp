#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sigmove/features.hpp"
#include "sigmove/market_data.hpp"

namespace sigmove {

/// Wilder RSI aligned to price index. values[t] is empty for t < lookback.
struct RsiSeries {
  std::string ticker;
  std::size_t lookback = 14;
  std::vector<std::optional<double>> values;
};

inline constexpr std::size_t kDefaultRsiLookback = 14;
inline constexpr double kRsiOverbought = 70.0;
inline constexpr double kRsiOversold = 30.0;

// RSI from average gain/loss; 100 when only gains, 50 when flat.
double rsi_from_averages(double avg_gain, double avg_loss) noexcept;

// Seeds with the simple mean of the first `lookback` gains/losses, then
// smooths avg = (avg * (n - 1) + current) / n. Throws DataError when the
// series has fewer than lookback + 1 closes.
RsiSeries wilder_rsi(const PriceSeries& series, std::size_t lookback = kDefaultRsiLookback);

// negative task: RSI >= 70; positive task: RSI <= 30. Warmup -> 0.
std::vector<std::uint8_t> rsi_signal(const RsiSeries& rsi, Direction direction);

// negative task: RSI / 100; positive task: (100 - RSI) / 100. Warmup -> 0.5.
std::vector<double> rsi_score(const RsiSeries& rsi, Direction direction);

void write_rsi_csv(const RsiSeries& rsi, const std::vector<Date>& dates, std::ostream& out);

}  // namespace sigmove
