#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

#include "sigmove/market_data.hpp"

namespace sigmove::harness {

enum class SyntheticKind { gaussian, planted };

SyntheticKind parse_synthetic_kind(std::string_view text);
std::string_view to_string(SyntheticKind kind) noexcept;

/// Parameters of the generated return process.
///
/// gaussian: i.i.d. N(0, sigma) log returns.
/// planted:  the same draws, except that after a trigger (a return below
///           -trigger_level*sigma followed by one above +trigger_level*sigma)
///           the next return is exactly planted_move*sigma, and on every other
///           day the upside is capped at cap*sigma. Every significant positive
///           move at fractions up to ~1.5 is therefore preceded by the trigger.
struct SyntheticParams {
  static constexpr double sigma = 0.01;
  static constexpr double trigger_level = 0.5;
  static constexpr double planted_move = 3.0;
  static constexpr double cap = 0.8;
  static constexpr double start_price = 100.0;
};

// True when the two returns preceding a day form the planted trigger.
bool is_planted_trigger(double two_days_before, double day_before) noexcept;

// n prices (n - 1 returns) on consecutive business days from 2009-01-02.
// Throws UsageError for n < 200.
PriceSeries generate_synthetic(SyntheticKind kind, std::size_t n, std::uint64_t seed);

}  // namespace sigmove::harness
