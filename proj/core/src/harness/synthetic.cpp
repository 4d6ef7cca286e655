#include "sigmove/harness/synthetic.hpp"

#include <chrono>
#include <cmath>
#include <random>
#include <string>

#include "sigmove/error.hpp"
#include "sigmove/seed.hpp"

namespace sigmove::harness {

namespace {

std::vector<Date> business_days(std::size_t n) {
  using namespace std::chrono;
  std::vector<Date> out;
  out.reserve(n);
  sys_days day = sys_days{year{2009} / January / 2};
  while (out.size() < n) {
    const weekday wd{day};
    if (wd != Saturday && wd != Sunday) out.emplace_back(day);
    day += days{1};
  }
  return out;
}

}  // namespace

SyntheticKind parse_synthetic_kind(std::string_view text) {
  if (text == "gaussian") return SyntheticKind::gaussian;
  if (text == "planted") return SyntheticKind::planted;
  throw UsageError("unknown synthetic kind `" + std::string(text) + "` (expected gaussian|planted)");
}

std::string_view to_string(SyntheticKind kind) noexcept {
  return kind == SyntheticKind::gaussian ? "gaussian" : "planted";
}

bool is_planted_trigger(double two_days_before, double day_before) noexcept {
  constexpr double level = SyntheticParams::trigger_level * SyntheticParams::sigma;
  return two_days_before < -level && day_before > level;
}

PriceSeries generate_synthetic(SyntheticKind kind, std::size_t n, std::uint64_t seed) {
  if (n < 200) throw UsageError("synthetic series needs n >= 200");
  Rng rng = make_rng(seed);
  std::normal_distribution<double> noise(0.0, SyntheticParams::sigma);

  std::vector<double> r(n - 1);
  for (std::size_t t = 0; t < r.size(); ++t) {
    r[t] = noise(rng);
    if (kind != SyntheticKind::planted) continue;
    if (t >= 2 && is_planted_trigger(r[t - 2], r[t - 1]))
      r[t] = SyntheticParams::planted_move * SyntheticParams::sigma;
    else
      r[t] = std::min(r[t], SyntheticParams::cap * SyntheticParams::sigma);
  }

  PriceSeries series;
  series.ticker = kind == SyntheticKind::gaussian ? "SYN_GAUSS" : "SYN_PLANT";
  series.dates = business_days(n);
  series.closes.resize(n);
  series.closes[0] = SyntheticParams::start_price;
  double log_price = std::log(SyntheticParams::start_price);
  for (std::size_t t = 1; t < n; ++t) {
    log_price += r[t - 1];
    series.closes[t] = std::exp(log_price);
  }
  return series;
}

}  // namespace sigmove::harness
