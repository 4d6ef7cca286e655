#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "sigmove/error.hpp"
#include "sigmove/market_data.hpp"

using namespace sigmove;

namespace {

PriceSeries parse(const std::string& text) {
  std::istringstream in(text);
  return parse_price_csv(in, "T");
}

std::optional<std::size_t> error_row(const std::string& text) {
  try {
    parse(text);
  } catch (const DataError& e) {
    return e.row();
  }
  return std::nullopt;
}

}  // namespace

TEST_CASE("iso dates parse strictly") {
  using namespace std::chrono;
  CHECK(parse_iso_date("2020-02-29") == Date{year{2020}, month{2}, day{29}});
  CHECK_FALSE(parse_iso_date("2019-02-29"));
  CHECK_FALSE(parse_iso_date("2020-2-29"));
  CHECK_FALSE(parse_iso_date("2020-02-29 "));
  CHECK_FALSE(parse_iso_date("20200229"));
  CHECK_FALSE(parse_iso_date(""));
  CHECK(format_iso_date(*parse_iso_date("1999-12-31")) == "1999-12-31");
}

TEST_CASE("well formed csv loads") {
  const auto s = parse("date,adj_close\n2020-01-02,10.5\n2020-01-03,11\r\n2020-01-06,1e1\n");
  CHECK(s.ticker == "T");
  REQUIRE(s.size() == 3);
  CHECK(s.closes[0] == 10.5);
  CHECK(s.closes[2] == 10.0);
  CHECK(format_iso_date(s.dates[2]) == "2020-01-06");
  CHECK(validate_series(s).ok);
}

TEST_CASE("parser reports the offending data row") {
  CHECK(error_row("date,adj_close\n2020-01-02,10\n2020-01-02,11\n") == 2u);
  CHECK(error_row("date,adj_close\n2020-01-02,10\n2020-01-01,11\n") == 2u);
  CHECK(error_row("date,adj_close\n2020-01-02,10\n2020-01-03,0\n") == 2u);
  CHECK(error_row("date,adj_close\n2020-01-02,-1\n2020-01-03,1\n") == 1u);
  CHECK(error_row("date,adj_close\n2020-01-02,10\n2020-01-03,abc\n2020-01-06,1\n") == 2u);
  CHECK(error_row("date,adj_close\n2020-13-02,10\n2020-01-03,1\n") == 1u);
  CHECK(error_row("date,adj_close\n2020-01-02,nan\n2020-01-03,1\n") == 1u);
  CHECK(error_row("date,adj_close\n2020-01-02,10,3\n2020-01-03,1\n") == 1u);
  CHECK_THROWS_AS(parse("date,close\n2020-01-02,10\n2020-01-03,11\n"), DataError);
  CHECK_THROWS_AS(parse("date,adj_close\n2020-01-02,10\n"), DataError);
  CHECK_THROWS_AS(parse(""), DataError);
}

TEST_CASE("validator flags each defect") {
  auto s = parse("date,adj_close\n2020-01-02,10\n2020-01-03,11\n2020-01-06,12\n");
  auto kinds = [](const PriceSeries& series) {
    std::vector<ValidationErrorKind> out;
    for (const auto& e : validate_series(series).errors) out.push_back(e.kind);
    return out;
  };
  auto dup = s;
  dup.dates[2] = dup.dates[1];
  CHECK(kinds(dup) == std::vector{ValidationErrorKind::duplicate_date});
  auto back = s;
  back.dates[2] = back.dates[0];
  CHECK(kinds(back) == std::vector{ValidationErrorKind::non_increasing_date});
  auto neg = s;
  neg.closes[1] = -2.0;
  CHECK(kinds(neg) == std::vector{ValidationErrorKind::non_positive_price});
  auto inf = s;
  inf.closes[1] = std::numeric_limits<double>::infinity();
  CHECK(kinds(inf) == std::vector{ValidationErrorKind::non_finite_price});
  auto mismatch = s;
  mismatch.closes.pop_back();
  CHECK(kinds(mismatch) == std::vector{ValidationErrorKind::length_mismatch});
  PriceSeries one{"T", {s.dates[0]}, {1.0}};
  CHECK(kinds(one) == std::vector{ValidationErrorKind::too_short});
  CHECK_FALSE(validate_series(one).ok);
}

TEST_CASE("write then parse round-trips bit-exactly") {
  PriceSeries s;
  s.ticker = "T";
  auto d = *parse_iso_date("2001-03-01");
  double price = 1.0 / 3.0;
  for (int i = 0; i < 50; ++i) {
    s.dates.push_back(d);
    s.closes.push_back(price);
    d = std::chrono::sys_days(d) + std::chrono::days{1};
    price *= 1.0 + 1e-3 * (i % 7) - 2e-3;
  }
  std::stringstream io;
  write_price_csv(s, io);
  CHECK(parse_price_csv(io, "T") == s);
}

TEST_CASE("format_double is shortest round-trip") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1.0) == "1");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("fixture file loads with ticker from file stem") {
  const auto s = parse_price_csv(oracle::fixture("rsi_fixture.csv"));
  CHECK(s.ticker == "rsi_fixture");
  CHECK(s.size() == 15);
}
