#include "sigmove/harness/results_csv.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "sigmove/error.hpp"

namespace sigmove::harness {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

template <typename T>
T parse_num(const std::string& s, std::size_t line_no) {
  T v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw DataError("results file: bad number `" + s + "` on line " + std::to_string(line_no), line_no);
  return v;
}

}  // namespace

void write_results_header(std::ostream& out) { out << kResultsSchemaLine << '\n' << kResultsHeader << '\n'; }

void write_result_row(const ResultRow& r, std::ostream& out) {
  out << r.ticker << ',' << to_string(r.model) << ',' << r.window << ',' << format_double(r.fraction) << ','
      << to_string(r.direction) << ',' << r.seed << ',' << (r.auc ? format_double(*r.auc) : std::string()) << ','
      << (r.auc ? "true" : "false") << ',' << r.n_train << ',' << r.n_test << ',' << r.n_pos_test << ','
      << format_double(r.train_seconds) << ',' << (r.loss_final ? format_double(*r.loss_final) : std::string())
      << ',' << r.status << '\n';
}

void write_results_csv(const std::vector<ResultRow>& rows, std::ostream& out) {
  write_results_header(out);
  for (const auto& r : rows) write_result_row(r, out);
}

void write_results_csv(const std::vector<ResultRow>& rows, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_results_csv(rows, out);
}

std::vector<ResultRow> read_results_csv(std::istream& in) {
  std::vector<ResultRow> rows;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    if (!header_seen) {
      if (line != kResultsHeader) throw DataError("results file: unexpected header `" + line + "`", line_no);
      header_seen = true;
      continue;
    }
    const auto f = split_fields(line);
    if (f.size() != 14) throw DataError("results file: expected 14 fields on line " + std::to_string(line_no), line_no);
    ResultRow r;
    r.ticker = f[0];
    r.model = parse_model_type(f[1]);
    r.window = parse_num<std::size_t>(f[2], line_no);
    r.fraction = parse_num<double>(f[3], line_no);
    r.direction = parse_direction(f[4]);
    r.seed = parse_num<std::uint64_t>(f[5], line_no);
    if (f[7] == "true") r.auc = parse_num<double>(f[6], line_no);
    else if (f[7] != "false") throw DataError("results file: bad auc_defined on line " + std::to_string(line_no), line_no);
    r.n_train = parse_num<std::size_t>(f[8], line_no);
    r.n_test = parse_num<std::size_t>(f[9], line_no);
    r.n_pos_test = parse_num<std::size_t>(f[10], line_no);
    r.train_seconds = parse_num<double>(f[11], line_no);
    if (!f[12].empty()) r.loss_final = parse_num<double>(f[12], line_no);
    r.status = f[13];
    rows.push_back(std::move(r));
  }
  if (!header_seen) throw DataError("results file: missing header");
  return rows;
}

std::vector<ResultRow> read_results_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open results file: " + path.string());
  return read_results_csv(in);
}

}  // namespace sigmove::harness
