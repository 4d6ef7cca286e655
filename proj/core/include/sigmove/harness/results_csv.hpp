#pragma once

#include <filesystem>
#include <iosfwd>
#include <string_view>
#include <vector>

#include "sigmove/harness/experiment.hpp"

namespace sigmove::harness {

inline constexpr std::string_view kResultsSchemaLine = "# sigmove-results v1";
inline constexpr std::string_view kResultsHeader =
    "ticker,model,window,fraction,direction,seed,auc,auc_defined,n_train,n_test,n_pos_test,train_seconds,"
    "loss_final,status";

void write_results_header(std::ostream& out);
void write_result_row(const ResultRow& row, std::ostream& out);
void write_results_csv(const std::vector<ResultRow>& rows, std::ostream& out);
void write_results_csv(const std::vector<ResultRow>& rows, const std::filesystem::path& path);

// Accepts files with or without the schema line. Throws DataError on
// malformed rows.
std::vector<ResultRow> read_results_csv(std::istream& in);
std::vector<ResultRow> read_results_csv(const std::filesystem::path& path);

}  // namespace sigmove::harness
