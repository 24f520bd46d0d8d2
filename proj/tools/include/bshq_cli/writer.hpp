#ifndef BSHQ_CLI_WRITER_HPP
#define BSHQ_CLI_WRITER_HPP

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace bshq::cli {

using ojson = nlohmann::ordered_json;

/// %.17g, with -0 printed as 0 and non-finite values as null.
std::string format_json_number(double v);

/// %.12g for CSV cells.
std::string format_csv_number(double v);

/// Deterministic pretty printer: two-space indent, arrays of scalars on one
/// line, floats through format_json_number. Ends with a newline.
std::string write_json(const ojson &doc);

/// Joins cells with commas; cells containing a comma or quote are quoted.
std::string csv_row(const std::vector<std::string> &cells);

} // namespace bshq::cli

#endif
