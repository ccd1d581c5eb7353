#ifndef WBAN_CSV_HPP
#define WBAN_CSV_HPP

#include "wban/compare.hpp"
#include "wban/sweep.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace wban {

inline constexpr const char* kCsvSchema = "wban-results/1";

const std::vector<std::string>& csv_columns();

/// Header plus one line per row. Numbers use 17 significant digits so that
/// read_csv(write_csv(t)) == t.
void write_csv(std::ostream& out, const ResultTable& table);
std::string to_csv(const ResultTable& table);

/// Throws ParseError (with the 1-based line) on malformed input.
ResultTable read_csv(std::istream& in);

/// Key identifying a sweep point: "<parameter>=<value>/<mechanism>".
std::string point_key(const ResultRow& row);

/// Regroups model_* or sim_* cells by sweep point for compare().
MetricsSet analytical_set(const ResultTable& table);
MetricsSet simulated_set(const ResultTable& table);

}  // namespace wban

#endif  // WBAN_CSV_HPP
