#ifndef WBAN_PLOT_HPP
#define WBAN_PLOT_HPP

#include "wban/sweep.hpp"

#include <string>
#include <vector>

namespace wban {

/// One SVG per metric, named <prefix>_<metric>.svg. Model curves are solid,
/// simulation means are drawn as markers. Returns the files written.
std::vector<std::string> write_plots(const ResultTable& table, const std::string& prefix);

/// SVG text for one metric ("R", "S", "E" or "D").
std::string plot_svg(const ResultTable& table, char metric);

}  // namespace wban

#endif  // WBAN_PLOT_HPP
