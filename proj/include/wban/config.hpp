#ifndef WBAN_CONFIG_HPP
#define WBAN_CONFIG_HPP

#include "wban/core_model.hpp"
#include "wban/sweep.hpp"

#include <iosfwd>
#include <optional>
#include <string>

namespace wban {

/// Contents of an INI configuration file. Sections: [scenario], [phy],
/// [up0]..[up7] and an optional [sweep]. Anything left out keeps its default.
struct Config {
    Scenario scenario;
    std::optional<SweepSpec> sweep;
};

/// Syntax and number errors throw ParseError with the line. Unknown sections
/// or keys throw Configuration. The result is validated before it is returned.
Config parse_config(std::istream& in);
Config load_config(const std::string& path);

}  // namespace wban

#endif  // WBAN_CONFIG_HPP
