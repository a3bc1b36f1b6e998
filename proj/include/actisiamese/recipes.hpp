#ifndef ACTISIAMESE_RECIPES_HPP
#define ACTISIAMESE_RECIPES_HPP

#include <optional>
#include <string>
#include <vector>

#include "actisiamese/config.hpp"

namespace actisiamese {

/// Named experiment presets, in listing order.
std::vector<std::string> recipe_names();

/// Configuration of a named preset; empty for unknown names.
std::optional<RunConfig> recipe_config(const std::string& name);

} // namespace actisiamese

#endif // ACTISIAMESE_RECIPES_HPP
