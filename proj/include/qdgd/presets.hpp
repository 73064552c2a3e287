#pragma once

#include <string>
#include <vector>

#include "qdgd/config.hpp"

namespace qdgd {

/// Named experiment setups, one per reproduced figure or table.
std::vector<std::string> preset_names();

/// Throws ConfigError for an unknown name.
RunConfig preset(const std::string& name);

}  // namespace qdgd
