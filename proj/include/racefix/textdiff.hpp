#pragma once

#include <string>

namespace racefix {

// Unified diff between two texts (line-based LCS, hunks with `context`
// lines of surrounding context).  Returns "" when the texts are identical.
std::string unified_diff(const std::string &before, const std::string &after,
                         const std::string &label_before,
                         const std::string &label_after, int context = 3);

} // namespace racefix
