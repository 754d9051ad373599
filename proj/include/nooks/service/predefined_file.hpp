#pragma once

#include <string_view>
#include <vector>

#include "nooks/service/workspace.hpp"

namespace nooks {

/// Predefined-nook file: one nook per line,
///
///   2024-03-04 | What's a new interest you've gotten into in the last 6-12 months? |
///   2024-03-05 | Favourite podcasts | Share one episode you loved | podcasts
///
/// Fields are batch date, topic, optional thoughts and optional channel title,
/// separated by '|'. Blank lines and lines starting with '#' are ignored.
/// Throws NooksError(ParseError) whose message starts with "line N:".
std::vector<PredefinedNook> parse_predefined_file(std::string_view text);

}  // namespace nooks
