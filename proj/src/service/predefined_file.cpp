#include "nooks/service/predefined_file.hpp"

#include <sstream>

namespace nooks {
namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  return std::string(s.substr(first, s.find_last_not_of(" \t\r") - first + 1));
}

}  // namespace

std::vector<PredefinedNook> parse_predefined_file(std::string_view text) {
  std::vector<PredefinedNook> out;
  std::istringstream in{std::string(text)};
  std::string line;
  for (int n = 1; std::getline(in, line); ++n) {
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped.front() == '#') continue;
    std::vector<std::string> fields;
    std::size_t pos = 0;
    for (;;) {
      auto bar = stripped.find('|', pos);
      fields.push_back(trim(std::string_view(stripped).substr(pos, bar == std::string::npos ? bar : bar - pos)));
      if (bar == std::string::npos) break;
      pos = bar + 1;
    }
    auto fail = [n](const std::string& what) {
      return NooksError(ErrorCode::ParseError, "line " + std::to_string(n) + ": " + what);
    };
    if (fields.size() < 2 || fields.size() > 4) throw fail("expected date | topic [| thoughts [| channel title]]");
    auto date = parse_date(fields[0]);
    if (!date) throw fail("bad batch date '" + fields[0] + "'");
    if (fields[1].empty()) throw fail("empty topic");
    PredefinedNook p;
    p.batch_date = *date;
    p.topic = fields[1];
    if (fields.size() > 2) p.initial_thoughts = fields[2];
    if (fields.size() > 3) {
      p.channel_title = fields[3];
      if (!validate_channel_title(p.channel_title).empty()) throw fail("invalid channel title '" + p.channel_title + "'");
    }
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace nooks
