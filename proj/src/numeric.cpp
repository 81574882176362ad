#include "tableqa/numeric.hpp"

#include <charconv>
#include <cmath>

#include "tableqa/text.hpp"

namespace tableqa {

namespace {

// Substrings removed anywhere in the text before parsing.
constexpr std::string_view kStripped[] = {
    "$",
    "\xE2\x82\xAC",  // euro sign
    "\xC2\xA3",      // pound sign
    ",",
    "%",
};

void erase_all(std::string& s, std::string_view needle) {
  std::size_t pos = 0;
  while ((pos = s.find(needle, pos)) != std::string::npos) s.erase(pos, needle.size());
}

}  // namespace

std::optional<double> normalize_numeric(std::string_view text) {
  std::string s = trim(text);
  if (s.empty()) return std::nullopt;

  bool paren_negative = false;
  if (s.size() >= 2 && s.front() == '(' && s.back() == ')') {
    paren_negative = true;
    s = trim(std::string_view(s).substr(1, s.size() - 2));
  }
  for (std::string_view needle : kStripped) erase_all(s, needle);
  s = trim(s);
  if (s.empty()) return std::nullopt;

  if (s.front() == '+') s.erase(0, 1);
  // Plain decimals only: sign, digits, one optional point. No exponents,
  // no inf/nan spellings.
  bool seen_digit = false;
  bool seen_point = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (c == '-' && i == 0) continue;
    if (c == '.') {
      if (seen_point) return std::nullopt;
      seen_point = true;
      continue;
    }
    if (c >= '0' && c <= '9') {
      seen_digit = true;
      continue;
    }
    return std::nullopt;
  }
  if (!seen_digit) return std::nullopt;

  double value = 0;
  auto r = std::from_chars(s.data(), s.data() + s.size(), value, std::chars_format::fixed);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size() || !std::isfinite(value)) {
    return std::nullopt;
  }
  return paren_negative ? -value : value;
}

std::string render_numeric(double value) {
  if (value == 0) return "0";  // folds negative zero
  char buf[512];
  auto r = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::fixed);
  return std::string(buf, r.ptr);
}

}  // namespace tableqa
