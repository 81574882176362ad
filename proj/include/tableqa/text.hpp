#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace tableqa {

std::string trim(std::string_view s);

// Trim plus collapsing of internal whitespace runs (including U+00A0) to a
// single space. Applied to cell text at parse time so downstream emptiness
// tests are stable.
std::string normalize_whitespace(std::string_view s);

std::string to_lower_ascii(std::string_view s);

// Decodes UTF-8 into Unicode scalar values. Invalid bytes are kept as
// individual code points so the function is total.
std::vector<char32_t> utf8_codepoints(std::string_view s);

std::size_t codepoint_length(std::string_view s);

void append_utf8(std::string& out, char32_t cp);

// Lowercased maximal runs of [A-Za-z0-9] plus any non-ASCII bytes.
std::vector<std::string> tokenize(std::string_view s);

// RFC 4180 field: quoted when it contains a comma, quote, CR or LF.
std::string csv_field(std::string_view field);

}  // namespace tableqa
