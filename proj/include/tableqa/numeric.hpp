#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace tableqa {

// Floor for relative-error denominators so division by a zero ground truth
// stays defined.
inline constexpr double kNumericEpsilon = 1e-9;

// Parses financial renderings into numbers: currency symbols ($, €, £),
// thousands-separator commas and percent signs are stripped, and "(x)" means
// -x (accounting notation). Absent result signals non-numeric text.
std::optional<double> normalize_numeric(std::string_view text);

// Canonical textual form: no thousands separators, '.' decimal point, '-'
// sign prefix, no trailing zeros. normalize_numeric(render_numeric(v)) == v.
std::string render_numeric(double value);

}  // namespace tableqa
