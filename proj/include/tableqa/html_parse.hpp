#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "tableqa/table.hpp"

namespace tableqa {

// Parses the recognizer's table subset: table/thead/tbody/tr/td/th with
// rowspan, colspan and data-bbox="x1,y1,x2,y2" attributes. Only the first
// <table> element is read. Invalid span attributes clamp to 1 with a warning;
// invalid bounding boxes are dropped with a warning.
//
// Throws Error(errc::malformed_html) when the input has no <table> element or
// the table is never closed.
RawTable parse_table_html(std::string_view html, std::vector<std::string>* warnings = nullptr);

// True iff the input contains no <table> element or every cell of the (first)
// table is empty after whitespace normalization. Total: never throws.
bool detect_blank(std::string_view html);

}  // namespace tableqa
