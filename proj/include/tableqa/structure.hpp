#pragma once

#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "tableqa/table.hpp"

namespace tableqa {

enum class HeaderCondition { ColumnSpan, NanCell, DuplicateValue, Fallback };

struct HeaderPrediction {
  int header_row_count = 1;
  // One entry per header row, in row order.
  std::vector<std::set<HeaderCondition>> triggered_conditions;
};

enum class HierarchyAlgorithm { V1, V2 };

struct HierarchyOptions {
  HierarchyAlgorithm algorithm = HierarchyAlgorithm::V1;
  double indent_threshold = 10.0;  // pixels
  std::string separator = " - ";   // between child text and hierarchical text
  bool drop_label_rows = true;
};

// Column names plus data rows after header prediction and hierarchy
// flattening. Every row has exactly columns.size() entries.
struct StructuredTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  int header_row_count = 0;
  std::vector<int> dropped_label_rows;  // grid row indices
  // Per data cell: origin (row, col) in the source grid.
  std::vector<std::vector<std::pair<int, int>>> provenance;
};

// Glyphs that stand in for a missing value when they are the entire cell text.
const std::vector<std::string>& default_placeholder_glyphs();

bool is_empty_cell(const Cell& cell);
bool is_empty_cell(const Cell& cell, const std::vector<std::string>& placeholder_glyphs);

// Scans rows from the top; a row is a header row when it contains a cell
// spanning multiple columns, an empty cell, or two cells with identical
// non-empty text. The scan stops at the first row matching none; when the
// very first row matches none it is the header anyway (fallback). The count
// is capped at min(5, n_rows - 1) when the grid has at least two rows.
// Throws Error(errc::empty_grid) on a zero-row grid.
HeaderPrediction predict_headers(const Grid& grid);

// Row-hierarchy flattening over slot-expanded data rows. Only first-column
// texts are mutated; the row count is preserved. label_rows, when given,
// receives one flag per row marking rows that became the hierarchical cell.
std::vector<std::vector<Cell>> flatten_hierarchy_v1(std::vector<std::vector<Cell>> data_rows,
                                                    const std::string& separator = " - ",
                                                    std::vector<char>* label_rows = nullptr);

// Bounding-box-aware variant: when first-column indentation varies in this
// table by more than indent_threshold, a row whose first cell is not indented
// relative to the current hierarchical cell ends the hierarchy. Rows lacking
// boxes fall back to the v1 behaviour, so a box-free table reduces to v1.
std::vector<std::vector<Cell>> flatten_hierarchy_v2(std::vector<std::vector<Cell>> data_rows,
                                                    const HierarchyOptions& options,
                                                    std::vector<char>* label_rows = nullptr);

// predict_headers + column-name merging + hierarchy flattening.
StructuredTable build_structured(const Grid& grid, const HierarchyOptions& options = {});

nlohmann::ordered_json table_to_json(const StructuredTable& table);  // "table/1"
StructuredTable table_from_json(const nlohmann::json& doc);

// Columns as the first record, RFC 4180 quoting, CRLF record ends.
std::string table_to_csv(const StructuredTable& table);

}  // namespace tableqa
