#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "tableqa/table.hpp"

namespace tableqa {

// Span expansion: scans rows in order, places each origin cell at the
// leftmost unoccupied column of its row and marks every slot its spans cover.
// Ragged rows are padded with synthetic empty cells; spans that collide with
// earlier cells or run past the last row are truncated with a warning.
// Total: pathological inputs degrade, they never fail.
Grid normalize_grid(const RawTable& raw, std::vector<std::string>* warnings = nullptr);

// "grid/1" schema, origin cells only, row-major order. Field order is fixed.
nlohmann::ordered_json grid_to_json(const Grid& grid);

// Validates the schema tag and exact slot coverage; throws
// Error(errc::invalid_schema) otherwise.
Grid grid_from_json(const nlohmann::json& doc);

// Re-emits origin cells with their spans and bounding boxes. Reparsing the
// result yields a structurally identical grid.
std::string to_canonical_html(const Grid& grid);

}  // namespace tableqa
