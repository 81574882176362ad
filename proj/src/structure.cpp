#include "tableqa/structure.hpp"

#include <algorithm>

#include "tableqa/error.hpp"
#include "tableqa/text.hpp"

namespace tableqa {

namespace {

// Distinct origin cells covering a grid row, left to right.
std::vector<const Cell*> row_cells(const Grid& grid, int r) {
  std::vector<const Cell*> cells;
  int last_index = -1;
  for (int c = 0; c < grid.n_cols; ++c) {
    int index = grid.cell_index_at(r, c);
    if (index != last_index) {
      cells.push_back(&grid.cells[static_cast<std::size_t>(index)]);
      last_index = index;
    }
  }
  return cells;
}

bool same_origin(const Cell& a, const Cell& b) {
  return a.origin_row == b.origin_row && a.origin_col == b.origin_col;
}

// True when slots 1..n-1 hold no non-empty cell other than the first cell
// itself (a colspan label covers several slots but carries no values).
bool non_first_cells_all_empty(const std::vector<Cell>& row) {
  for (std::size_t c = 1; c < row.size(); ++c) {
    if (same_origin(row[c], row[0])) continue;
    if (!is_empty_cell(row[c])) return false;
  }
  return true;
}

}  // namespace

const std::vector<std::string>& default_placeholder_glyphs() {
  static const std::vector<std::string> glyphs = {
      "\xE2\x80\x94",  // em dash
      "\xE2\x80\x93",  // en dash
      "-",
      ".",
  };
  return glyphs;
}

bool is_empty_cell(const Cell& cell) { return is_empty_cell(cell, default_placeholder_glyphs()); }

bool is_empty_cell(const Cell& cell, const std::vector<std::string>& placeholder_glyphs) {
  if (cell.text.empty()) return true;
  for (const auto& glyph : placeholder_glyphs) {
    if (cell.text == glyph) return true;
  }
  return false;
}

HeaderPrediction predict_headers(const Grid& grid) {
  if (grid.n_rows == 0) raise(errc::empty_grid, "cannot predict headers of an empty grid");

  const int cap = grid.n_rows >= 2 ? std::min(5, grid.n_rows - 1) : 1;
  HeaderPrediction prediction;
  prediction.header_row_count = 0;

  for (int r = 0; r < grid.n_rows && prediction.header_row_count < cap; ++r) {
    std::vector<const Cell*> cells = row_cells(grid, r);
    std::set<HeaderCondition> conditions;
    for (const Cell* cell : cells) {
      if (cell->col_span > 1) conditions.insert(HeaderCondition::ColumnSpan);
      if (is_empty_cell(*cell)) conditions.insert(HeaderCondition::NanCell);
    }
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (is_empty_cell(*cells[i])) continue;
      for (std::size_t j = i + 1; j < cells.size(); ++j) {
        if (!is_empty_cell(*cells[j]) && cells[i]->text == cells[j]->text) {
          conditions.insert(HeaderCondition::DuplicateValue);
          break;
        }
      }
      if (conditions.count(HeaderCondition::DuplicateValue)) break;
    }
    if (conditions.empty()) break;
    prediction.triggered_conditions.push_back(std::move(conditions));
    ++prediction.header_row_count;
  }

  if (prediction.header_row_count == 0) {
    // No heuristic fired on the first row: it is the header regardless.
    prediction.header_row_count = 1;
    prediction.triggered_conditions.push_back({HeaderCondition::Fallback});
  }
  return prediction;
}

namespace {

enum class Branch { SetHierarchy, Reset, ResetByIndent, Concat, None };

struct FlattenHooks {
  // Extra reset branch used by v2; evaluated between Reset and Concat.
  bool use_indent = false;
  bool different_bbox_flag = false;
  double indent_threshold = 0;
};

std::vector<std::vector<Cell>> flatten_common(std::vector<std::vector<Cell>> rows,
                                              const std::string& separator,
                                              const FlattenHooks& hooks,
                                              std::vector<char>* label_rows) {
  if (label_rows != nullptr) label_rows->assign(rows.size(), 0);

  const Cell* hierarchical_cell = nullptr;
  Cell hierarchical_copy;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto& row = rows[i];
    if (row.empty()) continue;
    Cell& first = row[0];
    // A one-column row has no r[1]; treat the missing cell as empty.
    bool second_empty = row.size() < 2 || is_empty_cell(row[1]);
    bool first_is_colspan = first.col_span > 1;

    if (first_is_colspan || second_empty) {
      hierarchical_copy = first;
      hierarchical_cell = &hierarchical_copy;
      if (label_rows != nullptr) (*label_rows)[i] = 1;
    } else if (first.row_span > 1 || is_empty_cell(first)) {
      hierarchical_cell = nullptr;
    } else if (hooks.use_indent && hooks.different_bbox_flag && hierarchical_cell != nullptr &&
               first.bbox.has_value() && hierarchical_cell->bbox.has_value() &&
               first.bbox->x1 - hierarchical_cell->bbox->x1 < hooks.indent_threshold) {
      // Not indented relative to the putative parent: the hierarchy ended.
      hierarchical_cell = nullptr;
    } else if (hierarchical_cell != nullptr) {
      first.text = first.text + separator + hierarchical_cell->text;
    }
  }
  return rows;
}

}  // namespace

std::vector<std::vector<Cell>> flatten_hierarchy_v1(std::vector<std::vector<Cell>> data_rows,
                                                    const std::string& separator,
                                                    std::vector<char>* label_rows) {
  return flatten_common(std::move(data_rows), separator, FlattenHooks{}, label_rows);
}

std::vector<std::vector<Cell>> flatten_hierarchy_v2(std::vector<std::vector<Cell>> data_rows,
                                                    const HierarchyOptions& options,
                                                    std::vector<char>* label_rows) {
  // Box geometry is only trusted when first-column indentation actually
  // varies in this table; otherwise this reduces to the text-only variant.
  FlattenHooks hooks;
  hooks.use_indent = true;
  hooks.indent_threshold = options.indent_threshold;
  double min_x1 = 0;
  double max_x1 = 0;
  bool seen = false;
  for (const auto& row : data_rows) {
    if (row.empty() || !row[0].bbox.has_value()) continue;
    double x1 = row[0].bbox->x1;
    if (!seen) {
      min_x1 = max_x1 = x1;
      seen = true;
    } else {
      min_x1 = std::min(min_x1, x1);
      max_x1 = std::max(max_x1, x1);
    }
  }
  hooks.different_bbox_flag = seen && (max_x1 - min_x1) > options.indent_threshold;
  return flatten_common(std::move(data_rows), options.separator, hooks, label_rows);
}

StructuredTable build_structured(const Grid& grid, const HierarchyOptions& options) {
  if (grid.n_rows == 0) raise(errc::empty_grid, "cannot structure an empty grid");

  HeaderPrediction prediction = predict_headers(grid);
  const int h = prediction.header_row_count;

  StructuredTable table;
  table.header_row_count = h;

  // Column names: top-to-bottom concatenation of header-cell texts, single
  // space separated, consecutive duplicates from span expansion collapsed.
  for (int c = 0; c < grid.n_cols; ++c) {
    std::vector<std::string> parts;
    for (int r = 0; r < h; ++r) {
      const std::string& text = grid.at(r, c).text;
      if (text.empty()) continue;
      if (!parts.empty() && parts.back() == text) continue;
      parts.push_back(text);
    }
    std::string name;
    for (std::size_t i = 0; i < parts.size(); ++i) {
      if (i > 0) name += ' ';
      name += parts[i];
    }
    if (name.empty()) name = "col" + std::to_string(c);
    table.columns.push_back(std::move(name));
  }

  // Slot-expanded data rows.
  std::vector<std::vector<Cell>> data_rows;
  for (int r = h; r < grid.n_rows; ++r) {
    std::vector<Cell> row;
    row.reserve(static_cast<std::size_t>(grid.n_cols));
    for (int c = 0; c < grid.n_cols; ++c) row.push_back(grid.at(r, c));
    data_rows.push_back(std::move(row));
  }

  std::vector<char> label_rows;
  if (options.algorithm == HierarchyAlgorithm::V1) {
    data_rows = flatten_hierarchy_v1(std::move(data_rows), options.separator, &label_rows);
  } else {
    data_rows = flatten_hierarchy_v2(std::move(data_rows), options, &label_rows);
  }

  for (std::size_t i = 0; i < data_rows.size(); ++i) {
    int grid_row = h + static_cast<int>(i);
    if (options.drop_label_rows && label_rows[i] && non_first_cells_all_empty(data_rows[i])) {
      table.dropped_label_rows.push_back(grid_row);
      continue;
    }
    std::vector<std::string> texts;
    std::vector<std::pair<int, int>> origins;
    texts.reserve(data_rows[i].size());
    origins.reserve(data_rows[i].size());
    for (const Cell& cell : data_rows[i]) {
      texts.push_back(cell.text);
      origins.emplace_back(cell.origin_row, cell.origin_col);
    }
    table.rows.push_back(std::move(texts));
    table.provenance.push_back(std::move(origins));
  }
  return table;
}

nlohmann::ordered_json table_to_json(const StructuredTable& table) {
  nlohmann::ordered_json doc;
  doc["schema"] = "table/1";
  doc["columns"] = table.columns;
  doc["rows"] = table.rows;
  doc["header_row_count"] = table.header_row_count;
  doc["dropped_label_rows"] = table.dropped_label_rows;
  auto& provenance = doc["provenance"] = nlohmann::ordered_json::array();
  for (const auto& row : table.provenance) {
    nlohmann::ordered_json cells = nlohmann::ordered_json::array();
    for (const auto& [r, c] : row) cells.push_back({r, c});
    provenance.push_back(std::move(cells));
  }
  return doc;
}

StructuredTable table_from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || doc.value("schema", "") != "table/1") {
    raise(errc::invalid_schema, "expected \"schema\": \"table/1\"");
  }
  StructuredTable table;
  try {
    table.columns = doc.at("columns").get<std::vector<std::string>>();
    table.rows = doc.at("rows").get<std::vector<std::vector<std::string>>>();
    table.header_row_count = doc.at("header_row_count").get<int>();
    if (doc.contains("dropped_label_rows")) {
      table.dropped_label_rows = doc.at("dropped_label_rows").get<std::vector<int>>();
    }
    if (doc.contains("provenance")) {
      for (const auto& row : doc.at("provenance")) {
        std::vector<std::pair<int, int>> origins;
        for (const auto& cell : row) {
          if (!cell.is_array() || cell.size() != 2) {
            raise(errc::invalid_schema, "provenance entries must be [row, col]");
          }
          origins.emplace_back(cell[0].get<int>(), cell[1].get<int>());
        }
        table.provenance.push_back(std::move(origins));
      }
    }
  } catch (const nlohmann::json::exception& e) {
    raise(errc::invalid_schema, std::string("malformed table JSON: ") + e.what());
  }
  for (const auto& row : table.rows) {
    if (row.size() != table.columns.size()) {
      raise(errc::invalid_schema, "row width does not match column count");
    }
  }
  return table;
}

std::string table_to_csv(const StructuredTable& table) {
  std::string out;
  auto write_record = [&out](const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i > 0) out.push_back(',');
      out += csv_field(fields[i]);
    }
    out += "\r\n";
  };
  write_record(table.columns);
  for (const auto& row : table.rows) write_record(row);
  return out;
}

}  // namespace tableqa
