#include "tableqa/grid.hpp"

#include <algorithm>
#include <charconv>
#include <limits>

#include "tableqa/error.hpp"

namespace tableqa {

namespace {

std::string format_double(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

void escape_html_into(std::string& out, const std::string& text) {
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out.push_back(c);
    }
  }
}

}  // namespace

Grid normalize_grid(const RawTable& raw, std::vector<std::string>* warnings) {
  const int n_rows = static_cast<int>(raw.rows.size());
  Grid grid;
  grid.n_rows = n_rows;

  // Growable per-row occupancy; -1 = free.
  std::vector<std::vector<int>> occ(static_cast<std::size_t>(n_rows));
  auto occupied = [&](int r, int c) {
    const auto& row = occ[static_cast<std::size_t>(r)];
    return c < static_cast<int>(row.size()) && row[static_cast<std::size_t>(c)] >= 0;
  };
  auto mark = [&](int r, int c, int cell_index) {
    auto& row = occ[static_cast<std::size_t>(r)];
    if (c >= static_cast<int>(row.size())) row.resize(static_cast<std::size_t>(c) + 1, -1);
    row[static_cast<std::size_t>(c)] = cell_index;
  };

  for (int r = 0; r < n_rows; ++r) {
    for (const Cell& source : raw.rows[static_cast<std::size_t>(r)]) {
      int c = 0;
      while (occupied(r, c)) ++c;

      int col_span = std::max(1, source.col_span);
      int row_span = std::max(1, source.row_span);
      if (row_span > n_rows - r) {
        warn(warnings, "rowspan at (" + std::to_string(r) + "," + std::to_string(c) +
                           ") extends past the last row; truncated");
        row_span = n_rows - r;
      }
      // Truncate the width to the free run starting at the chosen column.
      int width = 1;
      while (width < col_span && !occupied(r, c + width)) ++width;
      if (width != col_span) {
        warn(warnings, "colspan at (" + std::to_string(r) + "," + std::to_string(c) +
                           ") overlaps an earlier cell; truncated");
        col_span = width;
      }
      // Truncate the height at the first lower row where any covered slot is taken.
      for (int rr = r + 1; rr < r + row_span; ++rr) {
        bool collision = false;
        for (int cc = c; cc < c + col_span; ++cc) {
          if (occupied(rr, cc)) {
            collision = true;
            break;
          }
        }
        if (collision) {
          warn(warnings, "rowspan at (" + std::to_string(r) + "," + std::to_string(c) +
                             ") overlaps an earlier cell; truncated");
          row_span = rr - r;
          break;
        }
      }

      Cell placed = source;
      placed.origin_row = r;
      placed.origin_col = c;
      placed.row_span = row_span;
      placed.col_span = col_span;
      int index = static_cast<int>(grid.cells.size());
      grid.cells.push_back(std::move(placed));
      for (int rr = r; rr < r + row_span; ++rr) {
        for (int cc = c; cc < c + col_span; ++cc) mark(rr, cc, index);
      }
    }
  }

  int n_cols = 0;
  for (const auto& row : occ) n_cols = std::max(n_cols, static_cast<int>(row.size()));
  grid.n_cols = n_cols;

  grid.slots.assign(static_cast<std::size_t>(n_rows) * static_cast<std::size_t>(n_cols), -1);
  for (int r = 0; r < n_rows; ++r) {
    for (int c = 0; c < n_cols; ++c) {
      std::size_t slot = static_cast<std::size_t>(r) * static_cast<std::size_t>(n_cols) +
                         static_cast<std::size_t>(c);
      const auto& row = occ[static_cast<std::size_t>(r)];
      int index = c < static_cast<int>(row.size()) ? row[static_cast<std::size_t>(c)] : -1;
      if (index < 0) {
        Cell pad;
        pad.origin_row = r;
        pad.origin_col = c;
        pad.synthetic = true;
        index = static_cast<int>(grid.cells.size());
        grid.cells.push_back(std::move(pad));
      }
      grid.slots[slot] = index;
    }
  }
  return grid;
}

nlohmann::ordered_json grid_to_json(const Grid& grid) {
  std::vector<int> order(grid.cells.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const Cell& ca = grid.cells[static_cast<std::size_t>(a)];
    const Cell& cb = grid.cells[static_cast<std::size_t>(b)];
    if (ca.origin_row != cb.origin_row) return ca.origin_row < cb.origin_row;
    return ca.origin_col < cb.origin_col;
  });

  nlohmann::ordered_json doc;
  doc["schema"] = "grid/1";
  doc["n_rows"] = grid.n_rows;
  doc["n_cols"] = grid.n_cols;
  auto& cells = doc["cells"] = nlohmann::ordered_json::array();
  for (int i : order) {
    const Cell& cell = grid.cells[static_cast<std::size_t>(i)];
    nlohmann::ordered_json c;
    c["row"] = cell.origin_row;
    c["col"] = cell.origin_col;
    c["row_span"] = cell.row_span;
    c["col_span"] = cell.col_span;
    c["text"] = cell.text;
    if (cell.bbox) {
      c["bbox"] = {cell.bbox->x1, cell.bbox->y1, cell.bbox->x2, cell.bbox->y2};
    } else {
      c["bbox"] = nullptr;
    }
    c["synthetic"] = cell.synthetic;
    cells.push_back(std::move(c));
  }
  return doc;
}

Grid grid_from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || doc.value("schema", "") != "grid/1") {
    raise(errc::invalid_schema, "expected \"schema\": \"grid/1\"");
  }
  Grid grid;
  try {
    grid.n_rows = doc.at("n_rows").get<int>();
    grid.n_cols = doc.at("n_cols").get<int>();
    if (grid.n_rows < 0 || grid.n_cols < 0) raise(errc::invalid_schema, "negative grid size");
    grid.slots.assign(static_cast<std::size_t>(grid.n_rows) * static_cast<std::size_t>(grid.n_cols), -1);
    for (const auto& c : doc.at("cells")) {
      Cell cell;
      cell.origin_row = c.at("row").get<int>();
      cell.origin_col = c.at("col").get<int>();
      cell.row_span = c.at("row_span").get<int>();
      cell.col_span = c.at("col_span").get<int>();
      cell.text = c.at("text").get<std::string>();
      cell.synthetic = c.value("synthetic", false);
      if (c.contains("bbox") && !c.at("bbox").is_null()) {
        const auto& b = c.at("bbox");
        if (!b.is_array() || b.size() != 4) raise(errc::invalid_schema, "bbox must be [x1,y1,x2,y2]");
        cell.bbox = BBox{b[0].get<double>(), b[1].get<double>(), b[2].get<double>(), b[3].get<double>()};
      }
      if (cell.row_span < 1 || cell.col_span < 1 || cell.origin_row < 0 || cell.origin_col < 0 ||
          cell.origin_row + cell.row_span > grid.n_rows ||
          cell.origin_col + cell.col_span > grid.n_cols) {
        raise(errc::invalid_schema, "cell span out of grid bounds");
      }
      int index = static_cast<int>(grid.cells.size());
      for (int r = cell.origin_row; r < cell.origin_row + cell.row_span; ++r) {
        for (int col = cell.origin_col; col < cell.origin_col + cell.col_span; ++col) {
          int& slot = grid.slots[static_cast<std::size_t>(r) * static_cast<std::size_t>(grid.n_cols) +
                                 static_cast<std::size_t>(col)];
          if (slot != -1) raise(errc::invalid_schema, "overlapping cells in grid JSON");
          slot = index;
        }
      }
      grid.cells.push_back(std::move(cell));
    }
  } catch (const nlohmann::json::exception& e) {
    raise(errc::invalid_schema, std::string("malformed grid JSON: ") + e.what());
  }
  for (int slot : grid.slots) {
    if (slot < 0) raise(errc::invalid_schema, "grid JSON does not cover every slot");
  }
  return grid;
}

std::string to_canonical_html(const Grid& grid) {
  // Origin cells grouped by origin row, left to right.
  std::vector<std::vector<const Cell*>> by_row(static_cast<std::size_t>(grid.n_rows));
  for (const Cell& cell : grid.cells) {
    by_row[static_cast<std::size_t>(cell.origin_row)].push_back(&cell);
  }
  std::string out = "<table>";
  for (auto& row : by_row) {
    std::sort(row.begin(), row.end(),
              [](const Cell* a, const Cell* b) { return a->origin_col < b->origin_col; });
    out += "<tr>";
    for (const Cell* cell : row) {
      const char* tag = cell->from_th ? "th" : "td";
      out += "<";
      out += tag;
      if (cell->row_span > 1) out += " rowspan=\"" + std::to_string(cell->row_span) + "\"";
      if (cell->col_span > 1) out += " colspan=\"" + std::to_string(cell->col_span) + "\"";
      if (cell->bbox) {
        out += " data-bbox=\"" + format_double(cell->bbox->x1) + "," + format_double(cell->bbox->y1) +
               "," + format_double(cell->bbox->x2) + "," + format_double(cell->bbox->y2) + "\"";
      }
      out += ">";
      escape_html_into(out, cell->text);
      out += "</";
      out += tag;
      out += ">";
    }
    out += "</tr>";
  }
  out += "</table>";
  return out;
}

}  // namespace tableqa
