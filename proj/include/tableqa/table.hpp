#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace tableqa {

// Cell box in image pixel coordinates, origin top-left.
struct BBox {
  double x1 = 0;
  double y1 = 0;
  double x2 = 0;
  double y2 = 0;

  bool valid() const { return x1 >= 0 && y1 >= 0 && x1 <= x2 && y1 <= y2; }

  friend bool operator==(const BBox&, const BBox&) = default;
};

struct Cell {
  std::string text;            // whitespace-normalized at parse time
  int row_span = 1;
  int col_span = 1;
  std::optional<BBox> bbox;
  int origin_row = -1;         // set once the cell is placed into a Grid
  int origin_col = -1;
  bool from_th = false;        // recorded, not trusted for header decisions
  bool synthetic = false;      // padding cell added during normalization
};

// Cells as written in the HTML: origin cells only, spans unexpanded, rows in
// document order (possibly ragged).
struct RawTable {
  std::vector<std::vector<Cell>> rows;

  std::size_t cell_count() const {
    std::size_t n = 0;
    for (const auto& row : rows) n += row.size();
    return n;
  }
};

// Rectangular matrix where every slot is covered by exactly one origin cell.
struct Grid {
  int n_rows = 0;
  int n_cols = 0;
  std::vector<Cell> cells;  // origin cells, including synthetic padding
  std::vector<int> slots;   // row-major n_rows*n_cols, index into cells

  int cell_index_at(int row, int col) const {
    return slots[static_cast<std::size_t>(row) * static_cast<std::size_t>(n_cols) +
                 static_cast<std::size_t>(col)];
  }

  const Cell& at(int row, int col) const { return cells[static_cast<std::size_t>(cell_index_at(row, col))]; }
};

}  // namespace tableqa
