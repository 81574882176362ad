#include "tableqa/html_parse.hpp"

#include <charconv>
#include <cstdlib>
#include <utility>

#include "tableqa/error.hpp"
#include "tableqa/text.hpp"

namespace tableqa {

namespace {

constexpr int kMaxSpan = 1000;  // matches the HTML colspan ceiling

struct Attr {
  std::string name;  // lowercased
  std::string value;
};

struct Tag {
  std::string name;  // lowercased
  bool closing = false;
  bool self_closing = false;
  std::vector<Attr> attrs;

  const std::string* attr(std::string_view name) const {
    for (const auto& a : attrs) {
      if (a.name == name) return &a.value;
    }
    return nullptr;
  }
};

bool is_name_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-';
}

char lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

// Decodes the named and numeric entities the recognizer output can contain.
// &nbsp; becomes a plain space so emptiness tests see through it.
std::string decode_entities(std::string_view in) {
  std::string out;
  out.reserve(in.size());
  std::size_t i = 0;
  while (i < in.size()) {
    if (in[i] != '&') {
      out.push_back(in[i]);
      ++i;
      continue;
    }
    std::size_t semi = in.find(';', i + 1);
    if (semi == std::string_view::npos || semi - i > 12) {
      out.push_back(in[i]);
      ++i;
      continue;
    }
    std::string_view ent = in.substr(i + 1, semi - i - 1);
    bool handled = true;
    if (ent == "amp") {
      out.push_back('&');
    } else if (ent == "lt") {
      out.push_back('<');
    } else if (ent == "gt") {
      out.push_back('>');
    } else if (ent == "quot") {
      out.push_back('"');
    } else if (ent == "apos") {
      out.push_back('\'');
    } else if (ent == "nbsp") {
      out.push_back(' ');
    } else if (!ent.empty() && ent[0] == '#') {
      unsigned long cp = 0;
      const char* first = ent.data() + 1;
      const char* last = ent.data() + ent.size();
      std::from_chars_result r{};
      if (ent.size() > 1 && (ent[1] == 'x' || ent[1] == 'X')) {
        r = std::from_chars(first + 1, last, cp, 16);
      } else {
        r = std::from_chars(first, last, cp, 10);
      }
      if (r.ec == std::errc() && r.ptr == last && cp <= 0x10FFFF) {
        append_utf8(out, static_cast<char32_t>(cp));
      } else {
        handled = false;
      }
    } else {
      handled = false;
    }
    if (handled) {
      i = semi + 1;
    } else {
      out.push_back(in[i]);
      ++i;
    }
  }
  return out;
}

// Scans one tag starting at pos (which points at '<'). Returns false when the
// text is not a tag; advances pos past whatever was consumed.
bool scan_tag(std::string_view html, std::size_t& pos, Tag& tag) {
  std::size_t i = pos + 1;
  if (i >= html.size()) return false;
  if (html.compare(i, 3, "!--") == 0) {
    std::size_t end = html.find("-->", i + 3);
    pos = (end == std::string_view::npos) ? html.size() : end + 3;
    tag = Tag{};
    tag.name = "!comment";
    return true;
  }
  if (html[i] == '!' || html[i] == '?') {
    std::size_t end = html.find('>', i);
    pos = (end == std::string_view::npos) ? html.size() : end + 1;
    tag = Tag{};
    tag.name = "!decl";
    return true;
  }
  tag = Tag{};
  if (html[i] == '/') {
    tag.closing = true;
    ++i;
  }
  if (i >= html.size() || !((html[i] >= 'a' && html[i] <= 'z') || (html[i] >= 'A' && html[i] <= 'Z'))) {
    return false;  // stray '<'
  }
  while (i < html.size() && is_name_char(html[i])) {
    tag.name.push_back(lower(html[i]));
    ++i;
  }
  // Attributes until '>' (quoted values may contain '>').
  while (i < html.size() && html[i] != '>') {
    if (html[i] == '/' && i + 1 < html.size() && html[i + 1] == '>') {
      tag.self_closing = true;
      i += 2;
      pos = i;
      return true;
    }
    if (static_cast<unsigned char>(html[i]) <= ' ') {
      ++i;
      continue;
    }
    Attr attr;
    while (i < html.size() && html[i] != '=' && html[i] != '>' && html[i] != '/' &&
           static_cast<unsigned char>(html[i]) > ' ') {
      attr.name.push_back(lower(html[i]));
      ++i;
    }
    while (i < html.size() && static_cast<unsigned char>(html[i]) <= ' ') ++i;
    if (i < html.size() && html[i] == '=') {
      ++i;
      while (i < html.size() && static_cast<unsigned char>(html[i]) <= ' ') ++i;
      if (i < html.size() && (html[i] == '"' || html[i] == '\'')) {
        char quote = html[i];
        ++i;
        while (i < html.size() && html[i] != quote) {
          attr.value.push_back(html[i]);
          ++i;
        }
        if (i < html.size()) ++i;
      } else {
        while (i < html.size() && html[i] != '>' && static_cast<unsigned char>(html[i]) > ' ') {
          attr.value.push_back(html[i]);
          ++i;
        }
      }
    }
    if (!attr.name.empty()) tag.attrs.push_back(std::move(attr));
  }
  if (i >= html.size()) {
    // '<tag' without '>' runs to end of input; consume it all.
    pos = html.size();
    return true;
  }
  pos = i + 1;
  return true;
}

int parse_span_attr(const std::string& value, const char* which, std::vector<std::string>* warnings) {
  std::string v = trim(value);
  long parsed = 0;
  const char* first = v.data();
  const char* last = v.data() + v.size();
  auto r = std::from_chars(first, last, parsed, 10);
  if (v.empty() || r.ec != std::errc() || r.ptr != last || parsed < 1) {
    warn(warnings, std::string("invalid ") + which + " attribute \"" + value + "\"; clamped to 1");
    return 1;
  }
  if (parsed > kMaxSpan) {
    warn(warnings, std::string(which) + " " + v + " exceeds " + std::to_string(kMaxSpan) +
                       "; clamped");
    return kMaxSpan;
  }
  return static_cast<int>(parsed);
}

std::optional<BBox> parse_bbox_attr(const std::string& value, std::vector<std::string>* warnings) {
  double nums[4];
  std::size_t start = 0;
  for (int k = 0; k < 4; ++k) {
    std::size_t comma = value.find(',', start);
    bool last_field = (k == 3);
    if (!last_field && comma == std::string::npos) {
      warn(warnings, "malformed data-bbox \"" + value + "\"; dropped");
      return std::nullopt;
    }
    std::string field = trim(value.substr(start, last_field ? std::string::npos : comma - start));
    const char* first = field.data();
    const char* last = field.data() + field.size();
    auto r = std::from_chars(first, last, nums[k]);
    if (field.empty() || r.ec != std::errc() || r.ptr != last) {
      warn(warnings, "malformed data-bbox \"" + value + "\"; dropped");
      return std::nullopt;
    }
    start = comma + 1;
  }
  BBox box{nums[0], nums[1], nums[2], nums[3]};
  if (!box.valid()) {
    warn(warnings, "data-bbox \"" + value + "\" violates x1<=x2, y1<=y2, >=0; dropped");
    return std::nullopt;
  }
  return box;
}

struct ScanResult {
  RawTable table;
  bool found_table = false;
  bool closed = false;
};

ScanResult scan_first_table(std::string_view html, std::vector<std::string>* warnings) {
  ScanResult result;
  std::size_t pos = 0;
  int table_depth = 0;
  bool row_open = false;
  bool cell_open = false;
  Cell cell;
  std::string cell_text;
  std::vector<Cell> row;

  auto close_cell = [&]() {
    if (!cell_open) return;
    cell.text = normalize_whitespace(decode_entities(cell_text));
    row.push_back(std::move(cell));
    cell = Cell{};
    cell_text.clear();
    cell_open = false;
  };
  auto close_row = [&]() {
    close_cell();
    if (!row_open) return;
    result.table.rows.push_back(std::move(row));
    row.clear();
    row_open = false;
  };
  auto open_cell = [&](const Tag& tag) {
    close_cell();
    if (!row_open) {
      // Recognizer noise: a cell outside any <tr> starts an implicit row.
      warn(warnings, "cell outside <tr>; implicit row opened");
      row_open = true;
    }
    cell = Cell{};
    cell.from_th = (tag.name == "th");
    if (const std::string* v = tag.attr("rowspan")) cell.row_span = parse_span_attr(*v, "rowspan", warnings);
    if (const std::string* v = tag.attr("colspan")) cell.col_span = parse_span_attr(*v, "colspan", warnings);
    if (const std::string* v = tag.attr("data-bbox")) cell.bbox = parse_bbox_attr(*v, warnings);
    if (tag.self_closing) {
      cell_open = true;
      close_cell();
    } else {
      cell_open = true;
    }
  };

  while (pos < html.size()) {
    if (table_depth == 0) {
      // Look for the opening <table ...> of the first table.
      std::size_t lt = html.find('<', pos);
      if (lt == std::string_view::npos) break;
      std::size_t scan = lt;
      Tag tag;
      if (!scan_tag(html, scan, tag)) {
        pos = lt + 1;
        continue;
      }
      pos = scan;
      if (!tag.closing && tag.name == "table") {
        if (result.found_table) {
          warn(warnings, "multiple <table> elements; only the first is processed");
          break;
        }
        result.found_table = true;
        table_depth = 1;
      }
      continue;
    }

    std::size_t lt = html.find('<', pos);
    if (lt == std::string_view::npos) {
      if (cell_open) cell_text.append(html.substr(pos));
      pos = html.size();
      break;
    }
    if (lt > pos && cell_open) cell_text.append(html.substr(pos, lt - pos));
    std::size_t scan = lt;
    Tag tag;
    if (!scan_tag(html, scan, tag)) {
      if (cell_open) cell_text.push_back('<');
      pos = lt + 1;
      continue;
    }
    pos = scan;
    if (tag.name == "!comment" || tag.name == "!decl") continue;

    if (tag.name == "table") {
      // Nested tables are outside the recognizer subset; keep depth so the
      // outer table is not closed early, their tags stay transparent.
      if (tag.closing) {
        --table_depth;
        if (table_depth == 0) {
          close_row();
          result.closed = true;
          // Only the first table is processed; check for trailing tables.
          std::size_t next = html.find("<table", pos);
          std::size_t next_upper = html.find("<TABLE", pos);
          if (next != std::string_view::npos || next_upper != std::string_view::npos) {
            warn(warnings, "multiple <table> elements; only the first is processed");
          }
          break;
        }
      } else if (!tag.self_closing) {
        ++table_depth;
        warn(warnings, "nested <table>; treated as inline content");
      }
      continue;
    }
    if (table_depth > 1) continue;  // inside a nested table: transparent

    if (tag.name == "tr") {
      if (tag.closing) {
        close_row();
      } else {
        close_row();
        row_open = true;
      }
    } else if (tag.name == "td" || tag.name == "th") {
      if (tag.closing) {
        close_cell();
      } else {
        open_cell(tag);
      }
    } else if (tag.name == "thead" || tag.name == "tbody" || tag.name == "tfoot") {
      // transparent grouping
    } else {
      // Inline markup inside a cell contributes nothing; <br> separates words.
      if (cell_open && tag.name == "br") cell_text.push_back(' ');
    }
  }
  if (!result.closed) close_row();
  return result;
}

}  // namespace

RawTable parse_table_html(std::string_view html, std::vector<std::string>* warnings) {
  ScanResult scan = scan_first_table(html, warnings);
  if (!scan.found_table) raise(errc::malformed_html, "no <table> element");
  if (!scan.closed) raise(errc::malformed_html, "unclosed <table> element");
  return std::move(scan.table);
}

bool detect_blank(std::string_view html) {
  ScanResult scan = scan_first_table(html, nullptr);
  if (!scan.found_table) return true;
  for (const auto& row : scan.table.rows) {
    for (const auto& cell : row) {
      if (!cell.text.empty()) return false;
    }
  }
  return true;
}

}  // namespace tableqa
