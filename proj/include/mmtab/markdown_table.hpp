#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "mmtab/error.hpp"
#include "mmtab/table.hpp"
#include "mmtab/table_builder.hpp"
#include "mmtab/text.hpp"

namespace mmtab::markdown {

namespace detail {

inline bool is_ascii_punct(char c) {
  return (c >= '!' && c <= '/') || (c >= ':' && c <= '@') || (c >= '[' && c <= '`') || (c >= '{' && c <= '~');
}

inline std::string loc(std::size_t line) { return "line " + std::to_string(line); }

/// Splits a pipe row into raw (still escaped) cells. Leading and trailing
/// pipes are optional.
inline std::vector<std::string> split_raw(std::string_view line) {
  std::string_view s = text::trim(line);
  if (!s.empty() && s.front() == '|') s.remove_prefix(1);
  // Drop one unescaped trailing pipe.
  if (!s.empty() && s.back() == '|') {
    std::size_t bs = 0;
    for (std::size_t k = s.size() - 1; k > 0 && s[k - 1] == '\\'; --k) ++bs;
    if (bs % 2 == 0) s.remove_suffix(1);
  }
  std::vector<std::string> cells;
  std::string cur;
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (s[k] == '\\' && k + 1 < s.size()) {
      cur.push_back(s[k]);
      cur.push_back(s[++k]);
    } else if (s[k] == '|') {
      cells.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(s[k]);
    }
  }
  cells.push_back(std::move(cur));
  return cells;
}

inline bool has_unescaped_pipe(std::string_view line) {
  for (std::size_t k = 0; k < line.size(); ++k) {
    if (line[k] == '\\') {
      ++k;
    } else if (line[k] == '|') {
      return true;
    }
  }
  return false;
}

inline bool is_separator_cell(std::string_view raw) {
  std::string_view s = text::trim(raw);
  if (!s.empty() && s.front() == ':') s.remove_prefix(1);
  if (!s.empty() && s.back() == ':') s.remove_suffix(1);
  if (s.empty()) return false;
  for (char c : s)
    if (c != '-') return false;
  return true;
}

inline bool is_separator_row(const std::vector<std::string>& raw) {
  for (const auto& c : raw)
    if (!is_separator_cell(c)) return false;
  return !raw.empty();
}

inline std::string unescape(std::string_view raw) {
  std::string out;
  for (std::size_t k = 0; k < raw.size(); ++k) {
    if (raw[k] == '\\' && k + 1 < raw.size() && is_ascii_punct(raw[k + 1])) {
      out.push_back(raw[++k]);
    } else {
      out.push_back(raw[k]);
    }
  }
  return text::normalize_space(out);
}

inline std::string escape(std::string_view content) {
  std::string out;
  if (is_separator_cell(content)) out.push_back('\\');
  for (char c : content) {
    if (c == '\\' || c == '|') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

}  // namespace detail

/// Parses a pipe table. Row 1 (above the `---` separator) is the header.
///
/// Strict mode requires the whole source to be one table with a separator on
/// line 2 and rows no wider than the header. Recovery mode takes the first
/// block of pipe rows, drops surrounding text and stray separators, and
/// widens the grid to the widest row. Either way a block without any
/// separator row is not a table; a stray `|` in prose must not parse.
inline ParseResult parse_table(std::string_view src, bool recover = false) {
  using detail::loc;
  ParseResult result;
  auto& diag = result.diagnostics;

  struct Line {
    std::size_t number;
    std::string_view text;
  };
  std::vector<Line> lines;
  {
    std::size_t b = 0, number = 1;
    while (b <= src.size()) {
      std::size_t e = src.find('\n', b);
      if (e == std::string_view::npos) e = src.size();
      std::string_view l = src.substr(b, e - b);
      if (!l.empty() && l.back() == '\r') l.remove_suffix(1);
      lines.push_back({number++, l});
      b = e + 1;
    }
  }

  std::size_t i = 0;
  while (i < lines.size() && text::trim(lines[i].text).empty()) ++i;
  if (i == lines.size()) throw ParseError("line 1", "empty source");
  while (i < lines.size() && !detail::has_unescaped_pipe(lines[i].text)) {
    if (!text::trim(lines[i].text).empty()) {
      if (!recover) throw ParseError(loc(lines[i].number), "expected a pipe-delimited table row");
      diag.warn(loc(lines[i].number), "text before table dropped");
    }
    ++i;
  }
  if (i == lines.size()) throw ParseError("line 1", "no pipe-delimited table found");

  std::vector<Line> block;
  while (i < lines.size() && detail::has_unescaped_pipe(lines[i].text)) block.push_back(lines[i++]);
  for (; i < lines.size(); ++i) {
    if (text::trim(lines[i].text).empty()) continue;
    if (!recover) throw ParseError(loc(lines[i].number), "content after table");
    diag.warn(loc(lines[i].number), "trailing content dropped");
    break;
  }

  struct SourceRow {
    std::size_t line;
    std::vector<std::string> cells;
  };
  std::vector<SourceRow> rows;
  bool has_header = false;
  bool any_separator = false;
  std::size_t separator_width = 0;
  for (std::size_t k = 0; k < block.size(); ++k) {
    auto raw = detail::split_raw(block[k].text);
    if (detail::is_separator_row(raw)) {
      any_separator = true;
      if (k == 1 && !has_header) {
        has_header = true;
        separator_width = raw.size();
        continue;
      }
      if (!recover) throw ParseError(loc(block[k].number), "separator row must follow the header row");
      diag.warn(loc(block[k].number), "stray separator row dropped");
      continue;
    }
    SourceRow row{block[k].number, {}};
    for (const auto& c : raw) row.cells.push_back(detail::unescape(c));
    rows.push_back(std::move(row));
  }
  if (!any_separator) throw ParseError(loc(block.front().number), "missing header separator row");
  if (!has_header) diag.warn(loc(block.front().number), "separator not on line 2; all rows treated as data");
  if (rows.empty()) throw ParseError(loc(block.front().number), "table has no rows");

  std::size_t width = rows.front().cells.size();
  if (recover || !has_header)
    for (const auto& r : rows) width = std::max(width, r.cells.size());
  if (has_header && separator_width != rows.front().cells.size())
    diag.warn(loc(block.front().number + 1), "separator width differs from header width");

  Table t;
  t.n_rows = static_cast<int>(rows.size());
  t.n_cols = static_cast<int>(width);
  bool padded = false;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    auto& cells = rows[r].cells;
    if (cells.size() > width)
      throw ParseError(loc(rows[r].line), "row has " + std::to_string(cells.size()) + " cells but header has " +
                                              std::to_string(width));
    if (cells.size() < width) padded = true;
    cells.resize(width);
    for (std::size_t c = 0; c < width; ++c)
      t.anchors.push_back(AnchorCell{static_cast<int>(r + 1), static_cast<int>(c + 1), 1, 1, cells[c],
                                     has_header && r == 0});
  }
  if (padded) diag.warn("table", "ragged rows padded with empty cells");
  result.table = std::move(t);
  return result;
}

/// Pipe table with row 1 as the header. Cells are "| content |" with `\` and
/// `|` escaped; no trailing newline.
inline std::string serialize_table(const Table& table) {
  require_valid(table);
  if (table.has_merged_cells())
    throw UnrepresentableInFormat("markdown tables cannot express merged cells");
  const Grid grid = expand_grid(table);
  std::string out;
  for (int r = 1; r <= grid.n_rows(); ++r) {
    if (r > 1) out += '\n';
    out += '|';
    for (int c = 1; c <= grid.n_cols(); ++c) out += " " + detail::escape(grid.content(r, c)) + " |";
    if (r == 1) {
      out += "\n|";
      for (int c = 1; c <= grid.n_cols(); ++c) out += " --- |";
    }
  }
  return out;
}

}  // namespace mmtab::markdown
