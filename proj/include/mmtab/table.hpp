#pragma once

#include <algorithm>
#include <compare>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "mmtab/error.hpp"

namespace mmtab {

/// 1-based (row_id, col_id) grid position.
struct CellRef {
  int row = 1;
  int col = 1;

  friend auto operator<=>(const CellRef&, const CellRef&) = default;
};

/// Top-left cell of a (possibly merged) rectangular region.
struct AnchorCell {
  int row = 1;
  int col = 1;
  int row_span = 1;
  int col_span = 1;
  std::string content;
  bool is_header = false;

  int last_row() const { return row + row_span - 1; }
  int last_col() const { return col + col_span - 1; }
  bool is_merged() const { return row_span > 1 || col_span > 1; }
  bool covers(int r, int c) const { return r >= row && r <= last_row() && c >= col && c <= last_col(); }

  friend bool operator==(const AnchorCell&, const AnchorCell&) = default;
};

/// Canonical table: a grid tiled by anchor cells.
///
/// Equality ignores `source_id` and anchor order; two tables are equal when
/// they describe the same tiling, contents, header flags and caption.
struct Table {
  int n_rows = 1;
  int n_cols = 1;
  std::vector<AnchorCell> anchors;
  std::optional<std::string> caption;
  std::string source_id;

  bool has_merged_cells() const {
    return std::any_of(anchors.begin(), anchors.end(), [](const AnchorCell& a) { return a.is_merged(); });
  }

  friend bool operator==(const Table& a, const Table& b);
};

/// Anchors sorted row-major by top-left position.
inline Table canonical(Table t) {
  std::stable_sort(t.anchors.begin(), t.anchors.end(), [](const AnchorCell& x, const AnchorCell& y) {
    return std::tie(x.row, x.col) < std::tie(y.row, y.col);
  });
  return t;
}

inline bool operator==(const Table& a, const Table& b) {
  if (a.n_rows != b.n_rows || a.n_cols != b.n_cols || a.caption != b.caption) return false;
  if (a.anchors.size() != b.anchors.size()) return false;
  Table ca = canonical(a), cb = canonical(b);
  return ca.anchors == cb.anchors;
}

enum class Violation {
  None,
  EmptyGrid,
  BadSpan,
  OutOfBounds,
  Overlap,
  Gap,
};

struct ValidationVerdict {
  Violation violation = Violation::None;
  std::optional<CellRef> position;
  std::string message;

  bool ok() const { return violation == Violation::None; }
  explicit operator bool() const { return ok(); }
};

/// Checks that the anchors tile the grid exactly once. Reports the first
/// violation found: anchors are painted in their stored order, then the grid
/// is scanned row-major for gaps.
inline ValidationVerdict validate(const Table& table) {
  auto fail = [](Violation v, std::optional<CellRef> at, std::string what) {
    std::string msg = std::move(what);
    if (at) msg += " at (" + std::to_string(at->row) + "," + std::to_string(at->col) + ")";
    return ValidationVerdict{v, at, std::move(msg)};
  };
  if (table.n_rows < 1 || table.n_cols < 1) return fail(Violation::EmptyGrid, std::nullopt, "grid has no rows or columns");

  const auto rows = static_cast<std::size_t>(table.n_rows);
  const auto cols = static_cast<std::size_t>(table.n_cols);
  std::vector<unsigned char> covered(rows * cols, 0);
  for (const auto& a : table.anchors) {
    if (a.row_span < 1 || a.col_span < 1) return fail(Violation::BadSpan, CellRef{a.row, a.col}, "non-positive span");
    if (a.row < 1 || a.col < 1 || a.last_row() > table.n_rows || a.last_col() > table.n_cols)
      return fail(Violation::OutOfBounds, CellRef{a.row, a.col}, "span outside grid");
    for (int r = a.row; r <= a.last_row(); ++r) {
      for (int c = a.col; c <= a.last_col(); ++c) {
        auto& cell = covered[static_cast<std::size_t>(r - 1) * cols + static_cast<std::size_t>(c - 1)];
        if (cell) return fail(Violation::Overlap, CellRef{r, c}, "overlap");
        cell = 1;
      }
    }
  }
  for (std::size_t i = 0; i < covered.size(); ++i) {
    if (!covered[i])
      return fail(Violation::Gap, CellRef{static_cast<int>(i / cols) + 1, static_cast<int>(i % cols) + 1}, "gap");
  }
  return {};
}

inline void require_valid(const Table& table) {
  if (auto v = validate(table); !v) throw InvalidTable(v.message);
}

/// Materialized view mapping every grid position to its covering anchor.
/// Holds pointers into the table it was built from; the table must outlive it.
class Grid {
 public:
  Grid(int n_rows, int n_cols, std::vector<const AnchorCell*> cells)
      : n_rows_(n_rows), n_cols_(n_cols), cells_(std::move(cells)) {}

  int n_rows() const { return n_rows_; }
  int n_cols() const { return n_cols_; }

  const AnchorCell& at(int row, int col) const {
    return *cells_[static_cast<std::size_t>(row - 1) * static_cast<std::size_t>(n_cols_) +
                   static_cast<std::size_t>(col - 1)];
  }
  const AnchorCell& at(CellRef ref) const { return at(ref.row, ref.col); }
  const std::string& content(int row, int col) const { return at(row, col).content; }

  std::vector<std::string> row_contents(int row) const {
    std::vector<std::string> out;
    for (int c = 1; c <= n_cols_; ++c) out.push_back(content(row, c));
    return out;
  }
  std::vector<std::string> col_contents(int col) const {
    std::vector<std::string> out;
    for (int r = 1; r <= n_rows_; ++r) out.push_back(content(r, col));
    return out;
  }

 private:
  int n_rows_;
  int n_cols_;
  std::vector<const AnchorCell*> cells_;
};

inline Grid expand_grid(const Table& table) {
  require_valid(table);
  const auto cols = static_cast<std::size_t>(table.n_cols);
  std::vector<const AnchorCell*> cells(static_cast<std::size_t>(table.n_rows) * cols, nullptr);
  for (const auto& a : table.anchors)
    for (int r = a.row; r <= a.last_row(); ++r)
      for (int c = a.col; c <= a.last_col(); ++c)
        cells[static_cast<std::size_t>(r - 1) * cols + static_cast<std::size_t>(c - 1)] = &a;
  return Grid(table.n_rows, table.n_cols, std::move(cells));
}

struct MergedRegion {
  CellRef top_left;
  CellRef bottom_right;

  friend auto operator<=>(const MergedRegion&, const MergedRegion&) = default;
};

/// Corner pairs of every anchor spanning more than one position, row-major.
inline std::vector<MergedRegion> merged_regions(const Table& table) {
  require_valid(table);
  std::vector<MergedRegion> out;
  for (const auto& a : table.anchors)
    if (a.is_merged()) out.push_back({{a.row, a.col}, {a.last_row(), a.last_col()}});
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// Canonical JSON interchange.

inline void to_json(nlohmann::json& j, const CellRef& r) { j = nlohmann::json::array({r.row, r.col}); }

inline void from_json(const nlohmann::json& j, CellRef& r) {
  r.row = j.at(0).get<int>();
  r.col = j.at(1).get<int>();
}

inline void to_json(nlohmann::json& j, const AnchorCell& a) {
  j = nlohmann::json{{"row", a.row},           {"col", a.col},         {"row_span", a.row_span},
                     {"col_span", a.col_span}, {"content", a.content}, {"is_header", a.is_header}};
}

inline void from_json(const nlohmann::json& j, AnchorCell& a) {
  a.row = j.at("row").get<int>();
  a.col = j.at("col").get<int>();
  a.row_span = j.value("row_span", 1);
  a.col_span = j.value("col_span", 1);
  a.content = j.value("content", std::string{});
  a.is_header = j.value("is_header", false);
}

inline void to_json(nlohmann::json& j, const Table& t) {
  j = nlohmann::json{{"n_rows", t.n_rows}, {"n_cols", t.n_cols}, {"anchors", t.anchors}};
  j["caption"] = t.caption ? nlohmann::json(*t.caption) : nlohmann::json(nullptr);
  if (!t.source_id.empty()) j["source_id"] = t.source_id;
}

inline void from_json(const nlohmann::json& j, Table& t) {
  t.n_rows = j.at("n_rows").get<int>();
  t.n_cols = j.at("n_cols").get<int>();
  t.anchors = j.at("anchors").get<std::vector<AnchorCell>>();
  if (auto it = j.find("caption"); it != j.end() && !it->is_null())
    t.caption = it->get<std::string>();
  else
    t.caption.reset();
  t.source_id = j.value("source_id", std::string{});
}

/// Parses the canonical JSON form and validates it.
inline Table table_from_json(const nlohmann::json& j) {
  Table t;
  try {
    t = j.get<Table>();
  } catch (const nlohmann::json::exception& e) {
    throw InvalidTable(std::string("malformed table json: ") + e.what());
  }
  require_valid(t);
  return canonical(std::move(t));
}

}  // namespace mmtab
