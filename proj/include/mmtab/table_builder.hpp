#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "mmtab/error.hpp"
#include "mmtab/table.hpp"

namespace mmtab {

struct ParseWarning {
  std::string location;
  std::string message;
};

/// Non-fatal findings of a parse. `recovered == false` means no table could
/// be produced at all.
struct ParseDiagnostics {
  std::vector<ParseWarning> warnings;
  bool recovered = true;

  void warn(std::string location, std::string message) {
    warnings.push_back({std::move(location), std::move(message)});
  }
};

struct ParseResult {
  Table table;
  ParseDiagnostics diagnostics;
};

namespace detail {

/// One source cell before grid placement.
struct RawCell {
  std::string content;
  int row_span = 1;
  int col_span = 1;
  bool is_header = false;
};

using RawRow = std::vector<RawCell>;

enum class Placement {
  /// HTML semantics: positions occupied by row spans from above are skipped.
  SkipOccupied,
  /// LaTeX semantics: a source cell landing on an occupied position is the
  /// placeholder for the span above and consumes those columns.
  ConsumeOccupied,
};

/// Places source rows onto a grid, resolving spans. Strict mode throws
/// ParseError on spans that cannot tile; recovery mode shrinks them. Uncovered
/// positions are padded with empty cells in both modes.
class GridAssembler {
 public:
  GridAssembler(Placement placement, bool recover, ParseDiagnostics& diag)
      : placement_(placement), recover_(recover), diag_(diag) {}

  Table assemble(const std::vector<RawRow>& rows, const std::string& location_prefix = "row ") {
    if (rows.empty()) throw ParseError("start", "table has no rows");
    const int n_rows = static_cast<int>(rows.size());
    for (int r = 1; r <= n_rows; ++r) place_row(rows[static_cast<std::size_t>(r - 1)], r, n_rows, location_prefix);

    int n_cols = 0;
    for (const auto& a : anchors_) n_cols = std::max(n_cols, a.last_col());
    if (n_cols == 0) n_cols = 1;

    Table t;
    t.n_rows = n_rows;
    t.n_cols = n_cols;
    t.anchors = std::move(anchors_);
    bool padded = false;
    for (int r = 1; r <= n_rows; ++r) {
      for (int c = 1; c <= n_cols; ++c) {
        if (!occupied(r, c)) {
          t.anchors.push_back(AnchorCell{r, c, 1, 1, "", false});
          padded = true;
        }
      }
    }
    if (padded) diag_.warn("table", "ragged rows padded with empty cells");
    return canonical(std::move(t));
  }

 private:
  bool occupied(int r, int c) const {
    auto ri = static_cast<std::size_t>(r - 1), ci = static_cast<std::size_t>(c - 1);
    return ri < occ_.size() && ci < occ_[ri].size() && occ_[ri][ci];
  }

  void mark(int r, int c) {
    auto ri = static_cast<std::size_t>(r - 1), ci = static_cast<std::size_t>(c - 1);
    if (occ_.size() <= ri) occ_.resize(ri + 1);
    if (occ_[ri].size() <= ci) occ_[ri].resize(ci + 1, false);
    occ_[ri][ci] = true;
  }

  void place_row(const RawRow& row, int r, int n_rows, const std::string& prefix) {
    const std::string loc = prefix + std::to_string(r);
    int c = 1;
    for (const auto& cell : row) {
      if (placement_ == Placement::SkipOccupied) {
        while (occupied(r, c)) ++c;
      } else if (occupied(r, c)) {
        consume_placeholder(cell, r, c, loc);
        continue;
      }
      int rs = cell.row_span, cs = cell.col_span;
      if (r + rs - 1 > n_rows) {
        if (!recover_) throw ParseError(loc, "row span extends past the last row");
        diag_.warn(loc, "row span clamped to table height");
        rs = n_rows - r + 1;
      }
      int free_run = 0;
      while (free_run < cs && !occupied(r, c + free_run)) ++free_run;
      if (free_run < cs) {
        if (!recover_) throw ParseError(loc, "column span overlaps a spanned cell");
        diag_.warn(loc, "column span shrunk to avoid overlap");
        cs = free_run;
      }
      // A row span may also collide below; shrink it to the clear height.
      int clear_rows = rs;
      for (int dr = 1; dr < rs && clear_rows == rs; ++dr)
        for (int dc = 0; dc < cs; ++dc)
          if (occupied(r + dr, c + dc)) {
            clear_rows = dr;
            break;
          }
      if (clear_rows < rs) {
        if (!recover_) throw ParseError(loc, "row span overlaps a spanned cell");
        diag_.warn(loc, "row span shrunk to avoid overlap");
        rs = clear_rows;
      }
      for (int dr = 0; dr < rs; ++dr)
        for (int dc = 0; dc < cs; ++dc) mark(r + dr, c + dc);
      anchors_.push_back(AnchorCell{r, c, rs, cs, cell.content, cell.is_header});
      c += cs;
    }
  }

  void consume_placeholder(const RawCell& cell, int r, int& c, const std::string& loc) {
    if (!cell.content.empty()) {
      if (!recover_) throw ParseError(loc, "content in a position covered by a row span");
      diag_.warn(loc, "content under a row span dropped");
    }
    for (int k = 0; k < cell.col_span; ++k) {
      if (!occupied(r, c)) {
        if (!recover_) throw ParseError(loc, "placeholder span does not match the span above");
        diag_.warn(loc, "placeholder span truncated");
        return;
      }
      ++c;
    }
  }

  Placement placement_;
  bool recover_;
  ParseDiagnostics& diag_;
  std::vector<AnchorCell> anchors_;
  std::vector<std::vector<bool>> occ_;
};

}  // namespace detail
}  // namespace mmtab
