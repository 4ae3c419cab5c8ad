#include <gtest/gtest.h>

#include "mmtab/table.hpp"
#include "oracles.hpp"
#include "random_tables.hpp"

using namespace mmtab;

namespace {

Table make(int rows, int cols, std::vector<AnchorCell> anchors) {
  Table t;
  t.n_rows = rows;
  t.n_cols = cols;
  t.anchors = std::move(anchors);
  return t;
}

AnchorCell cell(int r, int c, std::string content = "", int rs = 1, int cs = 1) {
  return AnchorCell{r, c, rs, cs, std::move(content), false};
}

// Exactly-once coverage by brute force over every position and anchor.
bool tiles_exactly(const Table& t) {
  if (t.n_rows < 1 || t.n_cols < 1) return false;
  for (const auto& a : t.anchors)
    if (a.row_span < 1 || a.col_span < 1 || a.row < 1 || a.col < 1 || a.row + a.row_span - 1 > t.n_rows ||
        a.col + a.col_span - 1 > t.n_cols)
      return false;
  for (int r = 1; r <= t.n_rows; ++r)
    for (int c = 1; c <= t.n_cols; ++c) {
      int n = 0;
      for (const auto& a : t.anchors) n += a.covers(r, c);
      if (n != 1) return false;
    }
  return true;
}

}  // namespace

TEST(Validate, CompleteTilingIsOk) {
  EXPECT_TRUE(validate(make(2, 2, {cell(1, 1), cell(1, 2), cell(2, 1), cell(2, 2)})).ok());
}

TEST(Validate, RowSpanTilingIsOk) {
  EXPECT_TRUE(validate(make(2, 2, {cell(1, 1, "", 2, 1), cell(1, 2), cell(2, 2)})).ok());
}

TEST(Validate, ReportsOverlapPosition) {
  auto v = validate(make(2, 2, {cell(1, 1, "", 2, 2), cell(2, 2)}));
  EXPECT_EQ(v.violation, Violation::Overlap);
  ASSERT_TRUE(v.position.has_value());
  EXPECT_EQ(*v.position, (CellRef{2, 2}));
  EXPECT_EQ(v.message, "overlap at (2,2)");
}

TEST(Validate, ReportsGapRowMajor) {
  auto v = validate(make(2, 2, {cell(1, 1), cell(2, 2)}));
  EXPECT_EQ(v.violation, Violation::Gap);
  EXPECT_EQ(*v.position, (CellRef{1, 2}));
}

TEST(Validate, RejectsOutOfBoundsAndBadSpansAndEmptyGrid) {
  EXPECT_EQ(validate(make(1, 1, {cell(1, 1, "", 1, 2)})).violation, Violation::OutOfBounds);
  EXPECT_EQ(validate(make(1, 1, {cell(1, 1, "", 0, 1)})).violation, Violation::BadSpan);
  EXPECT_EQ(validate(make(0, 1, {})).violation, Violation::EmptyGrid);
  EXPECT_THROW(require_valid(make(1, 2, {cell(1, 1)})), InvalidTable);
}

TEST(Validate, SpanMutationsAcceptedOnlyWhenTilingHolds) {
  Rng rng(7);
  int accepted = 0, rejected = 0;
  for (int i = 0; i < 500; ++i) {
    Table t = fixtures::random_table(rng);
    ASSERT_TRUE(validate(t).ok());
    auto& a = t.anchors[rng.uniform_index(t.anchors.size())];
    const int delta = rng.bernoulli(0.5) ? 1 : -1;
    (rng.bernoulli(0.5) ? a.row_span : a.col_span) += delta;
    const bool ok = validate(t).ok();
    EXPECT_EQ(ok, tiles_exactly(t));
    (ok ? accepted : rejected) += 1;
  }
  EXPECT_GT(rejected, 0);
}

TEST(Table, SpanAreasSumToGrid) {
  Rng rng(11);
  for (int i = 0; i < 300; ++i) {
    Table t = fixtures::random_table(rng);
    int area = 0;
    for (const auto& a : t.anchors) area += a.row_span * a.col_span;
    EXPECT_EQ(area, t.n_rows * t.n_cols);
  }
}

TEST(Table, EqualityIgnoresAnchorOrderAndSourceId) {
  Table a = make(1, 2, {cell(1, 1, "a"), cell(1, 2, "b")});
  Table b = make(1, 2, {cell(1, 2, "b"), cell(1, 1, "a")});
  b.source_id = "other";
  EXPECT_EQ(a, b);
  b.caption = "cap";
  EXPECT_NE(a, b);
}

TEST(ExpandGrid, LooksUpContent) {
  Table t = make(1, 2, {cell(1, 1, "a"), cell(1, 2, "b")});
  Grid g = expand_grid(t);
  EXPECT_EQ(g.content(1, 1), "a");
  EXPECT_EQ(g.content(1, 2), "b");
  EXPECT_EQ(g.row_contents(1), (std::vector<std::string>{"a", "b"}));
}

TEST(ExpandGrid, RowSpanResolvesToAnchor) {
  Table t = make(2, 1, {cell(1, 1, "x", 2, 1)});
  Grid g = expand_grid(t);
  EXPECT_EQ(&g.at(2, 1), &t.anchors[0]);
}

TEST(ExpandGrid, BlockSpanMatchesRectangleMembership) {
  Table t = make(3, 3, {cell(1, 1), cell(1, 2), cell(1, 3), cell(2, 1), cell(2, 2, "big", 2, 2), cell(3, 1)});
  ASSERT_TRUE(validate(t).ok());
  Grid g = expand_grid(t);
  for (int r = 1; r <= 3; ++r)
    for (int c = 1; c <= 3; ++c) {
      const bool inside = r >= 2 && c >= 2;
      EXPECT_EQ(g.at(r, c).row == 2 && g.at(r, c).col == 2, inside) << r << "," << c;
    }
}

TEST(ExpandGrid, MatchesGridDumpOnRandomTables) {
  Rng rng(3);
  for (int i = 0; i < 300; ++i) {
    Table t = fixtures::random_table(rng);
    Grid g = expand_grid(t);
    auto dump = oracle::grid_dump(t);
    for (int r = 1; r <= t.n_rows; ++r)
      for (int c = 1; c <= t.n_cols; ++c) EXPECT_EQ(g.content(r, c), dump[r - 1][c - 1]);
  }
}

TEST(ExpandGrid, ThrowsOnInvalidTable) { EXPECT_THROW(expand_grid(make(1, 2, {cell(1, 1)})), InvalidTable); }

TEST(MergedRegions, EmptyWithoutSpans) {
  EXPECT_TRUE(merged_regions(make(1, 2, {cell(1, 1), cell(1, 2)})).empty());
}

TEST(MergedRegions, CornerArithmetic) {
  auto r = merged_regions(make(1, 2, {cell(1, 1, "", 1, 2)}));
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0].top_left, (CellRef{1, 1}));
  EXPECT_EQ(r[0].bottom_right, (CellRef{1, 2}));
}

TEST(MergedRegions, RowMajorOrder) {
  Table t = make(2, 3, {cell(1, 2, "", 1, 2), cell(1, 1, "", 2, 1), cell(2, 2), cell(2, 3)});
  auto r = merged_regions(t);
  ASSERT_EQ(r.size(), 2u);
  EXPECT_EQ(r[0].top_left, (CellRef{1, 1}));
  EXPECT_EQ(r[0].bottom_right, (CellRef{2, 1}));
  EXPECT_EQ(r[1].top_left, (CellRef{1, 2}));
  EXPECT_EQ(r[1].bottom_right, (CellRef{1, 3}));
}

TEST(MergedRegions, EmptyIffAllAnchorsUnit) {
  Rng rng(5);
  for (int i = 0; i < 300; ++i) {
    Table t = fixtures::random_table(rng);
    EXPECT_EQ(merged_regions(t).empty(), !t.has_merged_cells());
    EXPECT_EQ(merged_regions(t).size(), oracle::span_scan(t).size());
  }
}

TEST(TableJson, RoundTrip) {
  Rng rng(9);
  for (int i = 0; i < 100; ++i) {
    fixtures::RandomTableOptions opt;
    opt.caption_probability = 0.5;
    Table t = fixtures::random_table(rng, opt);
    nlohmann::json j = t;
    EXPECT_EQ(table_from_json(nlohmann::json::parse(j.dump())), t);
  }
}

TEST(TableJson, RejectsInvalid) {
  EXPECT_THROW(table_from_json(nlohmann::json::parse(R"({"n_rows":1,"n_cols":2,"anchors":[{"row":1,"col":1}]})")),
               InvalidTable);
  EXPECT_THROW(table_from_json(nlohmann::json::parse(R"({"n_rows":1})")), InvalidTable);
}
