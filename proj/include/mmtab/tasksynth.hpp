#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "mmtab/error.hpp"
#include "mmtab/format_io.hpp"
#include "mmtab/instruct.hpp"
#include "mmtab/rng.hpp"
#include "mmtab/sample.hpp"
#include "mmtab/table.hpp"
#include "mmtab/task.hpp"

namespace mmtab::synth {

struct SplitCounts {
  std::size_t train = 0;
  std::size_t eval = 0;

  friend bool operator==(const SplitCounts&, const SplitCounts&) = default;
};

/// Scale knobs for structure-task synthesis. The defaults are the 8K/1K
/// per-task sizes scaled down 100x.
struct SynthConfig {
  std::map<TaskKind, SplitCounts> counts{{TaskKind::TSD, {80, 10}}, {TaskKind::TCE, {80, 10}},
                                         {TaskKind::TCL, {80, 10}}, {TaskKind::MCD, {80, 10}},
                                         {TaskKind::RCE, {80, 10}}, {TaskKind::TR, {80, 10}}};
  int tce_cells_per_sample = 3;
  int tcl_cells_per_sample = 3;
  int rce_max_lines = 3;
  std::map<TableFormat, double> tr_format_weights{{TableFormat::Html, 96.0 / 150.0},
                                                  {TableFormat::Markdown, 27.0 / 150.0},
                                                  {TableFormat::Latex, 27.0 / 150.0}};
  double multiturn_fraction = 0.2;
  /// How many samples of one task may share a table.
  int max_uses_per_table = 1;
  std::uint64_t master_seed = 0;

  void check() const {
    if (tce_cells_per_sample < 1 || tcl_cells_per_sample < 1 || rce_max_lines < 1)
      throw ConfigError("per-sample cell counts must be >= 1");
    if (multiturn_fraction < 0 || multiturn_fraction > 1) throw ConfigError("multiturn_fraction must be in [0, 1]");
    if (max_uses_per_table < 1) throw ConfigError("max_uses_per_table must be >= 1");
    double sum = 0;
    for (const auto& [f, w] : tr_format_weights) {
      if (!(w >= 0)) throw ConfigError("tr_format_weights must be non-negative");
      sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw ConfigError("tr_format_weights must sum to 1");
    for (const auto& [task, c] : counts)
      if (task == TaskKind::QAWrap) throw ConfigError("QAWrap counts come from the supplied QA pairs");
  }
};

/// Identity and seeding of one sample. The per-sample seed is a hash of
/// (master_seed, table_id, task, sample_index), so results do not depend on
/// the order in which samples are produced.
struct SynthContext {
  const instruct::TemplatePool* pool = &instruct::default_pool();
  std::uint64_t master_seed = 0;
  std::string table_id;
  std::size_t sample_index = 0;
  std::string sample_id;
  std::string image_ref;
  std::string split = "train";

  std::uint64_t seed(TaskKind task) const { return derive_seed(master_seed, table_id, task_name(task), sample_index); }
};

namespace detail {

inline std::string position_text(const CellRef& p) {
  return "(" + std::to_string(p.row) + "," + std::to_string(p.col) + ")";
}

inline std::string list_text(const std::vector<std::string>& items) {
  if (items.size() <= 1) return items.empty() ? "" : items.front();
  std::string out;
  for (std::size_t i = 0; i + 1 < items.size(); ++i) out += (i ? ", " : "") + items[i];
  return out + " and " + items.back();
}

inline nlohmann::json table_meta(const Table& t) {
  return nlohmann::json{{"n_rows", t.n_rows}, {"n_cols", t.n_cols}, {"has_merged", t.has_merged_cells()}};
}

inline Sample make_sample(const Table& table, TaskKind task, const SynthContext& ctx, nlohmann::json answer,
                          const instruct::PlaceholderValues& inputs) {
  Sample s;
  s.table_id = ctx.table_id.empty() ? table.source_id : ctx.table_id;
  s.sample_id = ctx.sample_id.empty() ? std::string(task_name(task)) + "-" + s.table_id + "-" +
                                            std::to_string(ctx.sample_index)
                                      : ctx.sample_id;
  s.task = task;
  s.split = ctx.split;
  s.image_ref = ctx.image_ref;
  s.request = instruct::build_request(*ctx.pool, task, inputs, derive_seed(ctx.seed(task), "request"));
  s.gold_response = gold_response_for(task, answer);
  s.gold_answer = std::move(answer);
  s.meta = table_meta(table);
  return s;
}

}  // namespace detail

/// Table size detection: {row_number, column_number}.
inline Sample synth_tsd(const Table& table, const SynthContext& ctx) {
  require_valid(table);
  nlohmann::json answer{{"row_number", table.n_rows}, {"column_number", table.n_cols}};
  return detail::make_sample(table, TaskKind::TSD, ctx, std::move(answer), {});
}

/// Cell extraction at explicit positions, in the given order.
inline Sample synth_tce_at(const Table& table, const std::vector<CellRef>& positions, const SynthContext& ctx) {
  const Grid grid = expand_grid(table);
  nlohmann::json answer = nlohmann::json::array();
  std::vector<std::string> refs;
  for (const auto& p : positions) {
    if (p.row < 1 || p.col < 1 || p.row > table.n_rows || p.col > table.n_cols)
      throw InvalidTable("cell position outside table");
    answer.push_back({{"position", p}, {"value", grid.content(p.row, p.col)}});
    refs.push_back(detail::position_text(p));
  }
  return detail::make_sample(table, TaskKind::TCE, ctx, std::move(answer), {{"cells", text::join(refs, ", ")}});
}

/// Cell extraction at k distinct uniformly drawn positions (row-major order).
inline Sample synth_tce(const Table& table, int k, const SynthContext& ctx) {
  require_valid(table);
  const auto cells = static_cast<std::size_t>(table.n_rows) * static_cast<std::size_t>(table.n_cols);
  if (k < 1) throw ConfigError("k must be >= 1");
  if (static_cast<std::size_t>(k) > cells)
    throw KTooLarge("k = " + std::to_string(k) + " exceeds the " + std::to_string(cells) + " grid positions");
  Rng rng(ctx.seed(TaskKind::TCE));
  auto picks = rng.sample_indices(cells, static_cast<std::size_t>(k));
  std::sort(picks.begin(), picks.end());
  std::vector<CellRef> positions;
  for (auto i : picks)
    positions.push_back({static_cast<int>(i / static_cast<std::size_t>(table.n_cols)) + 1,
                         static_cast<int>(i % static_cast<std::size_t>(table.n_cols)) + 1});
  return synth_tce_at(table, positions, ctx);
}

/// Anchors whose non-empty content occurs exactly once in the table, row-major.
inline std::vector<const AnchorCell*> unique_content_anchors(const Table& table) {
  std::map<std::string, int> freq;
  for (const auto& a : table.anchors) ++freq[a.content];
  std::vector<const AnchorCell*> out;
  for (const auto& a : table.anchors)
    if (!a.content.empty() && freq[a.content] == 1) out.push_back(&a);
  std::sort(out.begin(), out.end(), [](const AnchorCell* x, const AnchorCell* y) {
    return std::tie(x->row, x->col) < std::tie(y->row, y->col);
  });
  return out;
}

/// Cell locating: k cells with table-unique content; positions are anchors.
inline Sample synth_tcl(const Table& table, int k, const SynthContext& ctx) {
  require_valid(table);
  if (k < 1) throw ConfigError("k must be >= 1");
  const auto candidates = unique_content_anchors(table);
  if (candidates.size() < static_cast<std::size_t>(k))
    throw InsufficientUniqueCells("table has " + std::to_string(candidates.size()) + " unique non-empty cells, need " +
                                  std::to_string(k));
  Rng rng(ctx.seed(TaskKind::TCL));
  auto picks = rng.sample_indices(candidates.size(), static_cast<std::size_t>(k));
  std::sort(picks.begin(), picks.end());
  nlohmann::json answer = nlohmann::json::array();
  std::vector<std::string> quoted;
  for (auto i : picks) {
    const AnchorCell& a = *candidates[i];
    answer.push_back({{"value", a.content}, {"position", CellRef{a.row, a.col}}});
    quoted.push_back(nlohmann::json(a.content).dump());
  }
  return detail::make_sample(table, TaskKind::TCL, ctx, std::move(answer), {{"cells", text::join(quoted, ", ")}});
}

inline nlohmann::json regions_json(const std::vector<MergedRegion>& regions) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : regions) out.push_back(nlohmann::json::array({r.top_left, r.bottom_right}));
  return out;
}

/// Merged cell detection: {has_merged, regions}.
inline Sample synth_mcd(const Table& table, const SynthContext& ctx) {
  const auto regions = merged_regions(table);
  nlohmann::json answer{{"has_merged", !regions.empty()}, {"regions", regions_json(regions)}};
  return detail::make_sample(table, TaskKind::MCD, ctx, std::move(answer), {});
}

enum class Axis { Row, Column };

/// Row/column extraction for explicit ids. Merged cells repeat at every
/// position they cover.
inline Sample synth_rce_lines(const Table& table, Axis axis, std::vector<int> ids, const SynthContext& ctx) {
  const Grid grid = expand_grid(table);
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  if (ids.empty()) throw ConfigError("row/column extraction needs at least one id");
  const int limit = axis == Axis::Row ? table.n_rows : table.n_cols;
  nlohmann::json lines = nlohmann::json::object();
  std::vector<std::string> names;
  for (int id : ids) {
    if (id < 1 || id > limit) throw InvalidTable("line id outside table");
    lines[std::to_string(id)] = axis == Axis::Row ? grid.row_contents(id) : grid.col_contents(id);
    names.push_back(std::to_string(id));
  }
  const bool rows = axis == Axis::Row;
  const std::string key = rows ? "rows" : "columns";
  std::string noun = rows ? (ids.size() > 1 ? "rows " : "row ") : (ids.size() > 1 ? "columns " : "column ");
  nlohmann::json answer{{key, lines}};
  Sample s = detail::make_sample(table, TaskKind::RCE, ctx, std::move(answer), {{"cells", noun + detail::list_text(names)}});
  s.meta["axis"] = rows ? "row" : "column";
  return s;
}

/// Row/column extraction: axis uniform, then 1..rce_max_lines distinct ids.
inline Sample synth_rce(const Table& table, const SynthContext& ctx, int max_lines = 3) {
  require_valid(table);
  Rng rng(ctx.seed(TaskKind::RCE));
  const Axis axis = rng.bernoulli(0.5) ? Axis::Row : Axis::Column;
  const int n = axis == Axis::Row ? table.n_rows : table.n_cols;
  const int m = static_cast<int>(rng.uniform_int(1, std::min(n, std::max(1, max_lines))));
  std::vector<int> ids;
  for (auto i : rng.sample_indices(static_cast<std::size_t>(n), static_cast<std::size_t>(m)))
    ids.push_back(static_cast<int>(i) + 1);
  return synth_rce_lines(table, axis, std::move(ids), ctx);
}

/// Draws a TR target format. A spanned table cannot be Markdown, so a
/// Markdown draw is redrawn from the remaining formats.
inline TableFormat draw_tr_format(const std::map<TableFormat, double>& weights, bool spanned, Rng& rng) {
  std::vector<double> w;
  for (auto f : kAllFormats) {
    auto it = weights.find(f);
    w.push_back(it == weights.end() ? 0.0 : it->second);
  }
  TableFormat f = kAllFormats[rng.weighted_index(w)];
  if (f == TableFormat::Markdown && spanned) {
    w[static_cast<std::size_t>(TableFormat::Markdown)] = 0;
    double rest = w[0] + w[2];
    f = rest > 0 ? kAllFormats[rng.weighted_index(w)] : TableFormat::Html;
  }
  return f;
}

/// Table recognition into an explicit format.
inline Sample synth_tr(const Table& table, TableFormat fmt, const SynthContext& ctx) {
  std::string target = serialize(table, fmt);  // throws UnrepresentableInFormat
  Sample s = detail::make_sample(table, TaskKind::TR, ctx, target,
                                 {{"format_name", std::string(format_display_name(fmt))}});
  s.meta["format"] = format_name(fmt);
  return s;
}

/// Table recognition with the format drawn from `weights`.
inline Sample synth_tr(const Table& table, const std::map<TableFormat, double>& weights, const SynthContext& ctx) {
  require_valid(table);
  Rng rng(ctx.seed(TaskKind::TR));
  return synth_tr(table, draw_tr_format(weights, table.has_merged_cells(), rng), ctx);
}

/// Wraps an externally supplied (input, output) pair. `metric` tells the
/// evaluator whether to score by accuracy or BLEU.
inline Sample wrap_qa(const Table& table, const std::string& task_input, const std::string& task_output,
                      const SynthContext& ctx, const std::string& metric = "accuracy") {
  if (task_input.empty() || task_output.empty()) throw ConfigError("QA input and output must be non-empty");
  if (metric != "accuracy" && metric != "bleu") throw ConfigError("QA metric must be accuracy or bleu");
  Sample s = detail::make_sample(table, TaskKind::QAWrap, ctx, task_output, {{"question", task_input}});
  s.meta["metric"] = metric;
  return s;
}

struct MultiTurnResult {
  std::vector<Sample> conversations;
  /// Input samples not consumed by any conversation, in input order.
  std::vector<Sample> single_turn;
};

/// Combines single-turn samples of the same table into conversations.
///
/// Each table group of two or more samples becomes a conversation with
/// probability `fraction`; it then takes 2..min(4, group size) of its samples
/// as turns. Consumed samples are removed from the single-turn output. The
/// image is attached to the conversation (turn 1) only.
inline MultiTurnResult compose_multiturn(const std::vector<Sample>& samples, double fraction,
                                         std::uint64_t master_seed) {
  std::map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].is_conversation()) throw ConfigError("cannot nest conversations");
    groups[samples[i].table_id].push_back(i);
  }
  std::vector<bool> consumed(samples.size(), false);
  MultiTurnResult out;
  for (const auto& [table_id, members] : groups) {
    if (members.size() < 2) continue;
    Rng rng(derive_seed(master_seed, "multiturn", table_id));
    if (!rng.bernoulli(fraction)) continue;
    const int turns = static_cast<int>(rng.uniform_int(2, std::min<long long>(4, static_cast<long long>(members.size()))));
    auto picks = rng.sample_indices(members.size(), static_cast<std::size_t>(turns));
    Sample conv;
    conv.table_id = table_id;
    conv.sample_id = "MT-" + table_id;
    for (auto p : picks) {
      const Sample& s = samples[members[p]];
      consumed[members[p]] = true;
      conv.turns.push_back(Turn{s.sample_id, s.task, s.request, s.gold_response, s.gold_answer, s.meta});
    }
    const Sample& first = samples[members[picks.front()]];
    conv.task = first.task;
    conv.split = first.split;
    conv.image_ref = first.image_ref;
    conv.request = first.request;
    conv.gold_response = first.gold_response;
    conv.gold_answer = first.gold_answer;
    conv.meta = first.meta;
    out.conversations.push_back(std::move(conv));
  }
  for (std::size_t i = 0; i < samples.size(); ++i)
    if (!consumed[i]) out.single_turn.push_back(samples[i]);
  return out;
}

}  // namespace mmtab::synth
