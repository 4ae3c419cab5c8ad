#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "mmtab/error.hpp"
#include "mmtab/font_metrics.hpp"
#include "mmtab/rng.hpp"
#include "mmtab/table.hpp"
#include "mmtab/text.hpp"

namespace mmtab {

// ---------------------------------------------------------------------------
// Style model

enum class StyleFamily { WebPage, Excel, Markdown };

inline constexpr std::array<StyleFamily, 3> kAllFamilies = {StyleFamily::WebPage, StyleFamily::Excel,
                                                            StyleFamily::Markdown};

inline std::string_view family_name(StyleFamily f) {
  switch (f) {
    case StyleFamily::WebPage: return "WebPage";
    case StyleFamily::Excel: return "Excel";
    case StyleFamily::Markdown: return "Markdown";
  }
  return "WebPage";
}

inline std::optional<StyleFamily> parse_family_name(std::string_view name) {
  for (auto f : kAllFamilies)
    if (text::iequals(family_name(f), name)) return f;
  return std::nullopt;
}

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;

  static Rgb parse(std::string_view hex) {
    if (hex.size() != 7 || hex[0] != '#') throw ConfigError("invalid color \"" + std::string(hex) + "\"");
    auto nibble = [&](char c) -> int {
      if (c >= '0' && c <= '9') return c - '0';
      if (c >= 'a' && c <= 'f') return c - 'a' + 10;
      if (c >= 'A' && c <= 'F') return c - 'A' + 10;
      throw ConfigError("invalid color \"" + std::string(hex) + "\"");
    };
    auto byte = [&](std::size_t i) { return static_cast<std::uint8_t>(nibble(hex[i]) * 16 + nibble(hex[i + 1])); };
    return {byte(1), byte(3), byte(5)};
  }

  std::string hex() const {
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
    return buf;
  }

  friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// Fully resolved visual parameters for one rendering.
struct StyleSpec {
  StyleFamily family = StyleFamily::WebPage;
  std::string font_family = "Arial";
  double font_size = 11;  // points
  Rgb header_fill{0xdd, 0xe6, 0xf1};
  std::optional<Rgb> zebra_fill;
  Rgb body_fill{0xff, 0xff, 0xff};
  Rgb border_color{0x99, 0x99, 0x99};
  Rgb text_color{0x22, 0x22, 0x22};
  int border_width = 1;  // pixels
  int cell_padding = 4;  // pixels
  int min_col_width = 24;
  int max_col_width = 240;

  double font_px() const { return font_size * 96.0 / 72.0; }
  int line_height() const { return static_cast<int>(std::ceil(font_px() * 1.25)); }

  void check() const {
    if (!(font_size > 0)) throw ConfigError("font_size must be positive");
    if (border_width < 0 || cell_padding < 0) throw ConfigError("border and padding must be non-negative");
    if (max_col_width <= cell_padding * 2) throw ConfigError("max_col_width must exceed twice the padding");
    if (min_col_width > max_col_width) throw ConfigError("min_col_width exceeds max_col_width");
  }

  friend bool operator==(const StyleSpec&, const StyleSpec&) = default;
};

/// Probability of each style family.
struct StyleMix {
  std::map<StyleFamily, double> weights;

  static StyleMix standard() {
    return {{{StyleFamily::WebPage, 0.708}, {StyleFamily::Excel, 0.194}, {StyleFamily::Markdown, 0.098}}};
  }

  void check() const {
    double sum = 0;
    for (const auto& [f, w] : weights) {
      if (!(w >= 0)) throw ConfigError("style weights must be non-negative");
      sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw ConfigError("style weights must sum to 1");
  }
};

/// Parameter ranges one family samples from.
struct FamilyRanges {
  std::vector<std::string> fonts;
  std::pair<double, double> font_size{10, 12};
  std::vector<std::string> header_fills;
  std::vector<std::string> zebra_fills;
  double zebra_probability = 0;
  std::vector<std::string> border_colors{"#999999"};
  std::vector<std::string> text_colors{"#222222"};
  std::pair<int, int> border_width{1, 1};
  std::pair<int, int> cell_padding{4, 6};
  std::pair<int, int> max_col_width{200, 280};
  int min_col_width = 24;
};

using StyleRanges = std::map<StyleFamily, FamilyRanges>;

inline void from_json(const nlohmann::json& j, FamilyRanges& r) {
  r.fonts = j.at("fonts").get<std::vector<std::string>>();
  r.font_size = j.at("font_size").get<std::pair<double, double>>();
  r.header_fills = j.at("header_fills").get<std::vector<std::string>>();
  r.zebra_fills = j.value("zebra_fills", std::vector<std::string>{});
  r.zebra_probability = j.value("zebra_probability", 0.0);
  r.border_colors = j.value("border_colors", std::vector<std::string>{"#999999"});
  r.text_colors = j.value("text_colors", std::vector<std::string>{"#222222"});
  r.border_width = j.at("border_width").get<std::pair<int, int>>();
  r.cell_padding = j.at("cell_padding").get<std::pair<int, int>>();
  r.max_col_width = j.at("max_col_width").get<std::pair<int, int>>();
  r.min_col_width = j.value("min_col_width", 24);
}

/// Parses a style config: an object keyed by family name.
inline StyleRanges style_ranges_from_json(const nlohmann::json& j) {
  StyleRanges out;
  try {
    for (const auto& [key, value] : j.items()) {
      auto fam = parse_family_name(key);
      if (!fam) throw ConfigError("unknown style family \"" + key + "\"");
      FamilyRanges r = value.get<FamilyRanges>();
      if (r.fonts.empty() || r.header_fills.empty()) throw ConfigError(key + ": fonts and header_fills are required");
      if (r.zebra_probability > 0 && r.zebra_fills.empty()) throw ConfigError(key + ": zebra_fills required");
      for (const auto& c : r.header_fills) Rgb::parse(c);
      for (const auto& c : r.zebra_fills) Rgb::parse(c);
      for (const auto& c : r.border_colors) Rgb::parse(c);
      for (const auto& c : r.text_colors) Rgb::parse(c);
      out[*fam] = std::move(r);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("style config: ") + e.what());
  }
  return out;
}

inline const char* kDefaultStyleConfig = R"json({
  "WebPage": {
    "fonts": ["Arial", "Helvetica", "Verdana", "Georgia", "Times New Roman", "Segoe UI"],
    "font_size": [10, 13],
    "header_fills": ["#dbe5f1", "#eaeaea", "#f2f2f2", "#d9ead3", "#fce5cd", "#cfe2f3", "#e6e6fa"],
    "zebra_fills": ["#f9f9f9", "#f3f6fa", "#fafafa"],
    "zebra_probability": 0.5,
    "border_colors": ["#a2a9b1", "#cccccc", "#999999"],
    "text_colors": ["#202122", "#222222", "#333333"],
    "border_width": [1, 2],
    "cell_padding": [4, 8],
    "max_col_width": [180, 320],
    "min_col_width": 24
  },
  "Excel": {
    "fonts": ["Calibri", "Arial", "Segoe UI"],
    "font_size": [10, 12],
    "header_fills": ["#d9e1f2", "#e2efda", "#fff2cc", "#ededed", "#ffffff"],
    "zebra_fills": ["#f2f2f2", "#ddebf7"],
    "zebra_probability": 0.3,
    "border_colors": ["#bfbfbf", "#d4d4d4", "#000000"],
    "text_colors": ["#000000"],
    "border_width": [1, 1],
    "cell_padding": [3, 5],
    "max_col_width": [160, 260],
    "min_col_width": 32
  },
  "Markdown": {
    "fonts": ["DejaVu Sans Mono", "Courier New", "Consolas", "Helvetica", "Segoe UI"],
    "font_size": [11, 13],
    "header_fills": ["#ffffff", "#f6f8fa"],
    "zebra_fills": ["#f6f8fa"],
    "zebra_probability": 0.5,
    "border_colors": ["#d0d7de", "#dfe2e5"],
    "text_colors": ["#1f2328", "#24292e"],
    "border_width": [1, 2],
    "cell_padding": [6, 10],
    "max_col_width": [200, 320],
    "min_col_width": 24
  }
})json";

inline const StyleRanges& default_style_ranges() {
  static const StyleRanges ranges = style_ranges_from_json(nlohmann::json::parse(kDefaultStyleConfig));
  return ranges;
}

/// Draws a family from `mix`, then every fine-grained parameter from that
/// family's ranges. Deterministic in `seed`.
inline StyleSpec sample_style(const StyleMix& mix, std::uint64_t seed,
                              const StyleRanges& ranges = default_style_ranges()) {
  mix.check();
  Rng rng(seed);
  std::vector<double> weights;
  for (auto f : kAllFamilies) {
    auto it = mix.weights.find(f);
    weights.push_back(it == mix.weights.end() ? 0.0 : it->second);
  }
  const StyleFamily family = kAllFamilies[rng.weighted_index(weights)];
  auto rit = ranges.find(family);
  if (rit == ranges.end()) throw ConfigError("no style ranges for family " + std::string(family_name(family)));
  const FamilyRanges& r = rit->second;

  StyleSpec s;
  s.family = family;
  s.font_family = rng.pick(r.fonts);
  // Half-point steps keep the SVG free of long decimals.
  const auto lo = static_cast<long long>(std::round(r.font_size.first * 2));
  const auto hi = static_cast<long long>(std::round(r.font_size.second * 2));
  s.font_size = static_cast<double>(rng.uniform_int(lo, std::max(lo, hi))) / 2.0;
  s.header_fill = Rgb::parse(rng.pick(r.header_fills));
  if (!r.zebra_fills.empty() && rng.bernoulli(r.zebra_probability)) s.zebra_fill = Rgb::parse(rng.pick(r.zebra_fills));
  s.border_color = Rgb::parse(rng.pick(r.border_colors));
  s.text_color = Rgb::parse(rng.pick(r.text_colors));
  s.border_width = static_cast<int>(rng.uniform_int(r.border_width.first, r.border_width.second));
  s.cell_padding = static_cast<int>(rng.uniform_int(r.cell_padding.first, r.cell_padding.second));
  s.max_col_width = static_cast<int>(rng.uniform_int(r.max_col_width.first, r.max_col_width.second));
  s.min_col_width = std::min(r.min_col_width, s.max_col_width);
  s.check();
  return s;
}

inline nlohmann::json style_to_json(const StyleSpec& s) {
  nlohmann::json j{{"family", family_name(s.family)},     {"font_family", s.font_family},
                   {"font_size", s.font_size},            {"header_fill", s.header_fill.hex()},
                   {"body_fill", s.body_fill.hex()},      {"border_color", s.border_color.hex()},
                   {"text_color", s.text_color.hex()},    {"border_width", s.border_width},
                   {"cell_padding", s.cell_padding},      {"min_col_width", s.min_col_width},
                   {"max_col_width", s.max_col_width}};
  j["zebra_fill"] = s.zebra_fill ? nlohmann::json(s.zebra_fill->hex()) : nlohmann::json(nullptr);
  return j;
}

// ---------------------------------------------------------------------------
// Layout

struct Box {
  int x = 0, y = 0, w = 0, h = 0;

  friend bool operator==(const Box&, const Box&) = default;
};

struct LayoutPlan {
  std::vector<int> col_widths;
  std::vector<int> row_heights;
  std::vector<int> col_x;  // left edge of each column's content box
  std::vector<int> row_y;  // top edge of each row's content box
  /// Parallel to canonical(table).anchors.
  std::vector<Box> cell_boxes;
  std::vector<std::vector<std::string>> cell_lines;
  std::optional<Box> caption_box;
  std::string caption;
  int width = 0;
  int height = 0;
  int line_height = 0;
};

namespace detail {

/// Greedy word wrap. Words wider than `avail` are broken between code points.
inline std::vector<std::string> wrap_text(std::string_view content, int avail, const FontMetrics& fm, double px) {
  std::vector<std::string> lines;
  std::string cur;
  auto width = [&](std::string_view s) { return fm.width_px(s, px); };
  for (const auto& word : text::split_whitespace(content)) {
    std::string candidate = cur.empty() ? word : cur + " " + word;
    if (width(candidate) <= avail) {
      cur = std::move(candidate);
      continue;
    }
    if (!cur.empty()) {
      lines.push_back(std::move(cur));
      cur.clear();
    }
    if (width(word) <= avail) {
      cur = word;
      continue;
    }
    std::string piece;
    for (char32_t cp : text::utf8_decode(word)) {
      std::string next = piece;
      text::append_utf8(next, cp);
      if (!piece.empty() && width(next) > avail) {
        lines.push_back(std::move(piece));
        piece.clear();
        text::append_utf8(piece, cp);
      } else {
        piece = std::move(next);
      }
    }
    cur = std::move(piece);
  }
  if (!cur.empty() || lines.empty()) lines.push_back(std::move(cur));
  return lines;
}

}  // namespace detail

/// Computes column widths, row heights and one box per anchor.
///
/// Column width = clamp(widest single-column cell text + 2*padding,
/// min_col_width, max_col_width). Cells wrap at word boundaries inside their
/// box. Row height = max line count * line height + 2*padding; a row-spanning
/// cell that needs more height grows the last row it covers. Every column and
/// row is separated (and surrounded) by a border of border_width pixels.
inline LayoutPlan layout(const Table& input, const StyleSpec& style) {
  require_valid(input);
  style.check();
  const Table table = canonical(input);
  const FontMetrics fm = FontMetrics::for_family(style.font_family);
  const double px = style.font_px();
  const int pad = style.cell_padding;
  const int b = style.border_width;

  LayoutPlan plan;
  plan.line_height = style.line_height();
  plan.col_widths.assign(static_cast<std::size_t>(table.n_cols), style.min_col_width);
  for (const auto& a : table.anchors) {
    if (a.col_span != 1) continue;
    int natural = fm.width_px(a.content, px) + 2 * pad;
    int w = std::clamp(natural, style.min_col_width, style.max_col_width);
    auto& slot = plan.col_widths[static_cast<std::size_t>(a.col - 1)];
    slot = std::max(slot, w);
  }

  auto span_width = [&](const AnchorCell& a) {
    int w = (a.col_span - 1) * b;
    for (int c = a.col; c <= a.last_col(); ++c) w += plan.col_widths[static_cast<std::size_t>(c - 1)];
    return w;
  };

  plan.cell_lines.reserve(table.anchors.size());
  for (const auto& a : table.anchors)
    plan.cell_lines.push_back(detail::wrap_text(a.content, std::max(1, span_width(a) - 2 * pad), fm, px));

  const int min_row = plan.line_height + 2 * pad;
  plan.row_heights.assign(static_cast<std::size_t>(table.n_rows), min_row);
  auto needed = [&](std::size_t k) { return static_cast<int>(plan.cell_lines[k].size()) * plan.line_height + 2 * pad; };
  for (std::size_t k = 0; k < table.anchors.size(); ++k) {
    const auto& a = table.anchors[k];
    if (a.row_span != 1) continue;
    auto& slot = plan.row_heights[static_cast<std::size_t>(a.row - 1)];
    slot = std::max(slot, needed(k));
  }
  for (std::size_t k = 0; k < table.anchors.size(); ++k) {
    const auto& a = table.anchors[k];
    if (a.row_span == 1) continue;
    int have = (a.row_span - 1) * b;
    for (int r = a.row; r <= a.last_row(); ++r) have += plan.row_heights[static_cast<std::size_t>(r - 1)];
    if (int need = needed(k); need > have) plan.row_heights[static_cast<std::size_t>(a.last_row() - 1)] += need - have;
  }

  int grid_w = b;
  for (int w : plan.col_widths) grid_w += w + b;
  int caption_h = 0;
  int total_w = grid_w;
  if (style.family == StyleFamily::WebPage && table.caption && !table.caption->empty()) {
    plan.caption = *table.caption;
    caption_h = plan.line_height + 2 * pad;
    total_w = std::max(grid_w, fm.width_px(plan.caption, px) + 2 * pad);
    plan.caption_box = Box{0, 0, total_w, caption_h};
  }

  int x = b;
  for (int w : plan.col_widths) {
    plan.col_x.push_back(x);
    x += w + b;
  }
  int y = caption_h + b;
  for (int h : plan.row_heights) {
    plan.row_y.push_back(y);
    y += h + b;
  }
  plan.width = total_w;
  plan.height = y;

  for (const auto& a : table.anchors) {
    Box box;
    box.x = plan.col_x[static_cast<std::size_t>(a.col - 1)];
    box.y = plan.row_y[static_cast<std::size_t>(a.row - 1)];
    box.w = span_width(a);
    box.h = (a.row_span - 1) * b;
    for (int r = a.row; r <= a.last_row(); ++r) box.h += plan.row_heights[static_cast<std::size_t>(r - 1)];
    plan.cell_boxes.push_back(box);
  }
  return plan;
}

// ---------------------------------------------------------------------------
// SVG

namespace detail {

/// Formats a coordinate that is an integer or a half-integer.
inline std::string coord(double v) {
  char buf[32];
  if (v == std::floor(v)) {
    std::snprintf(buf, sizeof buf, "%lld", static_cast<long long>(v));
  } else {
    std::snprintf(buf, sizeof buf, "%.1f", v);
  }
  return buf;
}

inline std::string fixed2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

/// Rows before the first row that contains a non-header anchor.
inline int leading_header_rows(const Table& t) {
  int r = 0;
  for (int row = 1; row <= t.n_rows; ++row) {
    bool all_header = true, any = false;
    for (const auto& a : t.anchors)
      if (a.row == row) {
        any = true;
        all_header = all_header && a.is_header;
      }
    if (any && !all_header) break;
    r = row;
  }
  return r;
}

}  // namespace detail

/// Deterministic SVG 1.1 rendering: one <rect> and one <text> per anchor in
/// row-major order. WebPage and Excel draw full cell borders as rect strokes;
/// Markdown draws horizontal rules only. A WebPage caption adds one extra
/// <text class="caption"> above the grid.
inline std::string render_svg(const Table& input, const StyleSpec& style) {
  const Table table = canonical(input);
  const LayoutPlan plan = layout(table, style);
  const int b = style.border_width;
  const bool full_borders = style.family != StyleFamily::Markdown && b > 0;
  const int header_rows = detail::leading_header_rows(table);
  const double px = style.font_px();
  const double ascent = std::round(px * 0.8 * 100) / 100;

  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + std::to_string(plan.width) +
         "\" height=\"" + std::to_string(plan.height) + "\" viewBox=\"0 0 " + std::to_string(plan.width) + " " +
         std::to_string(plan.height) + "\" style=\"background-color:#ffffff\">\n";
  out += "<g font-family=\"" + text::escape_xml(style.font_family) + "\" font-size=\"" + detail::fixed2(px) +
         "\" data-family=\"" + std::string(family_name(style.family)) + "\">\n";

  if (plan.caption_box) {
    const Box& cb = *plan.caption_box;
    out += "<text class=\"caption\" x=\"" + detail::coord(cb.w / 2.0) + "\" y=\"" +
           detail::fixed2(style.cell_padding + ascent) + "\" text-anchor=\"middle\" fill=\"" +
           style.text_color.hex() + "\">" + text::escape_xml(plan.caption) + "</text>\n";
  }

  for (std::size_t k = 0; k < table.anchors.size(); ++k) {
    const auto& a = table.anchors[k];
    const Box& box = plan.cell_boxes[k];
    const int data_row = a.row - header_rows;
    Rgb fill = style.body_fill;
    if (a.is_header) {
      fill = style.header_fill;
    } else if (style.zebra_fill && data_row > 0 && data_row % 2 == 0) {
      fill = *style.zebra_fill;
    }

    out += "<rect class=\"cell\" data-row=\"" + std::to_string(a.row) + "\" data-col=\"" + std::to_string(a.col) +
           "\"";
    if (full_borders) {
      const double half = b / 2.0;
      out += " x=\"" + detail::coord(box.x - half) + "\" y=\"" + detail::coord(box.y - half) + "\" width=\"" +
             detail::coord(box.w + b) + "\" height=\"" + detail::coord(box.h + b) + "\" fill=\"" + fill.hex() +
             "\" stroke=\"" + style.border_color.hex() + "\" stroke-width=\"" + std::to_string(b) + "\"/>\n";
    } else {
      out += " x=\"" + std::to_string(box.x) + "\" y=\"" + std::to_string(box.y) + "\" width=\"" +
             std::to_string(box.w) + "\" height=\"" + std::to_string(box.h) + "\" fill=\"" + fill.hex() +
             "\" stroke=\"none\"/>\n";
    }

    const int tx = box.x + style.cell_padding;
    out += "<text class=\"cell\" x=\"" + std::to_string(tx) + "\" y=\"" +
           detail::fixed2(box.y + style.cell_padding + ascent) + "\" fill=\"" + style.text_color.hex() + "\"";
    if (a.is_header) out += " font-weight=\"bold\"";
    out += ">";
    const auto& lines = plan.cell_lines[k];
    for (std::size_t li = 0; li < lines.size(); ++li) {
      out += "<tspan x=\"" + std::to_string(tx) + "\" y=\"" +
             detail::fixed2(box.y + style.cell_padding + ascent + static_cast<double>(li * plan.line_height)) +
             "\">" + text::escape_xml(lines[li]) + "</tspan>";
    }
    out += "</text>\n";
  }

  if (style.family == StyleFamily::Markdown && b > 0) {
    const Grid grid = expand_grid(table);
    for (int boundary = 0; boundary <= table.n_rows; ++boundary) {
      const double y = boundary < table.n_rows ? plan.row_y[static_cast<std::size_t>(boundary)] - b / 2.0
                                               : plan.height - b / 2.0;
      int c = 1;
      while (c <= table.n_cols) {
        auto is_edge = [&](int col) {
          return boundary == 0 || boundary == table.n_rows || &grid.at(boundary, col) != &grid.at(boundary + 1, col);
        };
        if (!is_edge(c)) {
          ++c;
          continue;
        }
        int e = c;
        while (e + 1 <= table.n_cols && is_edge(e + 1)) ++e;
        const int x1 = plan.col_x[static_cast<std::size_t>(c - 1)] - b;
        const int x2 = plan.col_x[static_cast<std::size_t>(e - 1)] + plan.col_widths[static_cast<std::size_t>(e - 1)] + b;
        out += "<line x1=\"" + std::to_string(x1) + "\" y1=\"" + detail::coord(y) + "\" x2=\"" + std::to_string(x2) +
               "\" y2=\"" + detail::coord(y) + "\" stroke=\"" + style.border_color.hex() + "\" stroke-width=\"" +
               std::to_string(b) + "\"/>\n";
        c = e + 1;
      }
    }
  }

  out += "</g>\n</svg>\n";
  return out;
}

}  // namespace mmtab
