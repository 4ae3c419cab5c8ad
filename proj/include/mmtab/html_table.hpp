#pragma once

#include <charconv>
#include <optional>
#include <set>
#include <string>
#include <string_view>

#include "mmtab/error.hpp"
#include "mmtab/html.hpp"
#include "mmtab/table.hpp"
#include "mmtab/table_builder.hpp"
#include "mmtab/text.hpp"

namespace mmtab::html {

inline constexpr int kMaxSpan = 1000;

namespace detail {

inline std::string at(std::size_t offset) { return "offset " + std::to_string(offset); }

inline int parse_span(const Token& tok, std::string_view key, bool recover, ParseDiagnostics& diag) {
  const std::string* raw = tok.attr(key);
  if (!raw) return 1;
  std::string_view v = text::trim(*raw);
  int value = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), value);
  const bool ok = ec == std::errc{} && ptr == v.data() + v.size() && value >= 1 && value <= kMaxSpan;
  if (ok) return value;
  if (!recover) throw ParseError(at(tok.offset), "invalid " + std::string(key) + " \"" + *raw + "\"");
  diag.warn(at(tok.offset), "invalid " + std::string(key) + " replaced by 1");
  return 1;
}

inline bool is_block_break(std::string_view tag) {
  return tag == "br" || tag == "p" || tag == "div" || tag == "li" || tag == "hr";
}

}  // namespace detail

/// Parses the first <table> element of `src`.
///
/// Supported subset: table, caption, thead, tbody, tfoot, tr, td, th with
/// rowspan/colspan. Other tags and attributes are stripped with a warning.
/// With `recover` set, nested tables are skipped, a missing </table> is
/// tolerated and conflicting spans are shrunk instead of rejected.
inline ParseResult parse_table(std::string_view src, bool recover = false) {
  using detail::at;
  ParseResult result;
  auto& diag = result.diagnostics;
  const auto tokens = tokenize(src);

  std::size_t i = 0;
  while (i < tokens.size() && !(tokens[i].kind == Token::Kind::Open && tokens[i].name == "table")) ++i;
  if (i == tokens.size()) throw ParseError("offset 0", "no <table> element found");
  const std::size_t table_offset = tokens[i].offset;
  ++i;

  std::vector<::mmtab::detail::RawRow> rows;
  std::optional<::mmtab::detail::RawCell> cell;
  std::string cell_text;
  bool row_open = false;
  bool in_caption = false;
  std::string caption_text;
  bool have_caption = false;
  bool closed = false;
  int nested_depth = 0;
  std::set<std::string> reported_tags;

  auto finish_cell = [&] {
    if (!cell) return;
    cell->content = text::normalize_space(cell_text);
    rows.back().push_back(std::move(*cell));
    cell.reset();
    cell_text.clear();
  };
  auto finish_row = [&] {
    finish_cell();
    row_open = false;
  };
  auto open_row = [&] {
    finish_row();
    rows.emplace_back();
    row_open = true;
  };

  for (; i < tokens.size() && !closed; ++i) {
    const Token& tok = tokens[i];
    if (nested_depth > 0) {
      if (tok.name == "table") nested_depth += tok.kind == Token::Kind::Open ? 1 : tok.kind == Token::Kind::Close ? -1 : 0;
      continue;
    }
    switch (tok.kind) {
      case Token::Kind::Text: {
        std::string decoded = text::decode_entities(tok.text);
        if (in_caption) {
          caption_text += decoded;
        } else if (cell) {
          cell_text += decoded;
        } else if (!text::trim(decoded).empty()) {
          diag.warn(at(tok.offset), "text outside any cell dropped");
        }
        break;
      }
      case Token::Kind::Open: {
        const std::string& name = tok.name;
        if (name == "table") {
          if (!recover) throw UnsupportedConstruct(at(tok.offset) + ": nested tables are not supported");
          diag.warn(at(tok.offset), "nested table skipped");
          nested_depth = 1;
        } else if (name == "caption") {
          finish_row();
          in_caption = true;
          have_caption = true;
        } else if (name == "tr") {
          in_caption = false;
          open_row();
        } else if (name == "td" || name == "th") {
          in_caption = false;
          if (!row_open) {
            diag.warn(at(tok.offset), "cell outside <tr>; row opened implicitly");
            open_row();
          }
          finish_cell();
          ::mmtab::detail::RawCell c;
          c.is_header = name == "th";
          c.row_span = detail::parse_span(tok, "rowspan", recover, diag);
          c.col_span = detail::parse_span(tok, "colspan", recover, diag);
          for (const auto& [k, v] : tok.attrs)
            if (k != "rowspan" && k != "colspan") diag.warn(at(tok.offset), "attribute \"" + k + "\" stripped");
          cell = std::move(c);
        } else if (name == "thead" || name == "tbody" || name == "tfoot") {
          finish_row();
        } else {
          if (cell && detail::is_block_break(name)) cell_text += ' ';
          if (reported_tags.insert(name).second) diag.warn(at(tok.offset), "tag <" + name + "> stripped");
        }
        break;
      }
      case Token::Kind::Close: {
        const std::string& name = tok.name;
        if (name == "table") {
          closed = true;
        } else if (name == "caption") {
          in_caption = false;
        } else if (name == "td" || name == "th") {
          finish_cell();
        } else if (name == "tr" || name == "thead" || name == "tbody" || name == "tfoot") {
          finish_row();
        } else if (cell && detail::is_block_break(name)) {
          cell_text += ' ';
        }
        break;
      }
    }
  }
  finish_row();

  if (!closed) {
    if (!recover) throw ParseError(at(table_offset), "unbalanced structure: <table> is never closed");
    diag.warn(at(table_offset), "missing </table>");
  }
  for (; i < tokens.size(); ++i) {
    const Token& tok = tokens[i];
    if (tok.kind != Token::Kind::Text || !text::trim(tok.text).empty()) {
      diag.warn(at(tok.offset), "content after </table> ignored");
      break;
    }
  }

  ::mmtab::detail::GridAssembler assembler(::mmtab::detail::Placement::SkipOccupied, recover, diag);
  result.table = assembler.assemble(rows);
  if (have_caption) result.table.caption = text::normalize_space(caption_text);
  return result;
}

/// Canonical HTML: no whitespace between tags, rowspan before colspan and
/// each only when > 1, header cells as <th>.
inline std::string serialize_table(const Table& table) {
  require_valid(table);
  const Table t = canonical(table);
  std::string out = "<table>";
  if (t.caption) out += "<caption>" + text::escape_html(*t.caption) + "</caption>";
  std::size_t k = 0;
  for (int r = 1; r <= t.n_rows; ++r) {
    out += "<tr>";
    for (; k < t.anchors.size() && t.anchors[k].row == r; ++k) {
      const auto& a = t.anchors[k];
      const char* tag = a.is_header ? "th" : "td";
      out += "<";
      out += tag;
      if (a.row_span > 1) out += " rowspan=\"" + std::to_string(a.row_span) + "\"";
      if (a.col_span > 1) out += " colspan=\"" + std::to_string(a.col_span) + "\"";
      out += ">" + text::escape_html(a.content) + "</" + tag + ">";
    }
    out += "</tr>";
  }
  out += "</table>";
  return out;
}

}  // namespace mmtab::html
