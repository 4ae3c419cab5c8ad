#pragma once

#include <charconv>
#include <string>
#include <string_view>
#include <vector>

#include "mmtab/error.hpp"
#include "mmtab/table.hpp"
#include "mmtab/table_builder.hpp"
#include "mmtab/text.hpp"

namespace mmtab::latex {

inline constexpr int kMaxSpan = 1000;

namespace detail {

inline bool is_letter(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }

inline std::string at(std::size_t offset) { return "offset " + std::to_string(offset); }

/// Index one past the group that opens at `open` (which must be '{'),
/// or npos when the group is unterminated. Escaped braces do not count.
inline std::size_t skip_group(std::string_view s, std::size_t open, char lhs = '{', char rhs = '}') {
  int depth = 0;
  for (std::size_t k = open; k < s.size(); ++k) {
    if (s[k] == '\\') {
      ++k;
    } else if (s[k] == lhs) {
      ++depth;
    } else if (s[k] == rhs) {
      if (--depth == 0) return k + 1;
    }
  }
  return std::string_view::npos;
}

inline void skip_space(std::string_view s, std::size_t& k) {
  while (k < s.size() && text::is_space(s[k])) ++k;
}

/// Reads a `{...}` argument at `k` (after optional whitespace). Returns false
/// when there is none.
inline bool read_arg(std::string_view s, std::size_t& k, std::string_view& arg) {
  skip_space(s, k);
  if (k >= s.size() || s[k] != '{') return false;
  std::size_t e = skip_group(s, k);
  if (e == std::string_view::npos) return false;
  arg = s.substr(k + 1, e - k - 2);
  k = e;
  return true;
}

inline void skip_optional_arg(std::string_view s, std::size_t& k) {
  std::size_t p = k;
  skip_space(s, p);
  if (p < s.size() && s[p] == '[') {
    std::size_t e = skip_group(s, p, '[', ']');
    if (e != std::string_view::npos) k = e;
  }
}

/// Rule commands carry no structure and are removed before splitting.
inline bool is_rule_command(std::string_view name) {
  return name == "hline" || name == "toprule" || name == "midrule" || name == "bottomrule" || name == "cline" ||
         name == "cmidrule" || name == "specialrule" || name == "addlinespace" || name == "noalign";
}

/// Converts cell text to plain content: unescapes special characters and
/// unwraps formatting commands. Unknown commands keep their name verbatim.
inline std::string to_plain(std::string_view s, ParseDiagnostics& diag, const std::string& where) {
  std::string out;
  for (std::size_t k = 0; k < s.size();) {
    char c = s[k];
    if (c == '\\') {
      if (k + 1 >= s.size()) {
        out.push_back('\\');
        ++k;
        continue;
      }
      char n = s[k + 1];
      if (!is_letter(n)) {
        // \& \% \$ \# \_ \{ \} and friends; "\ " is a space.
        out.push_back(n == ' ' || n == '\\' ? ' ' : n);
        k += 2;
        continue;
      }
      std::size_t e = k + 1;
      while (e < s.size() && is_letter(s[e])) ++e;
      std::string_view name = s.substr(k + 1, e - k - 1);
      k = e;
      bool empty_group = k + 1 < s.size() && s[k] == '{' && s[k + 1] == '}';
      if (name == "textbackslash" || name == "textasciitilde" || name == "textasciicircum") {
        out.push_back(name == "textbackslash" ? '\\' : name == "textasciitilde" ? '~' : '^');
        if (empty_group) {
          k += 2;
        } else {
          skip_space(s, k);
        }
      } else if (name == "textbf" || name == "textit" || name == "emph" || name == "underline" || name == "text" ||
                 name == "mbox" || name == "textrm" || name == "texttt" || name == "textsc" || name == "makecell") {
        // Argument is handled as an ordinary group below.
        skip_optional_arg(s, k);
      } else {
        diag.warn(where, "unknown command \\" + std::string(name) + " kept verbatim");
        out.push_back('\\');
        out.append(name);
        if (empty_group) k += 2;
      }
      continue;
    }
    if (c == '{' || c == '}' || c == '$') {
      ++k;
      continue;
    }
    if (c == '~') {
      out.push_back(' ');
      ++k;
      continue;
    }
    out.push_back(c);
    ++k;
  }
  return text::normalize_space(out);
}

inline bool starts_with_command(std::string_view s, std::string_view name) {
  s = text::trim(s);
  return s.size() > name.size() && s[0] == '\\' && s.substr(1, name.size()) == name &&
         !is_letter(s[1 + name.size()]);
}

inline int parse_span_arg(std::string_view arg, bool recover, ParseDiagnostics& diag, const std::string& where) {
  std::string_view v = text::trim(arg);
  int value = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), value);
  if (ec == std::errc{} && ptr == v.data() + v.size() && value >= 1 && value <= kMaxSpan) return value;
  if (!recover) throw ParseError(where, "invalid span count \"" + std::string(arg) + "\"");
  diag.warn(where, "invalid span count replaced by 1");
  return 1;
}

/// Parses one `&`-delimited cell, peeling \multicolumn and \multirow.
inline ::mmtab::detail::RawCell parse_cell(std::string_view raw, bool recover, ParseDiagnostics& diag,
                                           const std::string& where) {
  ::mmtab::detail::RawCell cell;
  std::string_view body = text::trim(raw);
  for (int guard = 0; guard < 2; ++guard) {
    if (starts_with_command(body, "multicolumn")) {
      std::size_t k = body.find("multicolumn") + 11;
      std::string_view n, spec, content;
      if (!read_arg(body, k, n) || !read_arg(body, k, spec) || !read_arg(body, k, content)) {
        if (!recover) throw ParseError(where, "malformed \\multicolumn");
        diag.warn(where, "malformed \\multicolumn treated as text");
        break;
      }
      cell.col_span = parse_span_arg(n, recover, diag, where);
      body = text::trim(content);
    } else if (starts_with_command(body, "multirow")) {
      std::size_t k = body.find("multirow") + 8;
      skip_optional_arg(body, k);
      std::string_view n, width, content;
      bool ok = read_arg(body, k, n);
      skip_optional_arg(body, k);
      ok = ok && read_arg(body, k, width);
      skip_optional_arg(body, k);
      ok = ok && read_arg(body, k, content);
      if (!ok) {
        if (!recover) throw ParseError(where, "malformed \\multirow");
        diag.warn(where, "malformed \\multirow treated as text");
        break;
      }
      cell.row_span = parse_span_arg(n, recover, diag, where);
      body = text::trim(content);
    } else {
      break;
    }
  }
  cell.content = to_plain(body, diag, where);
  return cell;
}

inline std::string escape(std::string_view content) {
  std::string out;
  for (char c : content) {
    switch (c) {
      case '\\': out += "\\textbackslash{}"; break;
      case '~': out += "\\textasciitilde{}"; break;
      case '^': out += "\\textasciicircum{}"; break;
      case '&': case '%': case '$': case '#': case '_': case '{': case '}':
        out.push_back('\\');
        out.push_back(c);
        break;
      default: out.push_back(c);
    }
  }
  return out;
}

}  // namespace detail

/// Parses the first tabular environment. `\multicolumn{n}` and `\multirow{n}`
/// become spans; rule commands and the column spec are ignored. Rows covered
/// by a \multirow from above must carry an empty placeholder cell there.
inline ParseResult parse_table(std::string_view src, bool recover = false) {
  using detail::at;
  ParseResult result;
  auto& diag = result.diagnostics;

  constexpr std::string_view kBegin = "\\begin{tabular}";
  constexpr std::string_view kEnd = "\\end{tabular}";
  std::size_t begin = src.find(kBegin);
  if (begin == std::string_view::npos) throw ParseError("offset 0", "no tabular environment found");
  std::size_t k = begin + kBegin.size();
  detail::skip_optional_arg(src, k);
  std::string_view colspec;
  if (!detail::read_arg(src, k, colspec)) {
    if (!recover) throw ParseError(at(k), "missing column specification");
    diag.warn(at(k), "missing column specification");
  }
  const std::size_t body_start = k;

  // Find the matching \end{tabular}, rejecting (or flattening) nested ones.
  std::string body;
  std::size_t end = std::string_view::npos;
  {
    int depth = 0;
    std::size_t p = body_start;
    while (p < src.size()) {
      if (src.compare(p, kBegin.size(), kBegin) == 0) {
        if (!recover) throw UnsupportedConstruct(at(p) + ": nested tabular environments are not supported");
        diag.warn(at(p), "nested tabular flattened into cell text");
        ++depth;
        p += kBegin.size();
        std::string_view ignored;
        detail::skip_optional_arg(src, p);
        detail::read_arg(src, p, ignored);
        continue;
      }
      if (src.compare(p, kEnd.size(), kEnd) == 0) {
        if (depth == 0) {
          end = p;
          break;
        }
        --depth;
        p += kEnd.size();
        continue;
      }
      if (depth > 0 && src[p] == '&') {
        body.push_back(' ');
        ++p;
        continue;
      }
      if (depth > 0 && src.compare(p, 2, "\\\\") == 0) {
        body.push_back(' ');
        p += 2;
        continue;
      }
      if (src[p] == '\\' && p + 1 < src.size()) {
        body.push_back(src[p]);
        body.push_back(src[p + 1]);
        p += 2;
        continue;
      }
      body.push_back(src[p++]);
    }
    if (end == std::string_view::npos) {
      if (!recover) throw ParseError(at(begin), "unbalanced structure: tabular is never closed");
      diag.warn(at(begin), "missing \\end{tabular}");
    } else if (!text::trim(src.substr(end + kEnd.size())).empty()) {
      diag.warn(at(end + kEnd.size()), "content after tabular ignored");
    }
  }

  // Split the body into rows and cells at brace depth 0, dropping rules.
  std::vector<std::vector<std::string>> raw_rows;
  bool had_break = false;
  {
    std::vector<std::string> row;
    std::string cell;
    int depth = 0;
    for (std::size_t p = 0; p < body.size();) {
      char c = body[p];
      if (c == '\\' && p + 1 < body.size()) {
        if (body[p + 1] == '\\' && depth == 0) {
          row.push_back(std::move(cell));
          cell.clear();
          raw_rows.push_back(std::move(row));
          row.clear();
          had_break = true;
          p += 2;
          std::size_t q = p;
          detail::skip_optional_arg(body, q);
          p = q;
          continue;
        }
        if (detail::is_letter(body[p + 1])) {
          std::size_t e = p + 1;
          while (e < body.size() && detail::is_letter(body[e])) ++e;
          std::string_view name(body.data() + p + 1, e - p - 1);
          if (depth == 0 && name == "tabularnewline") {
            row.push_back(std::move(cell));
            cell.clear();
            raw_rows.push_back(std::move(row));
            row.clear();
            had_break = true;
            p = e;
            continue;
          }
          if (depth == 0 && detail::is_rule_command(name)) {
            p = e;
            // Optional (trim) and [width] arguments, then {range} for cline-like rules.
            std::size_t q = p;
            detail::skip_space(body, q);
            if (q < body.size() && body[q] == '(') {
              std::size_t close = body.find(')', q);
              if (close != std::string::npos) p = close + 1;
            }
            detail::skip_optional_arg(body, p);
            if (name == "cline" || name == "cmidrule" || name == "noalign") {
              std::string_view ignored;
              detail::read_arg(body, p, ignored);
            }
            continue;
          }
          cell.append(body, p, e - p);
          p = e;
          continue;
        }
        cell.push_back(c);
        cell.push_back(body[p + 1]);
        p += 2;
        continue;
      }
      if (c == '{') ++depth;
      if (c == '}' && depth > 0) --depth;
      if (c == '&' && depth == 0) {
        row.push_back(std::move(cell));
        cell.clear();
        ++p;
        continue;
      }
      cell.push_back(c);
      ++p;
    }
    row.push_back(std::move(cell));
    // The segment after the final row break is only a row if it has text.
    bool blank = row.size() == 1 && text::trim(row.front()).empty();
    if (!blank || raw_rows.empty()) raw_rows.push_back(std::move(row));
  }

  std::vector<::mmtab::detail::RawRow> rows;
  for (std::size_t r = 0; r < raw_rows.size(); ++r) {
    const std::string where = "row " + std::to_string(r + 1);
    ::mmtab::detail::RawRow row;
    for (const auto& c : raw_rows[r]) row.push_back(detail::parse_cell(c, recover, diag, where));
    rows.push_back(std::move(row));
  }
  if (!had_break && rows.size() == 1 && rows.front().size() == 1 && text::trim(raw_rows.front().front()).empty())
    throw ParseError(at(body_start), "tabular has no rows");

  ::mmtab::detail::GridAssembler assembler(::mmtab::detail::Placement::ConsumeOccupied, recover, diag);
  result.table = assembler.assemble(rows);
  return result;
}

/// Canonical tabular: one `c` per column, rows terminated by `\\`, spans as
/// \multicolumn{n}{c}{...} wrapping \multirow{n}{*}{...}. Positions below a
/// \multirow get an empty placeholder of matching width.
inline std::string serialize_table(const Table& table) {
  const Grid grid = expand_grid(table);
  std::string out = "\\begin{tabular}{" + std::string(static_cast<std::size_t>(table.n_cols), 'c') + "}\n";
  for (int r = 1; r <= table.n_rows; ++r) {
    std::vector<std::string> cells;
    for (int c = 1; c <= table.n_cols;) {
      const AnchorCell& a = grid.at(r, c);
      std::string cell;
      if (a.row == r) {
        cell = detail::escape(a.content);
        if (a.row_span > 1) cell = "\\multirow{" + std::to_string(a.row_span) + "}{*}{" + cell + "}";
        if (a.col_span > 1) cell = "\\multicolumn{" + std::to_string(a.col_span) + "}{c}{" + cell + "}";
      } else if (a.col_span > 1) {
        cell = "\\multicolumn{" + std::to_string(a.col_span) + "}{c}{}";
      }
      cells.push_back(std::move(cell));
      c += a.col_span;
    }
    out += text::join(cells, " & ");
    out += " \\\\\n";
  }
  out += "\\end{tabular}";
  return out;
}

}  // namespace mmtab::latex
