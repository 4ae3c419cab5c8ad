#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "mmtab/error.hpp"
#include "mmtab/html_table.hpp"
#include "mmtab/latex_table.hpp"
#include "mmtab/markdown_table.hpp"
#include "mmtab/table.hpp"
#include "mmtab/table_builder.hpp"

namespace mmtab {

enum class TableFormat { Html, Markdown, Latex };

inline constexpr std::array<TableFormat, 3> kAllFormats = {TableFormat::Html, TableFormat::Markdown,
                                                           TableFormat::Latex};

inline std::string_view format_name(TableFormat f) {
  switch (f) {
    case TableFormat::Html: return "html";
    case TableFormat::Markdown: return "markdown";
    case TableFormat::Latex: return "latex";
  }
  return "html";
}

/// Display name used inside requests ("HTML", "Markdown", "LaTeX").
inline std::string_view format_display_name(TableFormat f) {
  switch (f) {
    case TableFormat::Html: return "HTML";
    case TableFormat::Markdown: return "Markdown";
    case TableFormat::Latex: return "LaTeX";
  }
  return "HTML";
}

inline std::optional<TableFormat> parse_format_name(std::string_view name) {
  const std::string n = text::to_lower(name);
  if (n == "html" || n == "htm") return TableFormat::Html;
  if (n == "markdown" || n == "md") return TableFormat::Markdown;
  if (n == "latex" || n == "tex") return TableFormat::Latex;
  return std::nullopt;
}

/// Source kinds recognised by file extension; Json is the canonical table form.
enum class SourceKind { Html, Markdown, Latex, Json };

inline std::optional<SourceKind> detect_source_kind(const std::filesystem::path& path) {
  const std::string ext = text::to_lower(path.extension().string());
  if (ext == ".html" || ext == ".htm") return SourceKind::Html;
  if (ext == ".md" || ext == ".markdown") return SourceKind::Markdown;
  if (ext == ".tex" || ext == ".latex") return SourceKind::Latex;
  if (ext == ".json") return SourceKind::Json;
  return std::nullopt;
}

inline TableFormat to_format(SourceKind k) {
  switch (k) {
    case SourceKind::Markdown: return TableFormat::Markdown;
    case SourceKind::Latex: return TableFormat::Latex;
    default: return TableFormat::Html;
  }
}

namespace detail {

inline ParseResult parse_any(std::string_view src, TableFormat fmt, bool recover) {
  if (text::trim(src).empty()) throw ParseError("offset 0", "empty source");
  switch (fmt) {
    case TableFormat::Html: return html::parse_table(src, recover);
    case TableFormat::Markdown: return markdown::parse_table(src, recover);
    case TableFormat::Latex: return latex::parse_table(src, recover);
  }
  throw ParseError("offset 0", "unknown format");
}

}  // namespace detail

/// Strict parse. Throws ParseError or UnsupportedConstruct; the returned
/// table always passes validate().
inline ParseResult parse(std::string_view src, TableFormat fmt) { return detail::parse_any(src, fmt, false); }

inline std::string serialize(const Table& table, TableFormat fmt) {
  switch (fmt) {
    case TableFormat::Html: return html::serialize_table(table);
    case TableFormat::Markdown: return markdown::serialize_table(table);
    case TableFormat::Latex: return latex::serialize_table(table);
  }
  throw UnrepresentableInFormat("unknown format");
}

inline constexpr std::string_view kEmptyTableHtml = "<table></table>";

struct ConvertResult {
  std::string html;
  ParseDiagnostics diagnostics;
};

/// Tolerant conversion of possibly malformed text to canonical HTML. Never
/// throws on bad input: unrecoverable sources yield "<table></table>" with
/// diagnostics.recovered == false.
inline ConvertResult convert(std::string_view src, TableFormat from) {
  ConvertResult out;
  try {
    ParseResult parsed = detail::parse_any(src, from, true);
    out.html = serialize(parsed.table, TableFormat::Html);
    out.diagnostics = std::move(parsed.diagnostics);
  } catch (const Error& e) {
    out.html = std::string(kEmptyTableHtml);
    out.diagnostics.recovered = false;
    out.diagnostics.warn("input", e.what());
  }
  return out;
}

}  // namespace mmtab
