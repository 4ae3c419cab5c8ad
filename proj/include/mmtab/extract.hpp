#pragma once

#include <algorithm>
#include <cctype>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "mmtab/task.hpp"
#include "mmtab/text.hpp"

namespace mmtab::eval {

enum class ExtractionStatus { ParsedJson, RegexFallback, RawText, Failed };

inline std::string_view status_name(ExtractionStatus s) {
  switch (s) {
    case ExtractionStatus::ParsedJson: return "parsed_json";
    case ExtractionStatus::RegexFallback: return "regex_fallback";
    case ExtractionStatus::RawText: return "raw_text";
    case ExtractionStatus::Failed: return "failed";
  }
  return "failed";
}

/// ParsedJson and RegexFallback carry an object; RawText carries a string;
/// Failed carries null.
struct ExtractionResult {
  ExtractionStatus status = ExtractionStatus::Failed;
  nlohmann::json payload;
};

namespace detail {

/// Spans [begin, end) of top-level balanced {...} blocks. Quotes are tracked
/// only inside a block, so prose apostrophes do not confuse the scan. An
/// opening brace that never closes is skipped.
inline std::vector<std::pair<std::size_t, std::size_t>> brace_blocks(std::string_view s) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] != '{') {
      ++i;
      continue;
    }
    int depth = 0;
    bool in_string = false;
    std::size_t j = i;
    for (; j < s.size(); ++j) {
      const char c = s[j];
      if (in_string) {
        if (c == '\\') ++j;
        else if (c == '"') in_string = false;
        continue;
      }
      if (c == '"') in_string = true;
      else if (c == '{') ++depth;
      else if (c == '}' && --depth == 0) break;
    }
    if (j < s.size()) {
      out.emplace_back(i, j + 1);
      i = j + 1;
    } else {
      ++i;
    }
  }
  return out;
}

inline std::optional<long long> int_after_key(std::string_view s, std::string_view key) {
  for (auto pos = s.find(key); pos != std::string_view::npos; pos = s.find(key, pos + 1)) {
    std::size_t i = pos + key.size();
    // allow a short run of separators such as `": `, ` = `, ` is `
    const std::size_t limit = std::min(s.size(), i + 8);
    while (i < limit && !std::isdigit(static_cast<unsigned char>(s[i])) && !std::isalpha(static_cast<unsigned char>(s[i])))
      ++i;
    if (i + 2 < s.size() && s.substr(i, 3) == "is ") i += 3;
    if (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
      long long v = 0;
      int digits = 0;
      while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i])) && digits < 12) {
        v = v * 10 + (s[i++] - '0');
        ++digits;
      }
      return v;
    }
  }
  return std::nullopt;
}

inline std::optional<bool> bool_after_key(std::string_view s, std::string_view key) {
  for (auto pos = s.find(key); pos != std::string_view::npos; pos = s.find(key, pos + 1)) {
    std::size_t i = pos + key.size();
    const std::size_t limit = std::min(s.size(), i + 8);
    while (i < limit && !std::isalpha(static_cast<unsigned char>(s[i]))) ++i;
    const std::string word = text::to_lower(s.substr(i, 5));
    if (word.rfind("true", 0) == 0 || word.rfind("yes", 0) == 0) return true;
    if (word.rfind("false", 0) == 0 || word.rfind("no", 0) == 0) return false;
  }
  return std::nullopt;
}

/// The string literal following `"answer"`, decoded as JSON.
inline std::optional<std::string> answer_string(std::string_view s) {
  constexpr std::string_view key = "\"answer\"";
  for (auto pos = s.rfind(key); pos != std::string_view::npos; pos = pos ? s.rfind(key, pos - 1) : std::string_view::npos) {
    std::size_t i = pos + key.size();
    while (i < s.size() && text::is_space(s[i])) ++i;
    if (i >= s.size() || s[i] != ':') continue;
    ++i;
    while (i < s.size() && text::is_space(s[i])) ++i;
    if (i >= s.size() || s[i] != '"') continue;
    std::size_t j = i + 1;
    while (j < s.size() && s[j] != '"') j += s[j] == '\\' ? 2 : 1;
    if (j >= s.size()) continue;
    auto lit = nlohmann::json::parse(s.substr(i, j - i + 1), nullptr, false);
    if (!lit.is_discarded() && lit.is_string()) return lit.get<std::string>();
  }
  return std::nullopt;
}

inline std::optional<nlohmann::json> regex_fallback(std::string_view s, TaskKind task) {
  switch (task) {
    case TaskKind::TSD: {
      auto r = int_after_key(s, "row_number");
      auto c = int_after_key(s, "column_number");
      if (!r && !c) return std::nullopt;
      nlohmann::json out = nlohmann::json::object();
      if (r) out["row_number"] = *r;
      if (c) out["column_number"] = *c;
      return out;
    }
    case TaskKind::MCD: {
      auto b = bool_after_key(s, "has_merged");
      if (!b) return std::nullopt;
      return nlohmann::json{{"has_merged", *b}};
    }
    case TaskKind::TR:
    case TaskKind::QAWrap: {
      auto a = answer_string(s);
      if (!a) return std::nullopt;
      return nlohmann::json{{"answer", *a}};
    }
    default: return std::nullopt;
  }
}

}  // namespace detail

/// Pulls the final answer out of free-form model text. Never throws.
///
/// Balanced {...} blocks are tried from the last one backwards; the first
/// that parses as a JSON object wins. Then per-task key patterns are tried,
/// then the trimmed text itself. Only blank responses fail.
inline ExtractionResult extract_json_answer(std::string_view response, TaskKind task) {
  const std::string_view trimmed = text::trim(response);
  if (trimmed.empty()) return {ExtractionStatus::Failed, nullptr};
  const auto blocks = detail::brace_blocks(trimmed);
  for (auto it = blocks.rbegin(); it != blocks.rend(); ++it) {
    auto doc = nlohmann::json::parse(trimmed.substr(it->first, it->second - it->first), nullptr, false);
    if (!doc.is_discarded() && doc.is_object()) return {ExtractionStatus::ParsedJson, std::move(doc)};
  }
  if (auto fb = detail::regex_fallback(trimmed, task)) return {ExtractionStatus::RegexFallback, std::move(*fb)};
  return {ExtractionStatus::RawText, text::sanitize_utf8(trimmed)};
}

}  // namespace mmtab::eval
