#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mmtab/text.hpp"

namespace mmtab::html {

struct Token {
  enum class Kind { Open, Close, Text };

  Kind kind = Kind::Text;
  std::string name;  // lower-cased tag name for Open/Close
  std::vector<std::pair<std::string, std::string>> attrs;
  std::string text;  // raw (undecoded) text for Text
  bool self_closing = false;
  std::size_t offset = 0;

  const std::string* attr(std::string_view key) const {
    for (const auto& [k, v] : attrs)
      if (k == key) return &v;
    return nullptr;
  }
};

namespace detail {

inline bool is_name_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' || c == '_' ||
         c == ':';
}

inline bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }

}  // namespace detail

/// Lenient HTML tokenizer. Comments, doctypes and processing instructions are
/// dropped; script/style bodies are skipped; a '<' that does not start a tag
/// is text.
inline std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  std::string pending;
  std::size_t pending_at = 0;
  auto flush = [&] {
    if (!pending.empty()) {
      out.push_back(Token{Token::Kind::Text, {}, {}, std::move(pending), false, pending_at});
      pending.clear();
    }
  };
  auto add_text = [&](std::size_t at, std::string_view s) {
    if (pending.empty()) pending_at = at;
    pending.append(s);
  };

  std::size_t i = 0;
  const std::size_t n = src.size();
  while (i < n) {
    if (src[i] != '<') {
      std::size_t j = src.find('<', i);
      if (j == std::string_view::npos) j = n;
      add_text(i, src.substr(i, j - i));
      i = j;
      continue;
    }
    if (src.substr(i, 4) == "<!--") {
      flush();
      std::size_t e = src.find("-->", i + 4);
      i = e == std::string_view::npos ? n : e + 3;
      continue;
    }
    if (i + 1 < n && (src[i + 1] == '!' || src[i + 1] == '?')) {
      flush();
      std::size_t e = src.find('>', i);
      i = e == std::string_view::npos ? n : e + 1;
      continue;
    }
    const bool closing = i + 1 < n && src[i + 1] == '/';
    std::size_t p = i + (closing ? 2 : 1);
    if (p >= n || !detail::is_alpha(src[p])) {
      add_text(i, "<");
      ++i;
      continue;
    }
    flush();
    Token tok;
    tok.offset = i;
    tok.kind = closing ? Token::Kind::Close : Token::Kind::Open;
    std::size_t b = p;
    while (p < n && detail::is_name_char(src[p])) ++p;
    tok.name = text::to_lower(src.substr(b, p - b));
    // Attributes.
    for (;;) {
      while (p < n && text::is_space(src[p])) ++p;
      if (p >= n) break;
      if (src[p] == '>') {
        ++p;
        break;
      }
      if (src[p] == '/') {
        tok.self_closing = true;
        ++p;
        continue;
      }
      std::size_t kb = p;
      while (p < n && !text::is_space(src[p]) && src[p] != '=' && src[p] != '>' && src[p] != '/') ++p;
      if (p == kb) {
        ++p;
        continue;
      }
      std::string key = text::to_lower(src.substr(kb, p - kb));
      while (p < n && text::is_space(src[p])) ++p;
      std::string value;
      if (p < n && src[p] == '=') {
        ++p;
        while (p < n && text::is_space(src[p])) ++p;
        if (p < n && (src[p] == '"' || src[p] == '\'')) {
          char q = src[p++];
          std::size_t vb = p;
          while (p < n && src[p] != q) ++p;
          value = text::decode_entities(src.substr(vb, p - vb));
          if (p < n) ++p;
        } else {
          std::size_t vb = p;
          while (p < n && !text::is_space(src[p]) && src[p] != '>') ++p;
          value = text::decode_entities(src.substr(vb, p - vb));
        }
      }
      tok.attrs.emplace_back(std::move(key), std::move(value));
    }
    i = p;
    const bool raw_body = tok.kind == Token::Kind::Open && (tok.name == "script" || tok.name == "style");
    const std::string raw_name = tok.name;
    out.push_back(std::move(tok));
    if (raw_body) {
      std::string close = "</" + raw_name;
      std::size_t e = i;
      for (; e < n; ++e)
        if (src[e] == '<' && text::iequals(src.substr(e, close.size()), close)) break;
      i = e;
    }
  }
  flush();
  return out;
}

}  // namespace mmtab::html
