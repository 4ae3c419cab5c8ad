#pragma once

#include <algorithm>
#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "mmtab/format_io.hpp"
#include "mmtab/html.hpp"
#include "mmtab/text.hpp"
#include "mmtab/tree_edit_distance.hpp"

namespace mmtab::eval {

enum class NodeTag { Table, Tr, Td };

struct TableNode {
  NodeTag tag = NodeTag::Table;
  std::u32string content;  // td only
  int colspan = 1;
  int rowspan = 1;
};

using TableTree = OrderedTree<TableNode>;

namespace detail {

inline int span_value(const html::Token& tok, std::string_view key) {
  const std::string* v = tok.attr(key);
  if (!v) return 1;
  const std::string_view s = text::trim(*v);
  long long n = 0;
  std::size_t i = 0;
  for (; i < s.size() && std::isdigit(static_cast<unsigned char>(s[i])) && n <= 100000; ++i) n = n * 10 + (s[i] - '0');
  if (i == 0 || n < 1) return 1;
  return static_cast<int>(std::min<long long>(n, 1000));
}

}  // namespace detail

/// Canonical tree of the first <table> in `html`. th becomes td, section
/// wrappers (thead/tbody/tfoot) and captions vanish, and only spans are kept.
/// Input without a table yields the single-node tree.
inline TableTree html_to_tree(std::string_view html) {
  TableTree tree;
  tree.add(TableNode{NodeTag::Table, {}, 1, 1});
  const auto tokens = html::tokenize(html);
  bool started = false;
  int nested = 0;
  std::size_t tr = 0, td = 0;  // 0 = none (the root is never a tr/td)
  std::string cell_text;
  auto close_td = [&] {
    if (td) tree.nodes[td].label.content = text::utf8_decode(text::normalize_space(cell_text));
    td = 0;
    cell_text.clear();
  };
  for (const auto& tok : tokens) {
    using K = html::Token::Kind;
    if (!started) {
      if (tok.kind == K::Open && tok.name == "table") started = true;
      continue;
    }
    if (tok.kind == K::Text) {
      if (td) cell_text += text::decode_entities(tok.text);
      continue;
    }
    const std::string& name = tok.name;
    if (name == "table") {
      if (tok.kind == K::Open && !tok.self_closing) {
        ++nested;
      } else if (tok.kind == K::Close) {
        if (nested == 0) break;
        --nested;
      }
      continue;
    }
    if (nested > 0) {
      if (td && tok.kind == K::Open) cell_text.push_back(' ');
      continue;
    }
    if (name == "tr") {
      close_td();
      if (tok.kind == K::Open) tr = tree.add_child(0, TableNode{NodeTag::Tr, {}, 1, 1});
      else tr = 0;
    } else if (name == "td" || name == "th") {
      close_td();
      if (tok.kind == K::Open) {
        if (!tr) tr = tree.add_child(0, TableNode{NodeTag::Tr, {}, 1, 1});
        td = tree.add_child(tr, TableNode{NodeTag::Td, {}, detail::span_value(tok, "colspan"),
                                          detail::span_value(tok, "rowspan")});
        if (tok.self_closing) close_td();
      }
    } else if (td && tok.kind == K::Open) {
      cell_text.push_back(' ');  // br, p, div and friends separate words
    }
  }
  close_td();
  return tree;
}

/// Levenshtein distance over code points divided by the longer length.
inline double normalized_levenshtein(const std::u32string& a, const std::u32string& b) {
  if (a.empty() && b.empty()) return 0.0;
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j)
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
    std::swap(prev, cur);
  }
  return static_cast<double>(prev[b.size()]) / static_cast<double>(std::max(a.size(), b.size()));
}

inline double teds_substitution(const TableNode& x, const TableNode& y) {
  if (x.tag != y.tag) return 1.0;
  if (x.tag != NodeTag::Td) return 0.0;
  if (x.colspan != y.colspan || x.rowspan != y.rowspan) return 1.0;
  return normalized_levenshtein(x.content, y.content);
}

inline double table_tree_distance(const TableTree& a, const TableTree& b) {
  using Node = TableTree::Node;
  return tree_edit_distance(
      a, b, [](const Node&) { return 1.0; }, [](const Node&) { return 1.0; },
      [](const Node& x, const Node& y) { return teds_substitution(x.label, y.label); });
}

inline double teds(const TableTree& a, const TableTree& b) {
  const double d = table_tree_distance(a, b);
  const double n = static_cast<double>(std::max(a.size(), b.size()));
  return std::clamp(1.0 - d / n, 0.0, 1.0);
}

/// Tree-edit-distance similarity of two HTML tables, in [0, 1].
inline double teds(std::string_view pred_html, std::string_view gold_html) {
  return teds(html_to_tree(pred_html), html_to_tree(gold_html));
}

/// Converts a prediction in `pred_fmt` to HTML and scores it against the gold
/// HTML. Unconvertible predictions become the empty table. Never throws.
inline double score_tr(std::string_view pred, TableFormat pred_fmt, std::string_view gold_html) {
  std::string html;
  try {
    html = convert(pred, pred_fmt).html;
  } catch (const std::exception&) {
    html = std::string(kEmptyTableHtml);
  }
  return teds(html, gold_html);
}

}  // namespace mmtab::eval
