#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "mmtab/error.hpp"
#include "mmtab/table.hpp"
#include "mmtab/text.hpp"

namespace mmtab::eval {

// ---------------------------------------------------------------------------
// Lenient readers for predicted values. All return nullopt instead of throwing.

inline std::optional<long long> as_integer(const nlohmann::json& j) {
  if (j.is_number_integer()) return j.get<long long>();
  if (j.is_number_unsigned()) return static_cast<long long>(std::min<unsigned long long>(j.get<unsigned long long>(), 1ULL << 62));
  if (j.is_number_float()) {
    const double d = j.get<double>();
    if (std::isfinite(d) && d == std::floor(d) && std::abs(d) < 1e15) return static_cast<long long>(d);
    return std::nullopt;
  }
  if (j.is_string()) {
    const std::string s(text::trim(j.get_ref<const std::string&>()));
    if (s.empty() || s.size() > 15) return std::nullopt;
    for (char c : s)
      if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
    return std::stoll(s);
  }
  return std::nullopt;
}

/// Cell text from a JSON value; numbers and booleans are printed.
inline std::optional<std::string> as_text(const nlohmann::json& j) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number() || j.is_boolean()) return j.dump();
  return std::nullopt;
}

/// [row, col] array, {"row", "col"} object or "(r, c)" string.
inline std::optional<CellRef> as_position(const nlohmann::json& j) {
  auto fits = [](std::optional<long long> v) { return v && *v >= -1000000 && *v <= 1000000; };
  if (j.is_array() && j.size() == 2) {
    auto r = as_integer(j[0]), c = as_integer(j[1]);
    if (fits(r) && fits(c)) return CellRef{static_cast<int>(*r), static_cast<int>(*c)};
  } else if (j.is_object() && j.contains("row") && j.contains("col")) {
    auto r = as_integer(j["row"]), c = as_integer(j["col"]);
    if (fits(r) && fits(c)) return CellRef{static_cast<int>(*r), static_cast<int>(*c)};
  } else if (j.is_string()) {
    std::vector<long long> nums;
    const std::string& s = j.get_ref<const std::string&>();
    for (std::size_t i = 0; i < s.size();) {
      if (std::isdigit(static_cast<unsigned char>(s[i]))) {
        long long v = 0;
        int digits = 0;
        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
          if (++digits <= 7) v = v * 10 + (s[i] - '0');
          ++i;
        }
        nums.push_back(v);
      } else {
        ++i;
      }
    }
    if (nums.size() == 2) return CellRef{static_cast<int>(nums[0]), static_cast<int>(nums[1])};
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// TSD

struct TsdScore {
  bool row_correct = false;
  bool col_correct = false;
};

/// Exact integer comparison per axis; a missing or malformed key is wrong.
inline TsdScore score_tsd(const nlohmann::json& pred, const nlohmann::json& gold) {
  TsdScore s;
  if (!pred.is_object() || !gold.is_object()) return s;
  auto field = [](const nlohmann::json& o, const char* key) -> std::optional<long long> {
    auto it = o.find(key);
    return it == o.end() ? std::nullopt : as_integer(*it);
  };
  auto pr = field(pred, "row_number"), pc = field(pred, "column_number");
  auto gr = field(gold, "row_number"), gc = field(gold, "column_number");
  s.row_correct = pr && gr && *pr == *gr;
  s.col_correct = pc && gc && *pc == *gc;
  return s;
}

// ---------------------------------------------------------------------------
// TCE / TCL

enum class KeyedBy { Position, Value };

struct CellAccuracy {
  std::size_t matched = 0;
  std::size_t total = 0;

  double accuracy() const { return total ? static_cast<double>(matched) / static_cast<double>(total) : 0.0; }
};

/// Cell-level accuracy. TCE (keyed by position) compares normalized values at
/// each gold position; TCL (keyed by value) compares positions exactly for each
/// gold value. The first prediction for a key wins.
inline CellAccuracy score_cell_accuracy(const nlohmann::json& pred, const nlohmann::json& gold, KeyedBy keyed_by) {
  CellAccuracy acc;
  if (!gold.is_array()) return acc;
  std::map<CellRef, std::string> by_position;
  std::map<std::string, CellRef> by_value;
  if (pred.is_array()) {
    for (const auto& e : pred) {
      if (!e.is_object() || !e.contains("position") || !e.contains("value")) continue;
      auto pos = as_position(e["position"]);
      auto val = as_text(e["value"]);
      if (!pos || !val) continue;
      by_position.emplace(*pos, text::normalize_answer(*val));
      by_value.emplace(text::normalize_answer(*val), *pos);
    }
  }
  for (const auto& g : gold) {
    ++acc.total;
    if (!g.is_object() || !g.contains("position") || !g.contains("value")) continue;
    auto pos = as_position(g["position"]);
    auto val = as_text(g["value"]);
    if (!pos || !val) continue;
    if (keyed_by == KeyedBy::Position) {
      auto it = by_position.find(*pos);
      if (it != by_position.end() && it->second == text::normalize_answer(*val)) ++acc.matched;
    } else {
      auto it = by_value.find(text::normalize_answer(*val));
      if (it != by_value.end() && it->second == *pos) ++acc.matched;
    }
  }
  return acc;
}

// ---------------------------------------------------------------------------
// Set F1

struct PrfScore {
  double precision = 0;
  double recall = 0;
  double f1 = 0;
};

/// Precision/recall/F1 of two sets. Both empty scores 1 throughout; an empty
/// prediction against a non-empty gold has precision 0.
template <typename T>
PrfScore score_set_f1(const std::set<T>& pred, const std::set<T>& gold) {
  if (pred.empty() && gold.empty()) return {1.0, 1.0, 1.0};
  std::size_t hit = 0;
  for (const auto& p : pred) hit += gold.count(p);
  PrfScore s;
  s.precision = pred.empty() ? 0.0 : static_cast<double>(hit) / static_cast<double>(pred.size());
  s.recall = gold.empty() ? 0.0 : static_cast<double>(hit) / static_cast<double>(gold.size());
  s.f1 = s.precision + s.recall > 0 ? 2 * s.precision * s.recall / (s.precision + s.recall) : 0.0;
  return s;
}

inline std::optional<std::set<MergedRegion>> as_regions(const nlohmann::json& j) {
  if (!j.is_array()) return std::nullopt;
  std::set<MergedRegion> out;
  for (const auto& r : j) {
    std::optional<CellRef> a, b;
    if (r.is_array() && r.size() == 2) {
      a = as_position(r[0]);
      b = as_position(r[1]);
    } else if (r.is_object() && r.contains("top_left") && r.contains("bottom_right")) {
      a = as_position(r["top_left"]);
      b = as_position(r["bottom_right"]);
    }
    if (a && b) out.insert({*a, *b});
  }
  return out;
}

struct McdScore {
  PrfScore regions;
  bool has_merged_correct = false;
};

/// Regions are scored as exact corner pairs. A prediction without a
/// "regions" list scores 0 even against an empty gold list.
inline McdScore score_mcd(const nlohmann::json& pred, const nlohmann::json& gold) {
  McdScore s;
  if (!pred.is_object() || !gold.is_object()) return s;
  if (auto g = gold.find("has_merged"), p = pred.find("has_merged");
      g != gold.end() && p != pred.end() && p->is_boolean() && *p == *g)
    s.has_merged_correct = true;
  auto gold_regions = gold.contains("regions") ? as_regions(gold["regions"]) : std::nullopt;
  auto pred_regions = pred.contains("regions") ? as_regions(pred["regions"]) : std::nullopt;
  if (gold_regions && pred_regions) s.regions = score_set_f1(*pred_regions, *gold_regions);
  return s;
}

struct RceScore {
  bool row_axis = true;
  double f1 = 0;  // mean over requested lines
  std::size_t lines = 0;
};

/// Per requested line, elements are (index in line, normalized content); F1
/// per line, averaged over the gold lines.
inline RceScore score_rce(const nlohmann::json& pred, const nlohmann::json& gold) {
  RceScore s;
  if (!gold.is_object()) return s;
  const bool rows = gold.contains("rows");
  s.row_axis = rows;
  const char* key = rows ? "rows" : "columns";
  auto g = gold.find(key);
  if (g == gold.end() || !g->is_object() || g->empty()) return s;
  const nlohmann::json* p = nullptr;
  if (pred.is_object())
    if (auto it = pred.find(key); it != pred.end() && it->is_object()) p = &*it;
  auto line_set = [](const nlohmann::json& line) {
    std::set<std::pair<std::size_t, std::string>> out;
    if (!line.is_array()) return out;
    for (std::size_t i = 0; i < line.size(); ++i)
      if (auto t = as_text(line[i])) out.emplace(i + 1, text::normalize_answer(*t));
    return out;
  };
  double sum = 0;
  for (const auto& [id, cells] : g->items()) {
    const auto gold_set = line_set(cells);
    std::set<std::pair<std::size_t, std::string>> pred_set;
    if (p)
      if (auto it = p->find(id); it != p->end()) pred_set = line_set(*it);
    sum += p ? score_set_f1(pred_set, gold_set).f1 : 0.0;
    ++s.lines;
  }
  s.f1 = sum / static_cast<double>(s.lines);
  return s;
}

// ---------------------------------------------------------------------------
// BLEU

/// Lower-cased runs of letters/digits, and each punctuation character alone.
/// Bytes >= 0x80 count as letters so UTF-8 words stay whole.
inline std::vector<std::string> bleu_tokenize(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    const auto c = static_cast<unsigned char>(ch);
    if (c >= 0x80 || std::isalnum(c)) {
      cur.push_back(static_cast<char>(std::tolower(c)));
      continue;
    }
    if (!cur.empty()) out.push_back(std::move(cur)), cur.clear();
    if (c >= 0x21 && c != 0x7f) out.emplace_back(1, ch);  // controls and spaces separate only
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

/// Sufficient statistics of one prediction/reference pair.
struct BleuStats {
  std::array<double, 4> matches{};  // clipped n-gram matches
  std::array<double, 4> totals{};   // candidate n-grams
  double pred_len = 0;
  double ref_len = 0;

  BleuStats& operator+=(const BleuStats& o) {
    for (int n = 0; n < 4; ++n) matches[n] += o.matches[n], totals[n] += o.totals[n];
    pred_len += o.pred_len;
    ref_len += o.ref_len;
    return *this;
  }
};

inline BleuStats bleu_stats(std::string_view prediction, std::string_view reference) {
  const auto c = bleu_tokenize(prediction), r = bleu_tokenize(reference);
  BleuStats st;
  st.pred_len = static_cast<double>(c.size());
  st.ref_len = static_cast<double>(r.size());
  for (std::size_t n = 1; n <= 4; ++n) {
    std::map<std::vector<std::string>, int> ref_counts, pred_counts;
    for (std::size_t i = 0; i + n <= r.size(); ++i) ++ref_counts[{r.begin() + i, r.begin() + i + n}];
    for (std::size_t i = 0; i + n <= c.size(); ++i) ++pred_counts[{c.begin() + i, c.begin() + i + n}];
    double m = 0, t = 0;
    for (const auto& [gram, k] : pred_counts) {
      t += k;
      if (auto it = ref_counts.find(gram); it != ref_counts.end()) m += std::min(k, it->second);
    }
    st.matches[n - 1] = m;
    st.totals[n - 1] = t;
  }
  return st;
}

/// Corpus BLEU-4 in [0, 100] from summed statistics. Zero n-gram matches at
/// orders 2..4 are smoothed to 1 / (total + 1); a zero unigram precision is
/// not smoothed and gives 0.
inline double bleu_from_stats(const BleuStats& st) {
  if (st.pred_len <= 0) return 0.0;
  double log_sum = 0;
  for (int n = 0; n < 4; ++n) {
    double p;
    if (st.matches[n] > 0) {
      p = st.matches[n] / st.totals[n];
    } else {
      if (n == 0) return 0.0;
      p = 1.0 / (st.totals[n] + 1.0);
    }
    log_sum += std::log(p) / 4.0;
  }
  const double bp = st.pred_len >= st.ref_len ? 1.0 : std::exp(1.0 - st.ref_len / st.pred_len);
  return 100.0 * bp * std::exp(log_sum);
}

inline double bleu(const std::vector<std::string>& predictions, const std::vector<std::string>& references) {
  if (predictions.size() != references.size())
    throw LengthMismatch("bleu: " + std::to_string(predictions.size()) + " predictions vs " +
                         std::to_string(references.size()) + " references");
  BleuStats total;
  for (std::size_t i = 0; i < predictions.size(); ++i) total += bleu_stats(predictions[i], references[i]);
  return bleu_from_stats(total);
}

// ---------------------------------------------------------------------------
// QA answers

/// Number after removing thousands separators and percent signs.
inline std::optional<double> as_number(std::string_view s) {
  std::string t;
  for (char c : text::trim(s))
    if (c != ',' && c != '%') t.push_back(c);
  if (t.empty() || t.size() > 64) return std::nullopt;
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size() || !std::isfinite(v)) return std::nullopt;
  if (std::isalpha(static_cast<unsigned char>(t[0])) || std::isalpha(static_cast<unsigned char>(t.back())))
    return std::nullopt;  // inf/nan spellings and hex floats
  return v;
}

inline bool scalar_answers_match(std::string_view pred, std::string_view gold) {
  auto pn = as_number(pred), gn = as_number(gold);
  if (pn && gn) return std::abs(*pn - *gn) <= 1e-6;
  return text::normalize_answer(pred) == text::normalize_answer(gold);
}

/// A list answer as a multiset of normalized strings; a string splits on
/// commas and '|'.
inline std::vector<std::string> answer_items(const nlohmann::json& a) {
  std::vector<std::string> out;
  if (a.is_array()) {
    for (const auto& e : a)
      if (auto t = as_text(e)) out.push_back(*t);
  } else if (auto t = as_text(a)) {
    std::string cur;
    for (char c : *t) {
      if (c == ',' || c == '|') out.push_back(std::exchange(cur, {}));
      else cur.push_back(c);
    }
    out.push_back(cur);
  }
  return out;
}

/// Accuracy match for QA answers. Numbers compare with absolute tolerance
/// 1e-6; list answers compare as order-insensitive multisets.
inline bool answers_match(const nlohmann::json& pred, const nlohmann::json& gold) {
  if (!gold.is_array()) {
    auto p = as_text(pred), g = as_text(gold);
    if (p && g) return scalar_answers_match(*p, *g);
    if (pred.is_array() && pred.size() == 1 && g)
      if (auto p0 = as_text(pred[0])) return scalar_answers_match(*p0, *g);
    return false;
  }
  auto ps = answer_items(pred), gs = answer_items(gold);
  if (ps.size() != gs.size()) return false;
  std::vector<bool> used(gs.size(), false);
  for (const auto& p : ps) {
    bool found = false;
    for (std::size_t i = 0; i < gs.size() && !found; ++i)
      if (!used[i] && scalar_answers_match(p, gs[i])) used[i] = found = true;
    if (!found) return false;
  }
  return true;
}

}  // namespace mmtab::eval
