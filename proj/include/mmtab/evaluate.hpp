#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "mmtab/error.hpp"
#include "mmtab/extract.hpp"
#include "mmtab/format_io.hpp"
#include "mmtab/metrics.hpp"
#include "mmtab/parallel.hpp"
#include "mmtab/sample.hpp"
#include "mmtab/task.hpp"
#include "mmtab/teds.hpp"

namespace mmtab::eval {

/// One line of a predictions file. Conversations may answer all turns at
/// once through `responses`.
struct Prediction {
  std::string sample_id;
  std::optional<std::string> response;
  std::vector<std::string> responses;
};

struct SampleScore {
  std::string sample_id;
  std::string conversation_id;  // empty for single-turn samples
  TaskKind task = TaskKind::TSD;
  std::string status;   // extraction status, or "missing"
  std::string verdict;  // "correct", "partial" or "wrong"
  double score = 0;
  std::map<std::string, double> components;
  std::string format;  // TR target format
  std::string metric;  // QAWrap: "accuracy" or "bleu"
};

struct EvalCounts {
  std::size_t evaluated = 0;
  std::size_t extraction_failed = 0;
  std::size_t skipped = 0;

  friend bool operator==(const EvalCounts&, const EvalCounts&) = default;
};

struct MetricReport {
  std::map<TaskKind, std::map<std::string, double>> per_task;
  std::vector<SampleScore> per_sample;
  EvalCounts counts;
  std::vector<std::string> skipped_ids;
};

namespace detail {

inline bool is_failed(std::string_view status) { return status == "failed" || status == "missing"; }

/// The predicted payload under the task schema, or null.
inline nlohmann::json predicted_payload(TaskKind task, const ExtractionResult& ex) {
  switch (ex.status) {
    case ExtractionStatus::ParsedJson:
    case ExtractionStatus::RegexFallback: {
      auto p = envelope_payload(task, ex.payload);
      return p ? *p : nlohmann::json();
    }
    case ExtractionStatus::RawText:
      return task == TaskKind::TR || task == TaskKind::QAWrap ? ex.payload : nlohmann::json();
    case ExtractionStatus::Failed: break;
  }
  return nullptr;
}

inline std::string payload_text(const nlohmann::json& j) {
  if (auto t = as_text(j)) return *t;
  if (j.is_null()) return {};
  return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

inline std::optional<TableFormat> guess_format(std::string_view s) {
  s = text::trim(s);
  if (s.empty()) return std::nullopt;
  if (s.find("\\begin{tabular") != std::string_view::npos) return TableFormat::Latex;
  if (s.find("<table") != std::string_view::npos || s.front() == '<') return TableFormat::Html;
  if (s.find('|') != std::string_view::npos) return TableFormat::Markdown;
  return std::nullopt;
}

inline void add_bleu_components(std::map<std::string, double>& c, const BleuStats& st) {
  for (int n = 0; n < 4; ++n) {
    c["bleu_match_" + std::to_string(n + 1)] = st.matches[n];
    c["bleu_total_" + std::to_string(n + 1)] = st.totals[n];
  }
  c["bleu_pred_len"] = st.pred_len;
  c["bleu_ref_len"] = st.ref_len;
}

inline BleuStats bleu_components(const std::map<std::string, double>& c) {
  BleuStats st;
  auto get = [&](const std::string& k) {
    auto it = c.find(k);
    return it == c.end() ? 0.0 : it->second;
  };
  for (int n = 0; n < 4; ++n) {
    st.matches[n] = get("bleu_match_" + std::to_string(n + 1));
    st.totals[n] = get("bleu_total_" + std::to_string(n + 1));
  }
  st.pred_len = get("bleu_pred_len");
  st.ref_len = get("bleu_ref_len");
  return st;
}

inline std::string verdict_for(double score) {
  if (score >= 1.0 - 1e-12) return "correct";
  return score > 0 ? "partial" : "wrong";
}

}  // namespace detail

/// Scores one response against one gold unit. `response` empty means the
/// prediction is missing. Never throws.
inline SampleScore score_response(TaskKind task, const nlohmann::json& gold_answer, const nlohmann::json& meta,
                                  const std::optional<std::string>& response) {
  SampleScore s;
  s.task = task;
  ExtractionResult ex;
  if (response) {
    ex = extract_json_answer(*response, task);
    s.status = std::string(status_name(ex.status));
  } else {
    s.status = "missing";
  }
  const nlohmann::json pred = detail::predicted_payload(task, ex);
  auto& c = s.components;
  try {
    switch (task) {
      case TaskKind::TSD: {
        const auto r = score_tsd(pred, gold_answer);
        c["row"] = r.row_correct;
        c["col"] = r.col_correct;
        s.score = (c["row"] + c["col"]) / 2;
        break;
      }
      case TaskKind::TCE:
      case TaskKind::TCL: {
        const auto r = score_cell_accuracy(pred, gold_answer, task == TaskKind::TCE ? KeyedBy::Position : KeyedBy::Value);
        c["matched"] = static_cast<double>(r.matched);
        c["total"] = static_cast<double>(r.total);
        s.score = r.accuracy();
        break;
      }
      case TaskKind::MCD: {
        const auto r = score_mcd(pred, gold_answer);
        c["precision"] = r.regions.precision;
        c["recall"] = r.regions.recall;
        c["f1"] = r.regions.f1;
        c["has_merged"] = r.has_merged_correct;
        s.score = r.regions.f1;
        break;
      }
      case TaskKind::RCE: {
        const auto r = score_rce(pred, gold_answer);
        c["f1"] = r.f1;
        c["row_axis"] = r.row_axis;
        s.score = r.f1;
        break;
      }
      case TaskKind::TR: {
        const std::string gold_text = detail::payload_text(gold_answer);
        const std::string pred_text = detail::payload_text(pred);
        std::optional<TableFormat> fmt;
        if (meta.is_object() && meta.contains("format") && meta["format"].is_string())
          fmt = parse_format_name(meta["format"].get<std::string>());
        if (!fmt) fmt = detail::guess_format(gold_text);
        const TableFormat f = fmt.value_or(TableFormat::Html);
        s.format = std::string(format_name(f));
        const std::string gold_html = convert(gold_text, f).html;
        // a missing prediction scores 0, not the sentinel tree's small credit
        c["teds"] = response ? score_tr(pred_text, f, gold_html) : 0.0;
        s.score = c["teds"];
        break;
      }
      case TaskKind::QAWrap: {
        s.metric = meta.is_object() ? meta.value("metric", std::string("accuracy")) : "accuracy";
        if (s.metric == "bleu") {
          const auto st = bleu_stats(pred.is_null() ? "" : detail::payload_text(pred), detail::payload_text(gold_answer));
          detail::add_bleu_components(c, st);
          s.score = bleu_from_stats(st) / 100.0;
        } else {
          s.metric = "accuracy";
          c["correct"] = !pred.is_null() && answers_match(pred, gold_answer);
          s.score = c["correct"];
        }
        break;
      }
    }
  } catch (const std::exception&) {
    // a gold record this scorer cannot read; the response earns nothing
    for (auto& [k, v] : c) v = 0;
    s.score = 0;
  }
  s.verdict = detail::verdict_for(s.score);
  return s;
}

/// Aggregate scores per task, recomputed from per-sample records only.
inline std::map<TaskKind, std::map<std::string, double>> aggregate(const std::vector<SampleScore>& per_sample) {
  struct Acc {
    std::map<std::string, double> sum;
    std::map<std::string, double> n;
    BleuStats bleu;
    void add(const std::string& key, double v) {
      sum[key] += v;
      n[key] += 1;
    }
  };
  std::map<TaskKind, Acc> acc;
  for (const auto& s : per_sample) {
    Acc& a = acc[s.task];
    a.add("n", 0);
    auto get = [&](const char* k) {
      auto it = s.components.find(k);
      return it == s.components.end() ? 0.0 : it->second;
    };
    switch (s.task) {
      case TaskKind::TSD:
        a.add("row_acc", get("row"));
        a.add("col_acc", get("col"));
        break;
      case TaskKind::TCE:
      case TaskKind::TCL:
        a.sum["cell_acc"] += get("matched");
        a.n["cell_acc"] += get("total");
        break;
      case TaskKind::MCD:
        a.add("f1", get("f1"));
        a.add("precision", get("precision"));
        a.add("recall", get("recall"));
        a.add("has_merged_acc", get("has_merged"));
        break;
      case TaskKind::RCE:
        a.add("f1", get("f1"));
        a.add(get("row_axis") > 0 ? "row_f1" : "col_f1", get("f1"));
        break;
      case TaskKind::TR:
        a.add("teds", get("teds"));
        a.add("teds_" + s.format, get("teds"));
        break;
      case TaskKind::QAWrap:
        if (s.metric == "bleu") {
          a.add("bleu_n", 0);
          a.bleu += detail::bleu_components(s.components);
        } else {
          a.add("accuracy", get("correct"));
        }
        break;
    }
  }
  std::map<TaskKind, std::map<std::string, double>> out;
  for (auto& [task, a] : acc) {
    auto& m = out[task];
    for (const auto& [k, total] : a.sum) {
      if (k == "n" || k == "bleu_n") continue;
      m[k] = a.n[k] > 0 ? total / a.n[k] : 0.0;
    }
    m["n"] = a.n["n"];
    if (a.n.count("bleu_n")) m["bleu"] = bleu_from_stats(a.bleu);
  }
  return out;
}

/// Scores predictions against gold samples, aligned by sample_id. Gold units
/// without a prediction score 0 and count as extraction failures; predictions
/// matching no gold unit are skipped and listed.
inline MetricReport evaluate(const std::vector<Prediction>& predictions, const std::vector<Sample>& gold,
                             unsigned workers = 1) {
  std::map<std::string, const Prediction*> by_id;
  for (const auto& p : predictions)
    if (!by_id.emplace(p.sample_id, &p).second) throw FileFormatError("duplicate prediction for " + p.sample_id);

  struct Unit {
    std::string id;
    std::string conversation_id;
    TaskKind task;
    const nlohmann::json* answer;
    const nlohmann::json* meta;
    std::optional<std::string> response;
  };
  std::vector<Unit> units;
  std::set<std::string> known;
  for (const auto& g : gold) {
    if (!known.insert(g.sample_id).second) throw FileFormatError("duplicate gold sample " + g.sample_id);
    if (!g.is_conversation()) {
      Unit u{g.sample_id, {}, g.task, &g.gold_answer, &g.meta, std::nullopt};
      if (auto it = by_id.find(g.sample_id); it != by_id.end()) u.response = it->second->response;
      units.push_back(std::move(u));
      continue;
    }
    const Prediction* whole = nullptr;
    if (auto it = by_id.find(g.sample_id); it != by_id.end()) whole = it->second;
    for (std::size_t k = 0; k < g.turns.size(); ++k) {
      const Turn& t = g.turns[k];
      Unit u{t.sample_id.empty() ? g.sample_id + "#" + std::to_string(k + 1) : t.sample_id, g.sample_id, t.task,
             &t.gold_answer, &t.meta, std::nullopt};
      if (!known.insert(u.id).second) throw FileFormatError("duplicate gold sample " + u.id);
      if (auto it = by_id.find(u.id); it != by_id.end()) u.response = it->second->response;
      else if (whole && k < whole->responses.size()) u.response = whole->responses[k];
      else if (whole && k == 0 && whole->response) u.response = whole->response;
      units.push_back(std::move(u));
    }
  }

  MetricReport report;
  report.per_sample.resize(units.size());
  parallel_for(units.size(), workers, [&](std::size_t i) {
    const Unit& u = units[i];
    SampleScore s = score_response(u.task, *u.answer, *u.meta, u.response);
    s.sample_id = u.id;
    s.conversation_id = u.conversation_id;
    report.per_sample[i] = std::move(s);
  });
  for (const auto& s : report.per_sample) {
    ++report.counts.evaluated;
    if (detail::is_failed(s.status)) ++report.counts.extraction_failed;
  }
  for (const auto& p : predictions)
    if (!known.count(p.sample_id)) report.skipped_ids.push_back(p.sample_id);
  std::sort(report.skipped_ids.begin(), report.skipped_ids.end());
  report.counts.skipped = report.skipped_ids.size();
  report.per_task = aggregate(report.per_sample);
  return report;
}

// ---------------------------------------------------------------------------
// Files

inline std::vector<Prediction> read_predictions(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileFormatError("cannot read predictions file " + path.string());
  std::vector<Prediction> out;
  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    if (text::trim(line).empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(lineno);
    auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw FileFormatError(where + ": not a JSON object");
    auto id = j.find("sample_id");
    if (id == j.end() || !id->is_string()) throw FileFormatError(where + ": missing string sample_id");
    Prediction p;
    p.sample_id = id->get<std::string>();
    if (auto r = j.find("response"); r != j.end() && !r->is_null()) {
      if (!r->is_string()) throw FileFormatError(where + ": response must be a string");
      p.response = r->get<std::string>();
    }
    if (auto r = j.find("responses"); r != j.end() && !r->is_null()) {
      if (!r->is_array()) throw FileFormatError(where + ": responses must be an array");
      for (const auto& e : *r) {
        if (!e.is_string()) throw FileFormatError(where + ": responses must hold strings");
        p.responses.push_back(e.get<std::string>());
      }
    }
    out.push_back(std::move(p));
  }
  return out;
}

inline std::vector<Sample> read_samples(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileFormatError("cannot read samples file " + path.string());
  std::vector<Sample> out;
  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    if (text::trim(line).empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(lineno);
    auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw FileFormatError(where + ": not a JSON object");
    try {
      out.push_back(j.get<Sample>());
    } catch (const nlohmann::json::exception& e) {
      throw FileFormatError(where + ": " + e.what());
    } catch (const FileFormatError& e) {
      throw FileFormatError(where + ": " + e.what());
    }
  }
  return out;
}

inline nlohmann::json report_to_json(const MetricReport& r) {
  nlohmann::json j;
  j["counts"] = {{"evaluated", r.counts.evaluated},
                 {"extraction_failed", r.counts.extraction_failed},
                 {"skipped", r.counts.skipped}};
  j["per_task"] = nlohmann::json::object();
  for (const auto& [task, m] : r.per_task) j["per_task"][std::string(task_name(task))] = m;
  j["per_sample"] = nlohmann::json::array();
  for (const auto& s : r.per_sample) {
    nlohmann::json e{{"sample_id", s.sample_id}, {"task", task_name(s.task)}, {"status", s.status},
                     {"verdict", s.verdict},     {"score", s.score},          {"components", s.components}};
    if (!s.conversation_id.empty()) e["conversation_id"] = s.conversation_id;
    if (!s.format.empty()) e["format"] = s.format;
    if (!s.metric.empty()) e["metric"] = s.metric;
    j["per_sample"].push_back(std::move(e));
  }
  j["skipped_ids"] = r.skipped_ids;
  return j;
}

inline MetricReport report_from_json(const nlohmann::json& j) {
  MetricReport r;
  try {
    r.counts.evaluated = j.at("counts").at("evaluated").get<std::size_t>();
    r.counts.extraction_failed = j.at("counts").at("extraction_failed").get<std::size_t>();
    r.counts.skipped = j.at("counts").at("skipped").get<std::size_t>();
    for (const auto& [k, m] : j.at("per_task").items()) {
      auto t = parse_task_name(k);
      if (!t) throw FileFormatError("unknown task " + k);
      r.per_task[*t] = m.get<std::map<std::string, double>>();
    }
    for (const auto& e : j.at("per_sample")) {
      SampleScore s;
      s.sample_id = e.at("sample_id").get<std::string>();
      s.task = task_from_json(e.at("task"));
      s.status = e.at("status").get<std::string>();
      s.verdict = e.at("verdict").get<std::string>();
      s.score = e.at("score").get<double>();
      s.components = e.at("components").get<std::map<std::string, double>>();
      s.conversation_id = e.value("conversation_id", std::string{});
      s.format = e.value("format", std::string{});
      s.metric = e.value("metric", std::string{});
      r.per_sample.push_back(std::move(s));
    }
    r.skipped_ids = j.value("skipped_ids", std::vector<std::string>{});
  } catch (const nlohmann::json::exception& e) {
    throw FileFormatError(std::string("malformed report: ") + e.what());
  }
  return r;
}

/// Human-readable summary, one line per task.
inline std::string summary_table(const MetricReport& r) {
  std::ostringstream out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-8s %6s  %s\n", "task", "n", "metrics");
  out << buf;
  for (const auto& [task, m] : r.per_task) {
    std::string metrics;
    for (const auto& [k, v] : m) {
      if (k == "n") continue;
      std::snprintf(buf, sizeof buf, "%s%s=%.4f", metrics.empty() ? "" : "  ", k.c_str(), v);
      metrics += buf;
    }
    const auto n = m.count("n") ? m.at("n") : 0.0;
    std::snprintf(buf, sizeof buf, "%-8s %6.0f  ", std::string(task_name(task)).c_str(), n);
    out << buf << metrics << '\n';
  }
  out << "evaluated=" << r.counts.evaluated << " extraction_failed=" << r.counts.extraction_failed
      << " skipped=" << r.counts.skipped << '\n';
  return out.str();
}

}  // namespace mmtab::eval
