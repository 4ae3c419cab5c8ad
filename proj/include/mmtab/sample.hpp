#pragma once

#include <optional>
#include <utility>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mmtab/error.hpp"
#include "mmtab/task.hpp"

namespace mmtab {

/// One turn of a multi-turn conversation; keeps the id of the single-turn
/// sample it came from.
struct Turn {
  std::string sample_id;
  TaskKind task = TaskKind::TSD;
  std::string request;
  std::string gold_response;
  nlohmann::json gold_answer;
  nlohmann::json meta = nlohmann::json::object();
};

/// One instruction-following record.
struct Sample {
  std::string sample_id;
  std::string table_id;
  TaskKind task = TaskKind::TSD;
  std::string split = "train";
  std::string image_ref;
  std::string request;
  nlohmann::json gold_answer;
  std::string gold_response;
  std::vector<Turn> turns;  // empty for single-turn samples
  nlohmann::json meta = nlohmann::json::object();

  bool is_conversation() const { return !turns.empty(); }
};

/// The JSON object a gold response carries for `answer`.
///
/// TSD, MCD and RCE answers are objects and are their own envelope; list and
/// text answers (TCE, TCL, TR, QAWrap) sit under the "answer" key.
inline nlohmann::json answer_envelope(TaskKind task, const nlohmann::json& answer) {
  switch (task) {
    case TaskKind::TSD:
    case TaskKind::MCD:
    case TaskKind::RCE: return answer;
    default: return nlohmann::json{{"answer", answer}};
  }
}

/// Inverse of answer_envelope for a parsed JSON object. Returns nullopt when
/// the object does not carry any key of the task's schema.
inline std::optional<nlohmann::json> envelope_payload(TaskKind task, const nlohmann::json& obj) {
  // in_place construction; a plain conversion from json is ambiguous
  using Payload = std::optional<nlohmann::json>;
  if (!obj.is_object()) return std::nullopt;
  switch (task) {
    case TaskKind::TSD:
      if (obj.contains("row_number") || obj.contains("column_number")) return Payload(std::in_place, obj);
      return std::nullopt;
    case TaskKind::MCD:
      if (obj.contains("has_merged") || obj.contains("regions")) return Payload(std::in_place, obj);
      return std::nullopt;
    case TaskKind::RCE:
      if (obj.contains("rows") || obj.contains("columns")) return Payload(std::in_place, obj);
      return std::nullopt;
    default:
      if (auto it = obj.find("answer"); it != obj.end()) return Payload(std::in_place, *it);
      return std::nullopt;
  }
}

inline std::string gold_response_for(TaskKind task, const nlohmann::json& answer) {
  return answer_envelope(task, answer).dump();
}

inline void to_json(nlohmann::json& j, const Turn& t) {
  j = nlohmann::json{{"sample_id", t.sample_id},         {"task", task_name(t.task)},
                     {"request", t.request},             {"gold_response", t.gold_response},
                     {"gold_answer", t.gold_answer},     {"meta", t.meta}};
}

inline void to_json(nlohmann::json& j, const Sample& s) {
  j = nlohmann::json{{"sample_id", s.sample_id},
                     {"table_id", s.table_id},
                     {"task", task_name(s.task)},
                     {"split", s.split},
                     {"image_ref", s.image_ref},
                     {"request", s.request},
                     {"gold_response", s.gold_response},
                     {"gold_answer", s.gold_answer},
                     {"turns", s.turns},
                     {"meta", s.meta}};
}

inline TaskKind task_from_json(const nlohmann::json& j) {
  auto t = parse_task_name(j.get<std::string>());
  if (!t) throw FileFormatError("unknown task \"" + j.get<std::string>() + "\"");
  return *t;
}

inline void from_json(const nlohmann::json& j, Turn& t) {
  t.sample_id = j.value("sample_id", std::string{});
  t.task = task_from_json(j.at("task"));
  t.request = j.at("request").get<std::string>();
  t.gold_response = j.at("gold_response").get<std::string>();
  t.gold_answer = j.value("gold_answer", nlohmann::json());
  t.meta = j.value("meta", nlohmann::json::object());
}

inline void from_json(const nlohmann::json& j, Sample& s) {
  s.sample_id = j.at("sample_id").get<std::string>();
  s.table_id = j.value("table_id", std::string{});
  s.task = task_from_json(j.at("task"));
  s.split = j.value("split", std::string("train"));
  s.image_ref = j.value("image_ref", std::string{});
  s.request = j.at("request").get<std::string>();
  s.gold_response = j.at("gold_response").get<std::string>();
  s.gold_answer = j.value("gold_answer", nlohmann::json());
  if (auto it = j.find("turns"); it != j.end() && it->is_array()) s.turns = it->get<std::vector<Turn>>();
  s.meta = j.value("meta", nlohmann::json::object());
}

}  // namespace mmtab
