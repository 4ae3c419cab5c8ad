#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <unistd.h>

#include <nlohmann/json.hpp>

#include "mmtab/default_pool.hpp"
#include "mmtab/error.hpp"
#include "mmtab/rng.hpp"
#include "mmtab/task.hpp"

namespace mmtab::instruct {

struct Template {
  std::string id;
  TaskKind task = TaskKind::TSD;
  std::string body;
};

struct FormatHint {
  std::string id;
  std::string body;
};

/// Immutable after loading; safe to share across threads.
struct TemplatePool {
  std::map<TaskKind, std::vector<Template>> templates;
  std::map<TaskKind, std::vector<FormatHint>> hints;

  std::size_t template_count(TaskKind t) const {
    auto it = templates.find(t);
    return it == templates.end() ? 0 : it->second.size();
  }
  std::size_t hint_count(TaskKind t) const {
    auto it = hints.find(t);
    return it == hints.end() ? 0 : it->second.size();
  }
};

/// `{name}` markers in `body`, in order of appearance. Only lower-case
/// identifiers count, so literal JSON such as {"answer": 1} is not a marker.
inline std::vector<std::string> placeholders_in(std::string_view body) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < body.size(); ++i) {
    if (body[i] != '{') continue;
    std::size_t j = i + 1;
    while (j < body.size() && ((body[j] >= 'a' && body[j] <= 'z') || body[j] == '_')) ++j;
    if (j > i + 1 && j < body.size() && body[j] == '}') {
      out.emplace_back(body.substr(i + 1, j - i - 1));
      i = j;
    }
  }
  return out;
}

/// Empty string when the template is acceptable, otherwise the reason.
inline std::string check_template(TaskKind task, std::string_view body) {
  if (body.empty()) return "empty body";
  const auto allowed = allowed_placeholders(task);
  bool has_input = false;
  const auto required = input_placeholder(task);
  for (const auto& p : placeholders_in(body)) {
    if (std::find(allowed.begin(), allowed.end(), p) == allowed.end())
      return "placeholder {" + p + "} is not defined for " + std::string(task_name(task));
    if (required && p == *required) has_input = true;
  }
  if (required && !has_input) return "template must reference {" + std::string(*required) + "}";
  return {};
}

/// Empty string when the hint is acceptable, otherwise the reason.
inline std::string check_hint(TaskKind task, std::string_view body) {
  if (body.empty()) return "empty body";
  if (!placeholders_in(body).empty()) return "format hints may not contain placeholders";
  for (auto key : answer_schema_keys(task))
    if (body.find(key) == std::string_view::npos) return "hint does not name the key \"" + std::string(key) + "\"";
  return {};
}

/// Builds a pool from its JSON document, validating every entry.
/// `required` lists tasks that must have at least one template and one hint.
inline TemplatePool pool_from_json(const nlohmann::json& doc,
                                   const std::vector<TaskKind>& required = {kAllTasks.begin(), kAllTasks.end()}) {
  TemplatePool pool;
  std::set<std::string> template_ids, hint_ids;
  try {
    if (!doc.is_object() || !doc.contains("templates") || !doc.contains("hints"))
      throw PoolFormatError("pool must be an object with \"templates\" and \"hints\"");
    for (const auto& [task_key, entries] : doc.at("templates").items()) {
      auto task = parse_task_name(task_key);
      if (!task) throw PoolFormatError("unknown task \"" + task_key + "\"");
      for (const auto& e : entries) {
        Template t{e.at("id").get<std::string>(), *task, e.at("body").get<std::string>()};
        if (auto why = check_template(*task, t.body); !why.empty())
          throw PoolFormatError("template " + t.id + ": " + why);
        if (!template_ids.insert(t.id).second) throw DuplicateId("duplicate template id \"" + t.id + "\"");
        pool.templates[*task].push_back(std::move(t));
      }
    }
    for (const auto& [task_key, entries] : doc.at("hints").items()) {
      auto task = parse_task_name(task_key);
      if (!task) throw PoolFormatError("unknown task \"" + task_key + "\"");
      for (const auto& e : entries) {
        FormatHint h{e.at("id").get<std::string>(), e.at("body").get<std::string>()};
        if (auto why = check_hint(*task, h.body); !why.empty()) throw PoolFormatError("hint " + h.id + ": " + why);
        if (!hint_ids.insert(h.id).second) throw DuplicateId("duplicate hint id \"" + h.id + "\"");
        pool.hints[*task].push_back(std::move(h));
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw PoolFormatError(std::string("malformed pool: ") + e.what());
  }
  for (auto t : required) {
    if (pool.template_count(t) == 0)
      throw MissingMandatoryDefault("pool has no template for " + std::string(task_name(t)));
    if (pool.hint_count(t) == 0) throw MissingMandatoryDefault("pool has no format hint for " + std::string(task_name(t)));
  }
  return pool;
}

inline TemplatePool load_pool(const std::filesystem::path& path,
                              const std::vector<TaskKind>& required = {kAllTasks.begin(), kAllTasks.end()}) {
  std::ifstream in(path);
  if (!in) throw PoolFormatError("cannot open pool file " + path.string());
  nlohmann::json doc = nlohmann::json::parse(in, nullptr, false);
  if (doc.is_discarded()) throw PoolFormatError("pool file is not valid JSON: " + path.string());
  return pool_from_json(doc, required);
}

inline const TemplatePool& default_pool() {
  static const TemplatePool pool = pool_from_json(nlohmann::json::parse(kDefaultPoolJson));
  return pool;
}

/// Built-in template used when a pool has none for `task`.
inline const Template& mandatory_template(TaskKind task) { return default_pool().templates.at(task).front(); }

inline const FormatHint& mandatory_hint(TaskKind task) { return default_pool().hints.at(task).front(); }

inline nlohmann::json pool_to_json(const TemplatePool& pool) {
  nlohmann::json doc{{"templates", nlohmann::json::object()}, {"hints", nlohmann::json::object()}};
  for (const auto& [task, list] : pool.templates)
    for (const auto& t : list) doc["templates"][std::string(task_name(task))].push_back({{"id", t.id}, {"body", t.body}});
  for (const auto& [task, list] : pool.hints)
    for (const auto& h : list) doc["hints"][std::string(task_name(task))].push_back({{"id", h.id}, {"body", h.body}});
  return doc;
}

using PlaceholderValues = std::map<std::string, std::string, std::less<>>;

struct RequestChoice {
  std::size_t template_index = 0;
  std::size_t hint_index = 0;
};

/// The (template, hint) pair build_request picks for `seed`.
inline RequestChoice choose(const TemplatePool& pool, TaskKind task, std::uint64_t seed) {
  Rng rng(seed);
  const std::size_t nt = std::max<std::size_t>(pool.template_count(task), 1);
  const std::size_t nh = std::max<std::size_t>(pool.hint_count(task), 1);
  RequestChoice c;
  c.template_index = rng.uniform_index(nt);
  c.hint_index = rng.uniform_index(nh);
  return c;
}

/// Picks one template and one hint uniformly at random and fills in the
/// placeholders. The hint replaces {format_hint} when the template uses it and
/// is otherwise appended after a single newline. Substituted text is never
/// rescanned for markers.
inline std::string build_request(const TemplatePool& pool, TaskKind task, const PlaceholderValues& input,
                                 std::uint64_t seed) {
  const RequestChoice choice = choose(pool, task, seed);
  const Template& tpl =
      pool.template_count(task) ? pool.templates.at(task)[choice.template_index] : mandatory_template(task);
  const FormatHint& hint = pool.hint_count(task) ? pool.hints.at(task)[choice.hint_index] : mandatory_hint(task);

  std::string out;
  bool hint_inline = false;
  const std::string_view body = tpl.body;
  std::size_t i = 0;
  while (i < body.size()) {
    if (body[i] == '{') {
      std::size_t j = i + 1;
      while (j < body.size() && ((body[j] >= 'a' && body[j] <= 'z') || body[j] == '_')) ++j;
      if (j > i + 1 && j < body.size() && body[j] == '}') {
        const std::string_view name = body.substr(i + 1, j - i - 1);
        if (name == "format_hint") {
          out += hint.body;
          hint_inline = true;
        } else if (auto it = input.find(name); it != input.end()) {
          out += it->second;
        } else {
          throw MissingPlaceholder("no value for {" + std::string(name) + "} in template " + tpl.id);
        }
        i = j + 1;
        continue;
      }
    }
    out.push_back(body[i++]);
  }
  if (!hint_inline) {
    out.push_back('\n');
    out += hint.body;
  }
  return out;
}

/// Runs an external template generator. Seed templates are written to its
/// standard input as JSON lines {"task", "id", "body"}; each JSON line it
/// prints as {"task", "body"} becomes a candidate. Candidates that fail
/// placeholder validation are dropped. Returns the number accepted.
inline std::size_t expand_pool(TemplatePool& pool, const std::string& command) {
  namespace fs = std::filesystem;
  const fs::path seeds = fs::temp_directory_path() / ("mmtab-seeds-" + std::to_string(::getpid()) + "-" +
                                                        std::to_string(reinterpret_cast<std::uintptr_t>(&pool)) + ".jsonl");
  {
    std::ofstream f(seeds);
    for (const auto& [task, list] : pool.templates)
      for (const auto& t : list)
        f << nlohmann::json{{"task", task_name(task)}, {"id", t.id}, {"body", t.body}}.dump() << '\n';
  }
  const std::string cmd = command + " < '" + seeds.string() + "'";
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (!pipe) throw ConfigError("cannot run template generator: " + command);
  std::string output;
  char buf[4096];
  while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe)) output.append(buf, n);
  const int rc = ::pclose(pipe);
  std::error_code ec;
  fs::remove(seeds, ec);
  if (rc != 0) throw ConfigError("template generator failed: " + command);

  std::set<std::string> ids;
  for (const auto& [task, list] : pool.templates)
    for (const auto& t : list) ids.insert(t.id);
  std::size_t accepted = 0;
  std::istringstream lines(output);
  std::string line;
  while (std::getline(lines, line)) {
    auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("task") || !j.contains("body")) continue;
    if (!j["task"].is_string() || !j["body"].is_string()) continue;
    auto task = parse_task_name(j["task"].get<std::string>());
    const std::string body = j["body"].get<std::string>();
    if (!task || !check_template(*task, body).empty()) continue;
    bool duplicate = false;
    for (const auto& t : pool.templates[*task]) duplicate = duplicate || t.body == body;
    if (duplicate) continue;
    std::string id;
    for (std::size_t n = pool.templates[*task].size();; ++n) {
      id = std::string(task_name(*task)) + "-gen-" + std::to_string(n);
      if (ids.insert(id).second) break;
    }
    pool.templates[*task].push_back(Template{id, *task, body});
    ++accepted;
  }
  return accepted;
}

}  // namespace mmtab::instruct
