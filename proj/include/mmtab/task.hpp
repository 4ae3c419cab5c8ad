#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mmtab {

enum class TaskKind { TSD, TCE, TCL, MCD, RCE, TR, QAWrap };

inline constexpr std::array<TaskKind, 7> kAllTasks = {TaskKind::TSD, TaskKind::TCE, TaskKind::TCL, TaskKind::MCD,
                                                      TaskKind::RCE, TaskKind::TR,  TaskKind::QAWrap};

/// The six structure-understanding tasks synthesized from tables.
inline constexpr std::array<TaskKind, 6> kStructureTasks = {TaskKind::TSD, TaskKind::TCE, TaskKind::TCL,
                                                            TaskKind::MCD, TaskKind::RCE, TaskKind::TR};

inline std::string_view task_name(TaskKind t) {
  switch (t) {
    case TaskKind::TSD: return "TSD";
    case TaskKind::TCE: return "TCE";
    case TaskKind::TCL: return "TCL";
    case TaskKind::MCD: return "MCD";
    case TaskKind::RCE: return "RCE";
    case TaskKind::TR: return "TR";
    case TaskKind::QAWrap: return "QAWrap";
  }
  return "TSD";
}

inline std::optional<TaskKind> parse_task_name(std::string_view name) {
  for (auto t : kAllTasks)
    if (task_name(t) == name) return t;
  return std::nullopt;
}

/// Placeholders a template of this task may reference.
inline std::vector<std::string_view> allowed_placeholders(TaskKind t) {
  switch (t) {
    case TaskKind::TCE:
    case TaskKind::TCL:
    case TaskKind::RCE: return {"cells", "format_hint"};
    case TaskKind::TR: return {"format_name", "format_hint"};
    case TaskKind::QAWrap: return {"question", "format_hint"};
    default: return {"format_hint"};
  }
}

/// The placeholder carrying the task input, which every template must use.
inline std::optional<std::string_view> input_placeholder(TaskKind t) {
  switch (t) {
    case TaskKind::TCE:
    case TaskKind::TCL:
    case TaskKind::RCE: return "cells";
    case TaskKind::TR: return "format_name";
    case TaskKind::QAWrap: return "question";
    default: return std::nullopt;
  }
}

/// JSON keys of the task's answer envelope; every format hint names them all.
inline std::vector<std::string_view> answer_schema_keys(TaskKind t) {
  switch (t) {
    case TaskKind::TSD: return {"row_number", "column_number"};
    case TaskKind::TCE:
    case TaskKind::TCL: return {"answer", "position", "value"};
    case TaskKind::MCD: return {"has_merged", "regions"};
    case TaskKind::RCE: return {"rows", "columns"};
    case TaskKind::TR:
    case TaskKind::QAWrap: return {"answer"};
  }
  return {};
}

}  // namespace mmtab
