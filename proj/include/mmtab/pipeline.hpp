#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "mmtab/digest.hpp"
#include "mmtab/error.hpp"
#include "mmtab/evaluate.hpp"
#include "mmtab/format_io.hpp"
#include "mmtab/instruct.hpp"
#include "mmtab/parallel.hpp"
#include "mmtab/raster.hpp"
#include "mmtab/render.hpp"
#include "mmtab/rng.hpp"
#include "mmtab/sample.hpp"
#include "mmtab/table.hpp"
#include "mmtab/tasksynth.hpp"
#include "mmtab/version.hpp"

namespace mmtab::pipeline {

namespace fs = std::filesystem;

struct CorpusEntry {
  std::string path;  // as written in the config
  std::optional<SourceKind> format;
};

struct RasterConfig {
  std::string command;
  int dpi = 144;
  bool concurrent = false;
};

struct PipelineConfig {
  fs::path base_dir = ".";  // relative paths resolve against this
  std::vector<CorpusEntry> corpus;
  std::vector<std::string> qa;
  StyleMix style_mix = StyleMix::standard();
  std::optional<std::string> style_config;
  synth::SynthConfig synth;
  std::optional<std::string> template_pool;
  std::optional<std::string> template_generator;
  std::string output_dir = "out";
  std::optional<RasterConfig> rasterizer;
  std::uint64_t master_seed = 0;

  fs::path resolve(const std::string& p) const {
    const fs::path path(p);
    return path.is_absolute() ? path : base_dir / path;
  }
};

// ---------------------------------------------------------------------------
// Config

inline std::optional<SourceKind> parse_source_kind(std::string_view name) {
  if (name == "json") return SourceKind::Json;
  if (auto f = parse_format_name(name)) {
    switch (*f) {
      case TableFormat::Html: return SourceKind::Html;
      case TableFormat::Markdown: return SourceKind::Markdown;
      case TableFormat::Latex: return SourceKind::Latex;
    }
  }
  return std::nullopt;
}

inline std::string_view source_kind_name(SourceKind k) {
  switch (k) {
    case SourceKind::Html: return "html";
    case SourceKind::Markdown: return "markdown";
    case SourceKind::Latex: return "latex";
    case SourceKind::Json: return "json";
  }
  return "html";
}

inline std::uint64_t parse_seed(const nlohmann::json& j) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer() && j.get<long long>() >= 0) return static_cast<std::uint64_t>(j.get<long long>());
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    std::size_t used = 0;
    try {
      const auto v = std::stoull(s, &used, 0);
      if (used == s.size() && !s.empty() && s[0] != '-') return v;
    } catch (const std::exception&) {
    }
  }
  throw ConfigError("master_seed must be a non-negative 64-bit integer");
}

inline std::map<TaskKind, synth::SplitCounts> parse_counts(const nlohmann::json& j) {
  std::map<TaskKind, synth::SplitCounts> out;
  for (const auto& [key, v] : j.items()) {
    auto task = parse_task_name(key);
    if (!task || *task == TaskKind::QAWrap) throw ConfigError("synth.counts: unknown structure task \"" + key + "\"");
    synth::SplitCounts c;
    if (v.is_array() && v.size() == 2) {
      c.train = v[0].get<std::size_t>();
      c.eval = v[1].get<std::size_t>();
    } else if (v.is_object()) {
      c.train = v.value("train", std::size_t{0});
      c.eval = v.value("eval", std::size_t{0});
    } else {
      throw ConfigError("synth.counts." + key + " must be [train, eval] or {\"train\", \"eval\"}");
    }
    out[*task] = c;
  }
  return out;
}

/// Reads a pipeline config. Relative paths inside it resolve against
/// `base_dir` (normally the config file's directory).
inline PipelineConfig config_from_json(const nlohmann::json& j, const fs::path& base_dir) {
  PipelineConfig c;
  c.base_dir = base_dir;
  try {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    for (const auto& e : j.at("corpus")) {
      CorpusEntry entry;
      if (e.is_string()) {
        entry.path = e.get<std::string>();
      } else {
        entry.path = e.at("path").get<std::string>();
        if (e.contains("format") && !e["format"].is_null()) {
          entry.format = parse_source_kind(e["format"].get<std::string>());
          if (!entry.format) throw ConfigError("unknown corpus format \"" + e["format"].get<std::string>() + "\"");
        }
      }
      c.corpus.push_back(std::move(entry));
    }
    if (j.contains("qa")) c.qa = j["qa"].get<std::vector<std::string>>();
    if (j.contains("style_mix")) {
      c.style_mix.weights.clear();
      for (const auto& [k, w] : j["style_mix"].items()) {
        auto fam = parse_family_name(k);
        if (!fam) throw ConfigError("unknown style family \"" + k + "\"");
        c.style_mix.weights[*fam] = w.get<double>();
      }
    }
    c.style_mix.check();
    if (j.contains("style_config") && !j["style_config"].is_null()) c.style_config = j["style_config"].get<std::string>();
    if (j.contains("synth")) {
      const auto& s = j["synth"];
      if (s.contains("counts")) c.synth.counts = parse_counts(s["counts"]);
      c.synth.tce_cells_per_sample = s.value("tce_cells_per_sample", c.synth.tce_cells_per_sample);
      c.synth.tcl_cells_per_sample = s.value("tcl_cells_per_sample", c.synth.tcl_cells_per_sample);
      c.synth.rce_max_lines = s.value("rce_max_lines", c.synth.rce_max_lines);
      c.synth.multiturn_fraction = s.value("multiturn_fraction", c.synth.multiturn_fraction);
      c.synth.max_uses_per_table = s.value("max_uses_per_table", c.synth.max_uses_per_table);
      if (s.contains("tr_format_weights")) {
        c.synth.tr_format_weights.clear();
        for (const auto& [k, w] : s["tr_format_weights"].items()) {
          auto f = parse_format_name(k);
          if (!f) throw ConfigError("unknown format \"" + k + "\" in tr_format_weights");
          c.synth.tr_format_weights[*f] = w.get<double>();
        }
      }
    }
    if (j.contains("template_pool") && !j["template_pool"].is_null())
      c.template_pool = j["template_pool"].get<std::string>();
    if (j.contains("template_generator") && !j["template_generator"].is_null())
      c.template_generator = j["template_generator"].get<std::string>();
    c.output_dir = j.value("output_dir", c.output_dir);
    if (j.contains("rasterizer") && !j["rasterizer"].is_null()) {
      const auto& r = j["rasterizer"];
      RasterConfig rc;
      rc.command = r.at("command").get<std::string>();
      rc.dpi = r.value("dpi", rc.dpi);
      rc.concurrent = r.value("concurrent", rc.concurrent);
      if (rc.dpi <= 0) throw ConfigError("rasterizer.dpi must be positive");
      c.rasterizer = rc;
    }
    if (j.contains("master_seed")) c.master_seed = parse_seed(j["master_seed"]);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  c.synth.master_seed = c.master_seed;
  c.synth.check();
  return c;
}

inline PipelineConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  auto j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) throw ConfigError("config is not valid JSON: " + path.string());
  return config_from_json(j, path.parent_path().empty() ? fs::path(".") : path.parent_path());
}

/// Normalized config as recorded in the manifest. Leaves out the output
/// directory and worker count, which do not affect the emitted bytes.
inline nlohmann::json config_echo(const PipelineConfig& c) {
  nlohmann::json j;
  j["corpus"] = nlohmann::json::array();
  for (const auto& e : c.corpus)
    j["corpus"].push_back({{"path", e.path},
                           {"format", e.format ? nlohmann::json(source_kind_name(*e.format)) : nlohmann::json(nullptr)}});
  j["qa"] = c.qa;
  for (const auto& [f, w] : c.style_mix.weights) j["style_mix"][std::string(family_name(f))] = w;
  j["style_config"] = c.style_config ? nlohmann::json(*c.style_config) : nlohmann::json(nullptr);
  auto& s = j["synth"];
  for (const auto& [t, n] : c.synth.counts) s["counts"][std::string(task_name(t))] = {{"train", n.train}, {"eval", n.eval}};
  s["tce_cells_per_sample"] = c.synth.tce_cells_per_sample;
  s["tcl_cells_per_sample"] = c.synth.tcl_cells_per_sample;
  s["rce_max_lines"] = c.synth.rce_max_lines;
  s["multiturn_fraction"] = c.synth.multiturn_fraction;
  s["max_uses_per_table"] = c.synth.max_uses_per_table;
  for (const auto& [f, w] : c.synth.tr_format_weights) s["tr_format_weights"][std::string(format_name(f))] = w;
  j["template_pool"] = c.template_pool ? nlohmann::json(*c.template_pool) : nlohmann::json(nullptr);
  j["template_generator"] = c.template_generator ? nlohmann::json(*c.template_generator) : nlohmann::json(nullptr);
  if (c.rasterizer)
    j["rasterizer"] = {{"command", c.rasterizer->command}, {"dpi", c.rasterizer->dpi}, {"concurrent", c.rasterizer->concurrent}};
  else
    j["rasterizer"] = nullptr;
  j["master_seed"] = std::to_string(c.master_seed);
  return j;
}

// ---------------------------------------------------------------------------
// Ingest

struct IngestedTable {
  std::string table_id;
  Table table;
  std::string source;  // path as reported in the manifest
};

struct IngestFailure {
  std::string source;
  std::string reason;
};

struct IngestResult {
  std::vector<IngestedTable> tables;
  std::vector<IngestFailure> failures;
  std::size_t files = 0;
};

/// File-name-safe id: characters outside [A-Za-z0-9._-] become '_'.
inline std::string sanitize_id(std::string_view s) {
  std::string out;
  for (char c : s) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '.' ||
                    c == '_' || c == '-';
    out.push_back(ok ? c : '_');
  }
  if (out.empty() || out.front() == '.') out.insert(out.begin(), '_');
  return out;
}

inline std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileFormatError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const fs::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw ConfigError("write failed: " + path.string());
}

/// Tables in one file. JSON files hold one table object or an array of them;
/// the other formats hold one table each (strict parse).
inline std::vector<Table> read_tables(const fs::path& path, SourceKind kind) {
  const std::string src = read_file(path);
  if (kind == SourceKind::Json) {
    auto j = nlohmann::json::parse(src, nullptr, false);
    if (j.is_discarded()) throw FileFormatError("not valid JSON");
    std::vector<Table> out;
    if (j.is_array()) {
      for (const auto& e : j) out.push_back(table_from_json(e));
    } else {
      out.push_back(table_from_json(j));
    }
    return out;
  }
  Table t = parse(src, to_format(kind)).table;
  require_valid(t);
  return {canonical(std::move(t))};
}

/// Reads one table, detecting the format from the extension unless given.
inline Table read_table(const fs::path& path, std::optional<SourceKind> kind = std::nullopt) {
  if (!kind) kind = detect_source_kind(path);
  if (!kind) throw ConfigError("cannot tell the format of " + path.string() + "; pass --format");
  auto tables = read_tables(path, *kind);
  if (tables.size() != 1) throw FileFormatError(path.string() + " holds " + std::to_string(tables.size()) + " tables");
  return std::move(tables.front());
}

/// Loads every table under the corpus entries, in sorted path order.
/// Unreadable or invalid files are recorded and skipped.
inline IngestResult ingest(const PipelineConfig& config, std::optional<SourceKind> override_kind = std::nullopt) {
  IngestResult result;
  std::set<std::string> ids;
  for (const auto& entry : config.corpus) {
    const fs::path root = config.resolve(entry.path);
    const auto kind_override = override_kind ? override_kind : entry.format;
    std::vector<std::pair<std::string, fs::path>> files;  // (reported name, path)
    if (fs::is_directory(root)) {
      for (const auto& de : fs::recursive_directory_iterator(root)) {
        if (!de.is_regular_file()) continue;
        if (!kind_override && !detect_source_kind(de.path())) continue;
        files.emplace_back((fs::path(entry.path) / fs::relative(de.path(), root)).generic_string(), de.path());
      }
      std::sort(files.begin(), files.end());
    } else if (fs::exists(root)) {
      files.emplace_back(fs::path(entry.path).generic_string(), root);
    } else {
      throw ConfigError("corpus path does not exist: " + root.string());
    }
    for (const auto& [name, path] : files) {
      ++result.files;
      try {
        const auto kind = kind_override ? kind_override : detect_source_kind(path);
        if (!kind) throw FileFormatError("unknown file type");
        auto tables = read_tables(path, *kind);
        for (std::size_t i = 0; i < tables.size(); ++i) {
          std::string id = !tables[i].source_id.empty() ? tables[i].source_id
                           : tables.size() == 1        ? path.stem().string()
                                                       : path.stem().string() + "-" + std::to_string(i + 1);
          id = sanitize_id(id);
          if (!ids.insert(id).second) {
            result.failures.push_back({name, "duplicate table id \"" + id + "\""});
            continue;
          }
          tables[i].source_id = id;
          result.tables.push_back({id, std::move(tables[i]), name});
        }
      } catch (const Error& e) {
        result.failures.push_back({name, e.what()});
      }
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Synthesis run

struct RunOptions {
  unsigned workers = 1;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> output_dir;
  std::optional<SourceKind> format;
  std::ostream* log = &std::cerr;
};

inline constexpr std::string_view kManifestName = "manifest.json";

namespace detail {

inline std::string padded(std::size_t n) {
  std::string s = std::to_string(n);
  return s.size() < 6 ? std::string(6 - s.size(), '0') + s : s;
}

inline bool eligible(TaskKind task, const Table& t, const synth::SynthConfig& cfg) {
  switch (task) {
    case TaskKind::TCE:
      return static_cast<long long>(t.n_rows) * t.n_cols >= cfg.tce_cells_per_sample;
    case TaskKind::TCL:
      return synth::unique_content_anchors(t).size() >= static_cast<std::size_t>(cfg.tcl_cells_per_sample);
    default: return true;
  }
}

inline std::string jsonl_line(const Sample& s) {
  return nlohmann::json(s).dump(-1, ' ', false, nlohmann::json::error_handler_t::replace) + "\n";
}

/// Clears a previous run's files so stale outputs cannot survive. Refuses to
/// touch a non-empty directory that is not a previous output.
inline void prepare_output_dir(const fs::path& dir) {
  if (fs::exists(dir)) {
    if (!fs::is_directory(dir)) throw ConfigError("output path is not a directory: " + dir.string());
    const fs::path manifest = dir / kManifestName;
    if (fs::exists(manifest)) {
      auto j = nlohmann::json::parse(read_file(manifest), nullptr, false);
      if (!j.is_discarded() && j.contains("files"))
        for (const auto& [rel, _] : j["files"].items()) fs::remove(dir / rel);
      fs::remove(manifest);
    }
    if (fs::exists(dir / "images") && fs::is_empty(dir / "images")) fs::remove(dir / "images");
    if (!fs::is_empty(dir)) throw ConfigError("output directory is not empty: " + dir.string());
  }
  fs::create_directories(dir / "images");
}

inline nlohmann::json mix_json(const std::map<std::string, std::size_t>& counts) {
  std::size_t total = 0;
  for (const auto& [k, n] : counts) total += n;
  nlohmann::json achieved = nlohmann::json::object();
  for (const auto& [k, n] : counts) achieved[k] = total ? static_cast<double>(n) / static_cast<double>(total) : 0.0;
  return {{"counts", counts}, {"achieved", achieved}};
}

}  // namespace detail

/// Runs ingest, render, synthesis and request building, and writes
/// train.jsonl, eval.jsonl, images/ and manifest.json. Output bytes depend
/// only on the corpus, the config and the seed.
inline nlohmann::json cmd_synth(PipelineConfig config, const RunOptions& opt = {}) {
  if (opt.seed) config.master_seed = *opt.seed;
  if (opt.output_dir) config.output_dir = *opt.output_dir;
  config.synth.master_seed = config.master_seed;
  config.synth.check();
  config.style_mix.check();
  std::ostream& log = *opt.log;

  // referenced paths must exist before any work starts
  for (const auto& e : config.corpus)
    if (!fs::exists(config.resolve(e.path))) throw ConfigError("corpus path does not exist: " + e.path);
  for (const auto& q : config.qa)
    if (!fs::exists(config.resolve(q))) throw ConfigError("QA file does not exist: " + q);

  const StyleRanges ranges = [&] {
    if (!config.style_config) return default_style_ranges();
    auto j = nlohmann::json::parse(read_file(config.resolve(*config.style_config)), nullptr, false);
    if (j.is_discarded()) throw ConfigError("style config is not valid JSON");
    return style_ranges_from_json(j);
  }();
  instruct::TemplatePool pool =
      config.template_pool ? instruct::load_pool(config.resolve(*config.template_pool)) : instruct::default_pool();
  std::size_t generated_templates = 0;
  if (config.template_generator) generated_templates = instruct::expand_pool(pool, *config.template_generator);

  const fs::path out_dir = config.output_dir.empty() ? fs::path(".") : fs::path(config.output_dir);
  detail::prepare_output_dir(out_dir);

  // ingest
  IngestResult corpus = ingest(config, opt.format);
  for (const auto& f : corpus.failures) log << "skipped " << f.source << ": " << f.reason << '\n';

  // render every table
  std::unique_ptr<CommandRasterizer> raster;
  if (config.rasterizer) raster = std::make_unique<CommandRasterizer>(config.rasterizer->command, config.rasterizer->concurrent);
  struct Rendered {
    std::string image_ref;
    StyleFamily family = StyleFamily::WebPage;
    std::string error;
  };
  std::vector<Rendered> rendered(corpus.tables.size());
  parallel_for(corpus.tables.size(), opt.workers, [&](std::size_t i) {
    const auto& t = corpus.tables[i];
    try {
      const StyleSpec style = sample_style(config.style_mix, derive_seed(config.master_seed, t.table_id, "style"), ranges);
      const std::string svg = render_svg(t.table, style);
      write_file(out_dir / "images" / (t.table_id + ".svg"), svg);
      rendered[i].family = style.family;
      rendered[i].image_ref = "images/" + t.table_id + ".svg";
      if (raster) {
        write_file(out_dir / "images" / (t.table_id + ".png"), rasterize(svg, config.rasterizer->dpi, raster.get()));
        rendered[i].image_ref = "images/" + t.table_id + ".png";
      }
    } catch (const RasterizerError& e) {
      rendered[i].error = e.what();
    }
  });
  std::vector<std::size_t> usable;
  for (std::size_t i = 0; i < corpus.tables.size(); ++i) {
    if (rendered[i].error.empty()) {
      usable.push_back(i);
    } else {
      log << "skipped " << corpus.tables[i].source << ": " << rendered[i].error << '\n';
      corpus.failures.push_back({corpus.tables[i].source, rendered[i].error});
    }
  }

  // assign tables to (task, split) slots
  struct Job {
    TaskKind task;
    std::size_t table;  // index into corpus.tables
    std::size_t use;
    std::string split;
    std::string sample_id;
    const nlohmann::json* qa = nullptr;
  };
  std::vector<Job> jobs;
  nlohmann::json shortfall = nlohmann::json::object();
  for (auto task : kStructureTasks) {
    auto it = config.synth.counts.find(task);
    if (it == config.synth.counts.end()) continue;
    const synth::SplitCounts want = it->second;
    std::vector<std::pair<std::size_t, std::size_t>> slots;
    for (std::size_t i : usable)
      if (detail::eligible(task, corpus.tables[i].table, config.synth))
        for (int u = 0; u < config.synth.max_uses_per_table; ++u) slots.emplace_back(i, static_cast<std::size_t>(u));
    Rng rng(derive_seed(config.master_seed, "assign", task_name(task)));
    rng.shuffle(slots);
    const std::size_t train = std::min(want.train, slots.size());
    const std::size_t eval = std::min(want.eval, slots.size() - train);
    for (std::size_t k = 0; k < train + eval; ++k) {
      const bool is_train = k < train;
      const std::size_t index = is_train ? k + 1 : k - train + 1;
      const std::string split = is_train ? "train" : "eval";
      jobs.push_back({task, slots[k].first, slots[k].second, split,
                      std::string(task_name(task)) + "-" + split + "-" + detail::padded(index)});
    }
    if (train < want.train || eval < want.eval) {
      shortfall[std::string(task_name(task))] = {{"train", want.train - train}, {"eval", want.eval - eval}};
      log << task_name(task) << ": only " << slots.size() << " eligible table slots for " << want.train + want.eval
          << " requested samples\n";
    }
  }

  // externally supplied QA pairs
  std::map<std::string, std::size_t> table_index;
  for (std::size_t i : usable) table_index[corpus.tables[i].table_id] = i;
  std::vector<nlohmann::json> qa_rows;
  std::size_t qa_skipped = 0;
  for (const auto& q : config.qa) {
    std::ifstream in(config.resolve(q));
    std::string line;
    for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
      if (text::trim(line).empty()) continue;
      auto j = nlohmann::json::parse(line, nullptr, false);
      if (j.is_discarded() || !j.is_object() || !j.contains("table_id") || !j.contains("input") ||
          !j.contains("output")) {
        throw ConfigError(q + ":" + std::to_string(lineno) + ": QA lines need table_id, input and output");
      }
      if (!table_index.count(j["table_id"].get<std::string>())) {
        ++qa_skipped;
        continue;
      }
      qa_rows.push_back(std::move(j));
    }
  }
  std::map<std::string, std::size_t> qa_seen;
  for (std::size_t k = 0; k < qa_rows.size(); ++k) {
    const auto& j = qa_rows[k];
    const std::string split = j.value("split", std::string("train")) == "eval" ? "eval" : "train";
    jobs.push_back({TaskKind::QAWrap, table_index.at(j["table_id"].get<std::string>()), k, split,
                    "QAWrap-" + split + "-" + detail::padded(++qa_seen[split]), &j});
  }

  // synthesize
  std::vector<Sample> samples(jobs.size());
  parallel_for(jobs.size(), opt.workers, [&](std::size_t k) {
    const Job& job = jobs[k];
    const IngestedTable& t = corpus.tables[job.table];
    synth::SynthContext ctx;
    ctx.pool = &pool;
    ctx.master_seed = config.master_seed;
    ctx.table_id = t.table_id;
    ctx.sample_index = job.use;
    ctx.sample_id = job.sample_id;
    ctx.image_ref = rendered[job.table].image_ref;
    ctx.split = job.split;
    Sample s;
    switch (job.task) {
      case TaskKind::TSD: s = synth::synth_tsd(t.table, ctx); break;
      case TaskKind::TCE: s = synth::synth_tce(t.table, config.synth.tce_cells_per_sample, ctx); break;
      case TaskKind::TCL: s = synth::synth_tcl(t.table, config.synth.tcl_cells_per_sample, ctx); break;
      case TaskKind::MCD: s = synth::synth_mcd(t.table, ctx); break;
      case TaskKind::RCE: s = synth::synth_rce(t.table, ctx, config.synth.rce_max_lines); break;
      case TaskKind::TR: s = synth::synth_tr(t.table, config.synth.tr_format_weights, ctx); break;
      case TaskKind::QAWrap: {
        const auto& j = *job.qa;
        auto text_of = [](const nlohmann::json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); };
        s = synth::wrap_qa(t.table, text_of(j["input"]), text_of(j["output"]), ctx,
                           j.value("metric", std::string("accuracy")));
        break;
      }
    }
    s.meta["style"] = family_name(rendered[job.table].family);
    samples[k] = std::move(s);
  });

  // multi-turn composition over the training split
  std::vector<Sample> train, eval;
  for (auto& s : samples) (s.split == "train" ? train : eval).push_back(std::move(s));
  auto composed = synth::compose_multiturn(train, config.synth.multiturn_fraction, config.master_seed);
  std::vector<Sample> train_out = std::move(composed.single_turn);
  for (auto& c : composed.conversations) train_out.push_back(std::move(c));

  // write
  std::string train_bytes, eval_bytes;
  for (const auto& s : train_out) train_bytes += detail::jsonl_line(s);
  for (const auto& s : eval) eval_bytes += detail::jsonl_line(s);
  write_file(out_dir / "train.jsonl", train_bytes);
  write_file(out_dir / "eval.jsonl", eval_bytes);

  // manifest
  nlohmann::json m;
  m["version"] = std::string(kVersion);
  m["config"] = config_echo(config);
  nlohmann::json counts = nlohmann::json::object();
  std::map<std::string, std::size_t> tr_formats;
  std::size_t turns_in_conversations = 0;
  auto count_turn = [&](TaskKind task, const std::string& split, const nlohmann::json& meta) {
    auto& slot = counts[std::string(task_name(task))][split];
    slot = slot.is_null() ? 1 : slot.get<std::size_t>() + 1;
    if (task == TaskKind::TR && meta.contains("format")) ++tr_formats[meta["format"].get<std::string>()];
  };
  for (auto task : kAllTasks)
    if (config.synth.counts.count(task) || (task == TaskKind::QAWrap && !qa_rows.empty()))
      counts[std::string(task_name(task))] = {{"train", 0}, {"eval", 0}};
  for (const auto* part : {&train_out, &eval})
    for (const auto& s : *part) {
      if (!s.is_conversation()) {
        count_turn(s.task, s.split, s.meta);
        continue;
      }
      for (const auto& t : s.turns) count_turn(t.task, s.split, t.meta);
      turns_in_conversations += s.turns.size();
    }
  m["counts"] = counts;
  m["shortfall"] = shortfall;
  m["records"] = {{"train.jsonl", train_out.size()}, {"eval.jsonl", eval.size()}};
  m["conversations"] = {{"count", composed.conversations.size()}, {"turns", turns_in_conversations}};
  nlohmann::json failures = nlohmann::json::array();
  for (const auto& f : corpus.failures) failures.push_back({{"source", f.source}, {"reason", f.reason}});
  m["ingest"] = {{"files", corpus.files},
                 {"tables", usable.size()},
                 {"skipped", corpus.failures.size()},
                 {"failures", failures}};
  m["qa"] = {{"wrapped", qa_rows.size()}, {"skipped", qa_skipped}};
  m["templates"] = {{"generated", generated_templates}};
  std::map<std::string, std::size_t> styles;
  for (std::size_t i : usable) ++styles[std::string(family_name(rendered[i].family))];
  m["style_mix"] = detail::mix_json(styles);
  for (const auto& [f, w] : config.style_mix.weights) m["style_mix"]["target"][std::string(family_name(f))] = w;
  m["tr_format_mix"] = detail::mix_json(tr_formats);
  for (const auto& [f, w] : config.synth.tr_format_weights)
    m["tr_format_mix"]["target"][std::string(format_name(f))] = w;
  nlohmann::json schemas;
  for (auto task : kAllTasks) schemas[std::string(task_name(task))] = answer_schema_keys(task);
  m["answer_schema_keys"] = schemas;

  std::vector<std::string> emitted{"train.jsonl", "eval.jsonl"};
  for (std::size_t i : usable) {
    emitted.push_back("images/" + corpus.tables[i].table_id + ".svg");
    if (raster) emitted.push_back("images/" + corpus.tables[i].table_id + ".png");
  }
  std::sort(emitted.begin(), emitted.end());
  std::vector<std::string> digests(emitted.size());
  parallel_for(emitted.size(), opt.workers, [&](std::size_t i) { digests[i] = sha256_file(out_dir / emitted[i]); });
  for (std::size_t i = 0; i < emitted.size(); ++i) m["files"][emitted[i]] = digests[i];
  write_file(out_dir / kManifestName, m.dump(2) + "\n");
  return m;
}

/// Problems found when checking a manifest's digests; empty means verified.
inline std::vector<std::string> verify_manifest(const fs::path& dir) {
  std::vector<std::string> problems;
  const fs::path path = dir / kManifestName;
  if (!fs::exists(path)) return {"missing " + path.string()};
  auto m = nlohmann::json::parse(read_file(path), nullptr, false);
  if (m.is_discarded() || !m.contains("files")) return {"manifest is not valid"};
  for (const auto& [rel, digest] : m["files"].items()) {
    const fs::path file = dir / rel;
    if (!fs::exists(file)) problems.push_back("missing " + rel);
    else if (sha256_file(file) != digest.get<std::string>()) problems.push_back("digest mismatch " + rel);
  }
  return problems;
}

// ---------------------------------------------------------------------------
// Stats

struct TaskStats {
  std::size_t train = 0;
  std::size_t eval = 0;
  std::size_t count = 0;
  double request_tokens = 0;   // sums; averages are taken on output
  double response_tokens = 0;
};

struct StatsReport {
  std::size_t records = 0;
  std::size_t conversations = 0;
  std::map<std::string, TaskStats> tasks;  // by task name
  TaskStats overall;
  std::map<std::string, std::size_t> styles;      // per distinct table
  std::map<std::string, std::size_t> tr_formats;  // per TR sample
  std::map<std::string, std::size_t> table_sizes; // "RxC", per distinct table
};

inline StatsReport compute_stats(const std::vector<Sample>& samples) {
  StatsReport r;
  std::set<std::string> tables;
  auto add = [&](TaskKind task, const std::string& split, const std::string& request, const std::string& response,
                 const nlohmann::json& meta, const std::string& table_id) {
    for (TaskStats* st : {&r.tasks[std::string(task_name(task))], &r.overall}) {
      ++st->count;
      (split == "eval" ? st->eval : st->train) += 1;
      st->request_tokens += static_cast<double>(text::split_whitespace(request).size());
      st->response_tokens += static_cast<double>(text::split_whitespace(response).size());
    }
    if (task == TaskKind::TR && meta.is_object() && meta.contains("format") && meta["format"].is_string())
      ++r.tr_formats[meta["format"].get<std::string>()];
    if (tables.insert(table_id).second && meta.is_object()) {
      if (meta.contains("style") && meta["style"].is_string()) ++r.styles[meta["style"].get<std::string>()];
      if (meta.contains("n_rows") && meta.contains("n_cols"))
        ++r.table_sizes[std::to_string(meta["n_rows"].get<int>()) + "x" + std::to_string(meta["n_cols"].get<int>())];
    }
  };
  for (const auto& s : samples) {
    ++r.records;
    if (!s.is_conversation()) {
      add(s.task, s.split, s.request, s.gold_response, s.meta, s.table_id);
      continue;
    }
    ++r.conversations;
    for (const auto& t : s.turns) add(t.task, s.split, t.request, t.gold_response, t.meta, s.table_id);
  }
  return r;
}

inline nlohmann::json stats_to_json(const StatsReport& r) {
  auto task_json = [](const TaskStats& t) {
    const double n = t.count ? static_cast<double>(t.count) : 1.0;
    return nlohmann::json{{"count", t.count},
                          {"train", t.train},
                          {"eval", t.eval},
                          {"avg_request_tokens", t.count ? t.request_tokens / n : 0.0},
                          {"avg_response_tokens", t.count ? t.response_tokens / n : 0.0}};
  };
  nlohmann::json j;
  j["records"] = r.records;
  j["conversations"] = r.conversations;
  j["overall"] = task_json(r.overall);
  j["tasks"] = nlohmann::json::object();
  for (const auto& [name, t] : r.tasks) j["tasks"][name] = task_json(t);
  j["style_mix"] = detail::mix_json(r.styles);
  j["tr_format_mix"] = detail::mix_json(r.tr_formats);
  j["table_sizes"] = r.table_sizes;
  return j;
}

inline std::string stats_text(const StatsReport& r) {
  std::ostringstream out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-8s %8s %8s %8s %10s %10s\n", "task", "train", "eval", "total", "avg_in", "avg_out");
  out << buf;
  auto row = [&](const std::string& name, const TaskStats& t) {
    const double n = t.count ? static_cast<double>(t.count) : 1.0;
    std::snprintf(buf, sizeof buf, "%-8s %8zu %8zu %8zu %10.2f %10.2f\n", name.c_str(), t.train, t.eval, t.count,
                  t.count ? t.request_tokens / n : 0.0, t.count ? t.response_tokens / n : 0.0);
    out << buf;
  };
  for (const auto& [name, t] : r.tasks) row(name, t);
  row("all", r.overall);
  out << "records=" << r.records << " conversations=" << r.conversations << '\n';
  auto mix = [&](const char* title, const std::map<std::string, std::size_t>& m) {
    std::size_t total = 0;
    for (const auto& [k, n] : m) total += n;
    out << title << ':';
    for (const auto& [k, n] : m) {
      std::snprintf(buf, sizeof buf, " %s=%zu (%.1f%%)", k.c_str(), n, total ? 100.0 * static_cast<double>(n) / static_cast<double>(total) : 0.0);
      out << buf;
    }
    out << '\n';
  };
  mix("style mix", r.styles);
  mix("TR format mix", r.tr_formats);
  mix("table sizes", r.table_sizes);
  return out.str();
}

}  // namespace mmtab::pipeline
