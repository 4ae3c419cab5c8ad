// mmtab: command-line front end for the table instruction-data toolkit.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "mmtab/mmtab.hpp"

namespace fs = std::filesystem;
using namespace mmtab;

namespace {

std::optional<SourceKind> source_kind_flag(const std::string& name) {
  if (name.empty()) return std::nullopt;
  auto k = pipeline::parse_source_kind(name);
  if (!k) throw ConfigError("unknown format \"" + name + "\"");
  return k;
}

void emit(const std::string& out_path, const std::string& bytes) {
  if (out_path.empty() || out_path == "-") {
    std::cout << bytes;
    if (!bytes.empty() && bytes.back() != '\n') std::cout << '\n';
  } else {
    pipeline::write_file(out_path, bytes);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mmtab: build and score multimodal table instruction data"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  const std::vector<std::string> formats{"html", "markdown", "md", "latex", "tex", "json"};

  // synth
  auto* synth = app.add_subcommand("synth", "ingest a corpus and write train/eval samples, images and a manifest");
  std::string config_path, seed_text, out_dir, format_name_flag;
  unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  synth->add_option("--config", config_path, "pipeline config (JSON)")->required()->check(CLI::ExistingFile);
  synth->add_option("--seed", seed_text, "master seed (overrides the config)");
  synth->add_option("--out", out_dir, "output directory (overrides the config)");
  synth->add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
  synth->add_option("--format", format_name_flag, "force the corpus input format")->check(CLI::IsMember(formats));

  // eval
  auto* eval = app.add_subcommand("eval", "score predictions against gold samples");
  std::string predictions_path, gold_path, report_path;
  eval->add_option("--predictions", predictions_path, "JSONL of {sample_id, response}")->required();
  eval->add_option("--gold", gold_path, "sample JSONL written by synth")->required();
  eval->add_option("--report", report_path, "where to write the JSON report");
  eval->add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);

  // stats
  auto* stats = app.add_subcommand("stats", "summarize sample files");
  std::vector<std::string> stats_files;
  std::string stats_json;
  stats->add_option("files", stats_files, "sample JSONL files")->required();
  stats->add_option("--json", stats_json, "also write the statistics as JSON");

  // render
  auto* render = app.add_subcommand("render", "render one table to SVG (or PNG with a rasterizer)");
  std::string render_input, render_out, family_flag, raster_cmd;
  int dpi = 144;
  render->add_option("input", render_input, "table file (.html, .md, .tex, .json)")->required()->check(CLI::ExistingFile);
  render->add_option("--format", format_name_flag, "input format")->check(CLI::IsMember(formats));
  render->add_option("--out", render_out, "output file (default: stdout)");
  render->add_option("--seed", seed_text, "style seed");
  render->add_option("--family", family_flag, "force a style family")
      ->check(CLI::IsMember({"WebPage", "Excel", "Markdown"}));
  render->add_option("--rasterizer", raster_cmd, "command template producing PNG from {input} into {output}");
  render->add_option("--dpi", dpi, "raster resolution")->check(CLI::PositiveNumber);

  // convert
  auto* convert_cmd = app.add_subcommand("convert", "convert a table between formats");
  std::string convert_input, convert_out, to_flag = "html";
  bool strict = false;
  convert_cmd->add_option("input", convert_input, "table file")->required()->check(CLI::ExistingFile);
  convert_cmd->add_option("--format", format_name_flag, "input format")->check(CLI::IsMember(formats));
  convert_cmd->add_option("--to", to_flag, "output format")->check(CLI::IsMember(formats));
  convert_cmd->add_option("--out", convert_out, "output file (default: stdout)");
  convert_cmd->add_flag("--strict", strict, "fail on malformed input instead of repairing it");

  // verify
  auto* verify = app.add_subcommand("verify", "check a synth output directory against its manifest");
  std::string verify_dir;
  verify->add_option("dir", verify_dir, "output directory")->required();

  // templates
  auto* templates = app.add_subcommand("templates", "print the built-in template pool as JSON");
  std::string templates_out;
  templates->add_option("--out", templates_out, "output file (default: stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    std::optional<std::uint64_t> seed;
    if (!seed_text.empty()) seed = pipeline::parse_seed(nlohmann::json(seed_text));

    if (*synth) {
      pipeline::RunOptions opt;
      opt.workers = workers;
      opt.seed = seed;
      if (!out_dir.empty()) opt.output_dir = out_dir;
      opt.format = source_kind_flag(format_name_flag);
      const auto config = pipeline::load_config(config_path);
      const auto manifest = pipeline::cmd_synth(config, opt);
      for (const auto& [task, c] : manifest["counts"].items())
        std::cout << task << ": train=" << c["train"] << " eval=" << c["eval"] << '\n';
      std::cout << "tables=" << manifest["ingest"]["tables"] << " skipped=" << manifest["ingest"]["skipped"]
                << " conversations=" << manifest["conversations"]["count"] << '\n';
      if (!manifest["shortfall"].empty()) std::cout << "shortfall: " << manifest["shortfall"].dump() << '\n';
      return 0;
    }
    if (*eval) {
      const auto report = eval::evaluate(eval::read_predictions(predictions_path), eval::read_samples(gold_path), workers);
      if (!report_path.empty()) pipeline::write_file(report_path, eval::report_to_json(report).dump(2) + "\n");
      std::cout << eval::summary_table(report);
      return 0;
    }
    if (*stats) {
      std::vector<Sample> samples;
      for (const auto& f : stats_files) {
        auto part = eval::read_samples(f);
        samples.insert(samples.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
      }
      const auto report = pipeline::compute_stats(samples);
      if (!stats_json.empty()) pipeline::write_file(stats_json, pipeline::stats_to_json(report).dump(2) + "\n");
      std::cout << pipeline::stats_text(report);
      return 0;
    }
    if (*render) {
      const Table table = pipeline::read_table(render_input, source_kind_flag(format_name_flag));
      StyleMix mix = StyleMix::standard();
      if (!family_flag.empty()) mix.weights = {{*parse_family_name(family_flag), 1.0}};
      const StyleSpec style = sample_style(mix, seed.value_or(0));
      const std::string svg = render_svg(table, style);
      if (raster_cmd.empty()) {
        emit(render_out, svg);
      } else {
        if (render_out.empty()) throw ConfigError("--out is required when rasterizing");
        CommandRasterizer backend(raster_cmd);
        pipeline::write_file(render_out, rasterize(svg, dpi, &backend));
      }
      return 0;
    }
    if (*convert_cmd) {
      auto kind = source_kind_flag(format_name_flag);
      if (!kind) kind = detect_source_kind(convert_input);
      if (!kind) throw ConfigError("cannot tell the format of " + convert_input + "; pass --format");
      const auto target = pipeline::parse_source_kind(to_flag);
      const std::string src = pipeline::read_file(convert_input);
      Table table;
      if (*kind == SourceKind::Json) {
        table = pipeline::read_table(convert_input, kind);
      } else if (strict) {
        table = parse(src, to_format(*kind)).table;
      } else {
        auto parsed = convert(src, to_format(*kind));
        for (const auto& w : parsed.diagnostics.warnings) std::cerr << "warning: " << w.location << ": " << w.message << '\n';
        if (!parsed.diagnostics.recovered) {
          std::cerr << "error: input could not be repaired\n";
          emit(convert_out, parsed.html);
          return 1;
        }
        table = parse(parsed.html, TableFormat::Html).table;
      }
      if (*target == SourceKind::Json) emit(convert_out, nlohmann::json(canonical(table)).dump(2));
      else emit(convert_out, serialize(table, to_format(*target)));
      return 0;
    }
    if (*verify) {
      const auto problems = pipeline::verify_manifest(verify_dir);
      for (const auto& p : problems) std::cerr << p << '\n';
      std::cout << (problems.empty() ? "manifest verified\n" : "manifest check FAILED\n");
      return problems.empty() ? 0 : 1;
    }
    if (*templates) {
      emit(templates_out, instruct::pool_to_json(instruct::default_pool()).dump(2));
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
