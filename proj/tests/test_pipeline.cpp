#include <gtest/gtest.h>

#include "corpus.hpp"
#include "mmtab/evaluate.hpp"
#include "mmtab/pipeline.hpp"

using namespace mmtab;
using namespace mmtab::pipeline;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

RunOptions quiet(unsigned workers = 1) {
  static std::ostringstream sink;
  RunOptions o;
  o.workers = workers;
  o.log = &sink;
  return o;
}

void write_html_tables(const fs::path& dir, int n) {
  fs::create_directories(dir);
  Rng rng(5);
  for (int i = 0; i < n; ++i) {
    fixtures::RandomTableOptions opt;
    opt.min_rows = 2;
    opt.min_cols = 2;
    write_file(dir / ("table" + std::to_string(i) + ".html"),
               serialize(fixtures::random_table(rng, opt), TableFormat::Html));
  }
}

PipelineConfig tsd_only(const fs::path& corpus, const fs::path& out, std::size_t train, std::size_t eval) {
  json j{{"corpus", {corpus.string()}},
         {"synth", {{"counts", {{"TSD", {train, eval}}}}}},
         {"output_dir", out.string()},
         {"master_seed", 7}};
  return config_from_json(j, ".");
}

std::size_t lines_in(const fs::path& p) {
  const std::string s = read_file(p);
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

}  // namespace

TEST(Synth, TenHtmlTablesTsd) {
  fixtures::ScratchDir tmp("pipe");
  write_html_tables(tmp / "corpus", 10);
  const json m = cmd_synth(tsd_only(tmp / "corpus", tmp / "out", 10, 0), quiet());
  EXPECT_EQ(m["counts"]["TSD"]["train"], 10);
  EXPECT_EQ(m["counts"]["TSD"]["eval"], 0);
  EXPECT_EQ(lines_in(tmp / "out/train.jsonl"), 10u);
  std::size_t svgs = 0;
  for (const auto& e : fs::directory_iterator(tmp / "out/images")) svgs += e.path().extension() == ".svg";
  EXPECT_EQ(svgs, 10u);
  EXPECT_TRUE(verify_manifest(tmp / "out").empty());
  for (const auto& s : eval::read_samples(tmp / "out/train.jsonl")) {
    EXPECT_EQ(s.task, TaskKind::TSD);
    EXPECT_TRUE(fs::exists(tmp / "out" / s.image_ref)) << s.image_ref;
  }
}

TEST(Synth, MalformedFileSkipped) {
  fixtures::ScratchDir tmp("pipe");
  write_html_tables(tmp / "corpus", 9);
  write_file(tmp / "corpus/bad.html", "<table><tr><td rowspan=\"many\">x</td></tr>");
  const json m = cmd_synth(tsd_only(tmp / "corpus", tmp / "out", 20, 0), quiet());
  EXPECT_EQ(m["ingest"]["files"], 10);
  EXPECT_EQ(m["ingest"]["tables"], 9);
  EXPECT_EQ(m["ingest"]["skipped"], 1);
  EXPECT_EQ(m["counts"]["TSD"]["train"], 9);
  EXPECT_EQ(m["shortfall"]["TSD"]["train"], 11);
}

TEST(Synth, RerunIsByteIdenticalAcrossWorkers) {
  fixtures::ScratchDir tmp("pipe");
  fixtures::write_corpus(tmp / "corpus", {.count = 60, .malformed = 2, .seed = 3});
  json j{{"corpus", {(tmp / "corpus").string()}},
         {"synth", {{"counts", {{"TSD", {20, 5}}, {"TCE", {20, 5}}, {"TCL", {20, 5}}, {"MCD", {20, 5}},
                                 {"RCE", {20, 5}}, {"TR", {20, 5}}}}}},
         {"master_seed", "0x2a"}};
  PipelineConfig c = config_from_json(j, ".");
  c.output_dir = (tmp / "a").string();
  const json a = cmd_synth(c, quiet(1));
  c.output_dir = (tmp / "b").string();
  const json b = cmd_synth(c, quiet(3));
  EXPECT_EQ(a, b);
  EXPECT_EQ(read_file(tmp / "a/manifest.json"), read_file(tmp / "b/manifest.json"));
  // rerunning into the same directory replaces the previous output
  c.output_dir = (tmp / "a").string();
  EXPECT_EQ(cmd_synth(c, quiet(2)), a);
}

TEST(Synth, StatsAgreeWithManifest) {
  fixtures::ScratchDir tmp("pipe");
  fixtures::write_corpus(tmp / "corpus", {.count = 80, .seed = 4});
  json j{{"corpus", {(tmp / "corpus").string()}},
         {"synth", {{"counts", {{"TSD", {30, 5}}, {"MCD", {30, 5}}, {"TR", {30, 5}}}}, {"multiturn_fraction", 0.5}}},
         {"output_dir", (tmp / "out").string()}};
  const json m = cmd_synth(config_from_json(j, "."), quiet());
  auto samples = eval::read_samples(tmp / "out/train.jsonl");
  const auto more = eval::read_samples(tmp / "out/eval.jsonl");
  samples.insert(samples.end(), more.begin(), more.end());
  const StatsReport st = compute_stats(samples);
  for (const auto& [task, split] : m["counts"].items()) {
    EXPECT_EQ(st.tasks.at(task).train, split["train"].get<std::size_t>()) << task;
    EXPECT_EQ(st.tasks.at(task).eval, split["eval"].get<std::size_t>()) << task;
  }
  EXPECT_EQ(st.conversations, m["conversations"]["count"].get<std::size_t>());
  EXPECT_EQ(st.records, m["records"]["train.jsonl"].get<std::size_t>() + m["records"]["eval.jsonl"].get<std::size_t>());
  for (const auto& [fmt, n] : m["tr_format_mix"]["counts"].items()) EXPECT_EQ(st.tr_formats.at(fmt), n.get<std::size_t>());
  EXPECT_GT(st.conversations, 0u);
}

TEST(Synth, QaPairsWrapped) {
  fixtures::ScratchDir tmp("pipe");
  write_html_tables(tmp / "corpus", 3);
  write_file(tmp / "qa.jsonl",
             "{\"table_id\": \"table0\", \"input\": \"How many rows?\", \"output\": \"3\"}\n"
             "{\"table_id\": \"table1\", \"input\": \"Summarize.\", \"output\": \"A small table.\", \"metric\": \"bleu\", "
             "\"split\": \"eval\"}\n"
             "{\"table_id\": \"nope\", \"input\": \"q\", \"output\": \"a\"}\n");
  json j{{"corpus", {(tmp / "corpus").string()}},
         {"qa", {(tmp / "qa.jsonl").string()}},
         {"synth", {{"counts", json::object()}}},
         {"output_dir", (tmp / "out").string()}};
  const json m = cmd_synth(config_from_json(j, "."), quiet());
  EXPECT_EQ(m["qa"]["wrapped"], 2);
  EXPECT_EQ(m["qa"]["skipped"], 1);
  EXPECT_EQ(m["counts"]["QAWrap"]["train"], 1);
  EXPECT_EQ(m["counts"]["QAWrap"]["eval"], 1);
  const auto evals = eval::read_samples(tmp / "out/eval.jsonl");
  ASSERT_EQ(evals.size(), 1u);
  EXPECT_EQ(evals[0].meta["metric"], "bleu");
}

TEST(Synth, VerifyDetectsTampering) {
  fixtures::ScratchDir tmp("pipe");
  write_html_tables(tmp / "corpus", 4);
  cmd_synth(tsd_only(tmp / "corpus", tmp / "out", 4, 0), quiet());
  EXPECT_TRUE(verify_manifest(tmp / "out").empty());
  write_file(tmp / "out/train.jsonl", "tampered\n");
  const auto problems = verify_manifest(tmp / "out");
  ASSERT_EQ(problems.size(), 1u);
  EXPECT_NE(problems[0].find("train.jsonl"), std::string::npos);
}

TEST(Synth, RefusesForeignOutputDir) {
  fixtures::ScratchDir tmp("pipe");
  write_html_tables(tmp / "corpus", 2);
  fs::create_directories(tmp / "out");
  write_file(tmp / "out/keep.txt", "mine");
  EXPECT_THROW(cmd_synth(tsd_only(tmp / "corpus", tmp / "out", 2, 0), quiet()), ConfigError);
  EXPECT_EQ(read_file(tmp / "out/keep.txt"), "mine");
}

TEST(Config, Errors) {
  EXPECT_THROW(config_from_json(json::parse(R"({"corpus": ["x"], "style_mix": {"WebPage": 0.5}})"), "."), ConfigError);
  EXPECT_THROW(config_from_json(json::parse(R"({"corpus": ["x"], "synth": {"counts": {"QAWrap": [1, 1]}}})"), "."),
               ConfigError);
  EXPECT_THROW(config_from_json(json::parse(R"({"corpus": [{"path": "x", "format": "csv"}]})"), "."), ConfigError);
  EXPECT_THROW(config_from_json(json::parse(R"({"nothing": 1})"), "."), ConfigError);
  EXPECT_THROW(load_config("/nonexistent/config.json"), ConfigError);
}

TEST(Config, ShippedExampleLoads) {
  const PipelineConfig c = load_config(fs::path(MMTAB_TEST_DATA) / "example_config.json");
  EXPECT_FALSE(c.corpus.empty());
  const IngestResult r = ingest(c);
  EXPECT_EQ(r.failures.size(), 0u);
  EXPECT_EQ(r.tables.size(), 4u);
}

TEST(Synth, ShippedExampleRuns) {
  fixtures::ScratchDir tmp("pipe");
  const json m = cmd_synth(load_config(fs::path(MMTAB_TEST_DATA) / "example_config.json"),
                           [&] {
                             RunOptions o = quiet();
                             o.output_dir = (tmp / "out").string();
                             return o;
                           }());
  EXPECT_EQ(m["qa"]["wrapped"], 2);
  EXPECT_EQ(m["counts"]["TSD"]["train"], 4);
  EXPECT_TRUE(verify_manifest(tmp / "out").empty());
}

TEST(Stats, Arithmetic) {
  Sample a, b;
  a.request = "one two three four";
  b.request = "one two three four five six";
  a.sample_id = "a";
  b.sample_id = "b";
  const StatsReport r = compute_stats({a, b});
  EXPECT_DOUBLE_EQ(stats_to_json(r)["overall"]["avg_request_tokens"].get<double>(), 5.0);
  const StatsReport empty = compute_stats({});
  EXPECT_EQ(stats_to_json(empty)["overall"]["count"], 0);
  EXPECT_NO_THROW(stats_text(empty));
}
