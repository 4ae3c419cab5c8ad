// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero when any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "corpus.hpp"
#include "gold_set.hpp"
#include "mmtab/mmtab.hpp"
#include "oracles.hpp"
#include "random_tables.hpp"

using namespace mmtab;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void report(const char* id, const std::function<Outcome()>& check) {
  Outcome o;
  try {
    o = check();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  if (!o.pass) ++failures;
  std::printf("%s %s %s\n", id, o.pass ? "PASS" : "FAIL", o.detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// Random tree shaped like a table: table -> tr -> td, at most `max_nodes`.
eval::TableTree random_table_tree(Rng& rng, std::size_t max_nodes) {
  static const std::u32string alphabet = U"abé";
  eval::TableTree t;
  t.add(eval::TableNode{eval::NodeTag::Table, {}, 1, 1});
  const std::size_t n = 1 + rng.uniform_index(max_nodes);
  std::vector<std::size_t> rows;
  for (std::size_t i = 1; i < n; ++i) {
    if (rows.empty() || rng.bernoulli(0.3)) {
      rows.push_back(t.add_child(0, eval::TableNode{eval::NodeTag::Tr, {}, 1, 1}));
      continue;
    }
    eval::TableNode td{eval::NodeTag::Td, {}, 1, 1};
    for (std::size_t k = rng.uniform_index(4); k > 0; --k) td.content += alphabet[rng.uniform_index(alphabet.size())];
    if (rng.bernoulli(0.2)) td.colspan = 2;
    if (rng.bernoulli(0.1)) td.rowspan = 2;
    t.add_child(rows[rng.uniform_index(rows.size())], td);
  }
  return t;
}

oracle::Tree to_oracle(const eval::TableTree& t) {
  oracle::Tree o;
  for (const auto& n : t.nodes) {
    oracle::Node on;
    on.tag = static_cast<int>(n.label.tag);
    on.content = n.label.content;
    on.colspan = n.label.colspan;
    on.rowspan = n.label.rowspan;
    for (auto c : n.children) on.children.push_back(static_cast<int>(c));
    o.nodes.push_back(on);
  }
  return o;
}

Outcome ac1() {
  Rng rng(20240601);
  const auto t0 = Clock::now();
  int bad = 0;
  double worst = 0;
  for (int i = 0; i < 200; ++i) {
    const auto a = random_table_tree(rng, 6), b = random_table_tree(rng, 6);
    const double d = oracle::brute_force_distance(to_oracle(a), to_oracle(b));
    const double want = std::clamp(1.0 - d / static_cast<double>(std::max(a.size(), b.size())), 0.0, 1.0);
    const double err = std::max(std::abs(eval::teds(a, b) - want), std::abs(eval::table_tree_distance(a, b) - d));
    worst = std::max(worst, err);
    bad += err > 1e-9;
  }
  const double secs = seconds_since(t0);
  return {bad == 0 && secs < 60, fmt("200 pairs, %d mismatches, max error %.2e, %.2fs", bad, worst, secs)};
}

Outcome ac2() {
  const std::string t = "<table><tr><td>a</td><td>b</td></tr></table>";
  const double same = eval::teds(t, t);
  const double ab = eval::teds("<table><tr><td>a</td></tr></table>", "<table><tr><td>b</td></tr></table>");
  const double sentinel = eval::teds("<table></table>", "<table><tr><td>x</td></tr></table>");
  const bool ok = same == 1.0 && std::abs(ab - 2.0 / 3.0) <= 1e-9 && std::abs(sentinel - 1.0 / 3.0) <= 1e-9;
  return {ok, fmt("identical %.12f, a/b %.12f, sentinel %.12f", same, ab, sentinel)};
}

Outcome ac3() {
  const auto t0 = Clock::now();
  std::string detail;
  bool ok = true;
  for (int f = 0; f < 3; ++f) {
    const TableFormat format = kAllFormats[static_cast<std::size_t>(f)];
    Rng rng(3000 + static_cast<std::uint64_t>(f));
    int passed = 0;
    for (int i = 0; i < 1000; ++i) {
      const Table t = fixtures::random_table(rng, fixtures::round_trip_options(f));
      try {
        passed += parse(serialize(t, format), format).table == t;
      } catch (const Error&) {
      }
    }
    ok = ok && passed == 1000;
    detail += fmt("%s %d/1000, ", std::string(format_name(format)).c_str(), passed);
  }
  const double secs = seconds_since(t0);
  return {ok && secs < 30, detail + fmt("%.2fs", secs)};
}

// Each check recomputes the gold answer from the raw anchors.
bool tsd_ok(const Table& t, const Sample& s) {
  const auto dump = oracle::grid_dump(t);
  return s.gold_answer == json{{"row_number", dump.size()}, {"column_number", dump.at(0).size()}};
}

bool tce_ok(const Table& t, const Sample& s) {
  const auto dump = oracle::grid_dump(t);
  for (const auto& item : s.gold_answer) {
    const int r = item["position"][0], c = item["position"][1];
    if (item["value"] != dump.at(static_cast<std::size_t>(r - 1)).at(static_cast<std::size_t>(c - 1))) return false;
  }
  return !s.gold_answer.empty();
}

bool tcl_ok(const Table& t, const Sample& s) {
  for (const auto& item : s.gold_answer) {
    const std::string v = item["value"];
    const int r = item["position"][0], c = item["position"][1];
    if (v.empty() || oracle::content_frequency(t, v) != 1) return false;
    bool found = false;
    for (const auto& a : t.anchors) found = found || (a.row == r && a.col == c && a.content == v);
    if (!found) return false;
  }
  return !s.gold_answer.empty();
}

bool mcd_ok(const Table& t, const Sample& s) {
  std::set<std::pair<std::pair<int, int>, std::pair<int, int>>> got;
  for (const auto& r : s.gold_answer["regions"])
    got.insert({{r[0][0].get<int>(), r[0][1].get<int>()}, {r[1][0].get<int>(), r[1][1].get<int>()}});
  const auto want = oracle::span_scan(t);
  return got == want && got.size() == s.gold_answer["regions"].size() &&
         s.gold_answer["has_merged"].get<bool>() == !want.empty();
}

bool rce_ok(const Table& t, const Sample& s) {
  const auto dump = oracle::grid_dump(t);
  const bool rows = s.gold_answer.contains("rows");
  const json& lines = s.gold_answer[rows ? "rows" : "columns"];
  if (lines.empty()) return false;
  for (const auto& [key, values] : lines.items()) {
    const auto id = static_cast<std::size_t>(std::stoi(key));
    std::vector<std::string> want;
    if (rows) {
      want = dump.at(id - 1);
    } else {
      for (const auto& row : dump) want.push_back(row.at(id - 1));
    }
    if (values.get<std::vector<std::string>>() != want) return false;
  }
  return true;
}

bool tr_ok(const Table& t, const Sample& s) {
  const auto f = parse_format_name(s.meta["format"].get<std::string>());
  if (!f || (t.has_merged_cells() && *f == TableFormat::Markdown)) return false;
  const Table back = parse(s.gold_answer.get<std::string>(), *f).table;
  return oracle::grid_dump(back) == oracle::grid_dump(t);
}

Outcome ac4() {
  Rng rng(4004);
  std::map<std::string, std::pair<int, int>> tally;  // task -> (checked, wrong)
  for (int i = 0; i < 1000; ++i) {
    const Table t = fixtures::random_table(rng);
    std::size_t k = 0;
    auto ctx = [&] {
      synth::SynthContext c;
      c.master_seed = 4004;
      c.table_id = "t" + std::to_string(i);
      c.sample_index = k++;
      return c;
    };
    auto check = [&](const char* task, const std::function<Sample()>& make, bool (*ok)(const Table&, const Sample&)) {
      auto& [checked, wrong] = tally[task];
      try {
        const Sample s = make();
        ++checked;
        wrong += !ok(t, s);
      } catch (const InsufficientUniqueCells&) {
        // only legitimate when fewer than one unique non-empty value exists
        int unique = 0;
        for (const auto& a : t.anchors) unique += !a.content.empty() && oracle::content_frequency(t, a.content) == 1;
        ++checked;
        wrong += unique >= 1;
      }
    };
    const int k_cells = std::min(3, t.n_rows * t.n_cols);
    check("TSD", [&] { return synth::synth_tsd(t, ctx()); }, tsd_ok);
    check("TCE", [&] { return synth::synth_tce(t, k_cells, ctx()); }, tce_ok);
    check("TCL", [&] { return synth::synth_tcl(t, 1, ctx()); }, tcl_ok);
    check("MCD", [&] { return synth::synth_mcd(t, ctx()); }, mcd_ok);
    check("RCE", [&] { return synth::synth_rce(t, ctx()); }, rce_ok);
    check("TR", [&] { return synth::synth_tr(t, synth::SynthConfig{}.tr_format_weights, ctx()); }, tr_ok);
  }
  bool ok = true;
  std::string detail;
  for (const auto& [task, cw] : tally) {
    ok = ok && cw.first == 1000 && cw.second == 0;
    detail += fmt("%s %d/%d ", task.c_str(), cw.first - cw.second, cw.first);
  }
  return {ok, detail};
}

Outcome ac5() {
  std::map<StyleFamily, int> styles;
  const int style_draws = 10000;
  for (int i = 0; i < style_draws; ++i)
    styles[sample_style(StyleMix::standard(), derive_seed(5, i, "style")).family]++;
  const double web = styles[StyleFamily::WebPage] * 100.0 / style_draws;
  const double excel = styles[StyleFamily::Excel] * 100.0 / style_draws;
  const double md = styles[StyleFamily::Markdown] * 100.0 / style_draws;

  Table one;
  one.anchors = {AnchorCell{1, 1, 1, 1, "x", false}};
  std::map<std::string, int> formats;
  const int tr_draws = 15000;
  for (int i = 0; i < tr_draws; ++i) {
    synth::SynthContext c;
    c.master_seed = 5;
    c.table_id = "t" + std::to_string(i);
    formats[synth::synth_tr(one, synth::SynthConfig{}.tr_format_weights, c).meta["format"].get<std::string>()]++;
  }
  const double html = formats["html"] * 100.0 / tr_draws;
  const double mdf = formats["markdown"] * 100.0 / tr_draws;
  const double latex = formats["latex"] * 100.0 / tr_draws;
  const bool ok = std::abs(web - 70.8) <= 1.5 && std::abs(excel - 19.4) <= 1.5 && std::abs(md - 9.8) <= 1.5 &&
                  std::abs(html - 64) <= 1.5 && std::abs(mdf - 18) <= 1.5 && std::abs(latex - 18) <= 1.5;
  return {ok, fmt("style %.2f/%.2f/%.2f, tr %.2f/%.2f/%.2f", web, excel, md, html, mdf, latex)};
}

json synth_config(const fs::path& corpus, std::size_t train, std::size_t eval) {
  json counts;
  for (const char* t : {"TSD", "TCE", "TCL", "MCD", "RCE", "TR"}) counts[t] = {train, eval};
  return {{"corpus", {corpus.string()}}, {"synth", {{"counts", counts}}}, {"master_seed", 2024}};
}

Outcome ac6(const fs::path& root) {
  fixtures::write_corpus(root / "corpus500", {.count = 500, .seed = 6});
  pipeline::PipelineConfig c = pipeline::config_from_json(synth_config(root / "corpus500", 80, 10), ".");
  std::ostringstream sink;
  pipeline::RunOptions opt;
  opt.output_dir = (root / "out6").string();
  opt.log = &sink;
  const auto t0 = Clock::now();
  const json m = pipeline::cmd_synth(c, opt);
  const double secs = seconds_since(t0);
  bool ok = true;
  std::size_t train = 0, eval = 0;
  for (const char* t : {"TSD", "TCE", "TCL", "MCD", "RCE", "TR"}) {
    ok = ok && m["counts"][t]["train"] == 80 && m["counts"][t]["eval"] == 10;
    train += m["counts"][t]["train"].get<std::size_t>();
    eval += m["counts"][t]["eval"].get<std::size_t>();
  }
  const auto problems = pipeline::verify_manifest(root / "out6");
  ok = ok && problems.empty();
  return {ok, fmt("train %zu, eval %zu, verify problems %zu, %.2fs", train, eval, problems.size(), secs)};
}

Outcome ac7(const fs::path& root) {
  fixtures::write_corpus(root / "corpus7", {.count = 150, .malformed = 3, .seed = 7});
  json j = synth_config(root / "corpus7", 40, 10);
  j["synth"]["multiturn_fraction"] = 0.3;
  const pipeline::PipelineConfig c = pipeline::config_from_json(j, ".");
  std::ostringstream sink;
  std::vector<std::string> manifests;
  for (unsigned w : {1u, 2u, 4u}) {
    pipeline::RunOptions opt;
    opt.workers = w;
    opt.output_dir = (root / ("out7-" + std::to_string(w))).string();
    opt.log = &sink;
    pipeline::cmd_synth(c, opt);
    manifests.push_back(pipeline::read_file(fs::path(*opt.output_dir) / "manifest.json"));
  }
  const bool synth_same = manifests[0] == manifests[1] && manifests[1] == manifests[2];

  const auto gold = fixtures::gold_set(7, 60);
  const auto preds = fixtures::replay(gold);
  const std::string r1 = eval::report_to_json(eval::evaluate(preds, gold, 1)).dump();
  const std::string r4 = eval::report_to_json(eval::evaluate(preds, gold, 4)).dump();
  const std::string digest = json::parse(manifests[0])["files"]["train.jsonl"];
  return {synth_same && r1 == r4,
          fmt("manifests for workers 1/2/4 %s, eval reports %s, train.jsonl %s", synth_same ? "identical" : "differ",
              r1 == r4 ? "identical" : "differ", digest.substr(0, 16).c_str())};
}

std::string random_bytes(Rng& rng) {
  std::string s;
  for (std::size_t n = rng.uniform_index(96); n > 0; --n) s.push_back(static_cast<char>(rng.uniform_index(256)));
  return s;
}

Outcome ac8() {
  const auto gold = fixtures::gold_set(8, 80);
  const auto replayed = eval::evaluate(fixtures::replay(gold), gold);
  bool perfect = replayed.counts.extraction_failed == 0 && replayed.counts.evaluated == fixtures::unit_count(gold);
  for (const auto& s : replayed.per_sample) perfect = perfect && s.score == 1.0;
  const double bleu = replayed.per_task.at(TaskKind::QAWrap).at("bleu");
  perfect = perfect && std::abs(bleu - 100.0) < 1e-9;

  // TR responses are converted before scoring; an unreadable one counts as
  // the empty table, so its ceiling is that table's score against the gold.
  std::map<std::string, double> tr_ceiling;
  for (const auto& s : gold) {
    auto note = [&](const std::string& id, TaskKind task, const json& answer, const json& meta) {
      if (task == TaskKind::TR) tr_ceiling[id] = eval::score_response(task, answer, meta, std::string()).score;
    };
    if (!s.is_conversation()) note(s.sample_id, s.task, s.gold_answer, s.meta);
    for (const auto& t : s.turns) note(t.sample_id, t.task, t.gold_answer, t.meta);
  }

  Rng rng(8);
  std::size_t fed = 0, structure_scored = 0, tr_over = 0;
  bool threw = false;
  while (fed < 10000) {
    std::vector<eval::Prediction> preds;
    for (const auto& s : gold) {
      eval::Prediction p;
      p.sample_id = s.sample_id;
      if (s.is_conversation()) {
        for (std::size_t k = 0; k < s.turns.size(); ++k, ++fed) p.responses.push_back(random_bytes(rng));
      } else {
        p.response = random_bytes(rng);
        ++fed;
      }
      preds.push_back(std::move(p));
    }
    try {
      const auto r = eval::evaluate(preds, gold);
      for (const auto& s : r.per_sample) {
        if (s.task == TaskKind::TR) tr_over += s.score > tr_ceiling.at(s.sample_id) + 1e-12;
        else if (s.task != TaskKind::QAWrap) structure_scored += s.score > 0;
      }
    } catch (const std::exception&) {
      threw = true;
    }
  }
  return {perfect && !threw && structure_scored == 0 && tr_over == 0,
          fmt("replay %s (BLEU %.4f); %zu random responses, raised %s, structure >0: %zu, TR above empty-table: %zu",
              perfect ? "perfect" : "imperfect", bleu, fed, threw ? "yes" : "no", structure_scored, tr_over)};
}

Outcome ac9() {
  static const std::vector<std::string> vocab{"the", "The", "cat", "sat", "on", "mat", "total", "2019", "42", ",",
                                              ".", "(", ")", "%", "sales", "rose", "to", "caf\xc3\xa9", "N/A", "x-y"};
  Rng rng(9);
  std::vector<std::string> preds, refs;
  double worst = 0;
  for (int i = 0; i < 50; ++i) {
    std::vector<std::string> ref;
    for (std::size_t n = 1 + rng.uniform_index(20); n > 0; --n) ref.push_back(rng.pick(vocab));
    std::vector<std::string> pred;
    for (const auto& w : ref) {
      if (rng.bernoulli(0.15)) continue;
      pred.push_back(rng.bernoulli(0.15) ? rng.pick(vocab) : w);
      if (rng.bernoulli(0.05)) pred.push_back(rng.pick(vocab));
    }
    auto join = [&](const std::vector<std::string>& v) {
      std::string s;
      for (const auto& w : v) s += (s.empty() || rng.bernoulli(0.2) ? "" : " ") + w;
      return s;
    };
    preds.push_back(join(pred));
    refs.push_back(join(ref));
    worst = std::max(worst, std::abs(eval::bleu({preds.back()}, {refs.back()}) -
                                     oracle::corpus_bleu({preds.back()}, {refs.back()})));
  }
  const double corpus = eval::bleu(preds, refs), want = oracle::corpus_bleu(preds, refs);
  worst = std::max(worst, std::abs(corpus - want));
  return {worst <= 1e-6, fmt("50 pairs, corpus BLEU %.6f vs %.6f, max deviation %.2e", corpus, want, worst)};
}

}  // namespace

int main() {
  fixtures::ScratchDir scratch("acceptance");
  report("AC1", ac1);
  report("AC2", ac2);
  report("AC3", ac3);
  report("AC4", ac4);
  report("AC5", ac5);
  report("AC6", [&] { return ac6(scratch.path()); });
  report("AC7", [&] { return ac7(scratch.path()); });
  report("AC8", ac8);
  report("AC9", ac9);
  std::printf("%s\n", failures ? "ACCEPTANCE FAILED" : "ACCEPTANCE PASSED");
  return failures ? 1 : 0;
}
