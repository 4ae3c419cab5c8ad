#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <regex>

#include "mmtab/instruct.hpp"

using namespace mmtab;
using namespace mmtab::instruct;
using nlohmann::json;

namespace {

json tiny_pool_doc() {
  json doc{{"templates", json::object()}, {"hints", json::object()}};
  doc["templates"]["TSD"] = json::array({{{"id", "t0"}, {"body", "How big is the table?"}}});
  doc["hints"]["TSD"] = json::array({{{"id", "h0"}, {"body", "Answer in JSON with row_number and column_number."}}});
  return doc;
}

const std::vector<TaskKind> kOnlyTsd{TaskKind::TSD};

std::filesystem::path write_temp(const std::string& name, const std::string& content) {
  const auto p = std::filesystem::temp_directory_path() / name;
  std::ofstream(p) << content;
  return p;
}

bool has_marker(const std::string& s) { return std::regex_search(s, std::regex(R"(\{[a-z_]+\})")); }

}  // namespace

TEST(Pool, DefaultPoolCoversEveryTask) {
  const auto& pool = default_pool();
  for (auto t : kAllTasks) {
    EXPECT_GE(pool.template_count(t), 1u);
    EXPECT_GE(pool.hint_count(t), 1u);
    for (const auto& h : pool.hints.at(t))
      for (auto key : answer_schema_keys(t)) EXPECT_NE(h.body.find(key), std::string::npos) << h.id;
  }
}

TEST(Pool, DefaultPoolRoundTripsThroughJson) {
  const auto doc = pool_to_json(default_pool());
  const auto again = pool_from_json(doc);
  for (auto t : kAllTasks) {
    EXPECT_EQ(again.template_count(t), default_pool().template_count(t));
    EXPECT_EQ(again.hint_count(t), default_pool().hint_count(t));
  }
}

TEST(Pool, LoadErrors) {
  EXPECT_THROW(load_pool("/nonexistent/pool.json"), PoolFormatError);
  EXPECT_THROW(load_pool(write_temp("mmtab-bad-pool.json", "{not json")), PoolFormatError);
  EXPECT_THROW(pool_from_json(json::array()), PoolFormatError);

  json doc = tiny_pool_doc();
  doc["templates"]["TSD"].push_back({{"id", "t0"}, {"body", "again"}});
  EXPECT_THROW(pool_from_json(doc, kOnlyTsd), DuplicateId);

  doc = tiny_pool_doc();
  doc["templates"]["TCE"] = json::array({{{"id", "c0"}, {"body", "no cells placeholder"}}});
  EXPECT_THROW(pool_from_json(doc, kOnlyTsd), PoolFormatError);

  doc = tiny_pool_doc();
  doc["templates"]["TSD"][0]["body"] = "What about {cells}?";
  EXPECT_THROW(pool_from_json(doc, kOnlyTsd), PoolFormatError);

  doc = tiny_pool_doc();
  doc["hints"]["TSD"][0]["body"] = "Put {format_hint} here";
  EXPECT_THROW(pool_from_json(doc, kOnlyTsd), PoolFormatError);

  doc = tiny_pool_doc();
  doc["templates"]["BOGUS"] = json::array();
  EXPECT_THROW(pool_from_json(doc, kOnlyTsd), PoolFormatError);

  EXPECT_THROW(pool_from_json(tiny_pool_doc()), MissingMandatoryDefault);
  EXPECT_NO_THROW(pool_from_json(tiny_pool_doc(), kOnlyTsd));
}

TEST(Request, SingleTemplateSingleHint) {
  const auto pool = pool_from_json(tiny_pool_doc(), kOnlyTsd);
  for (std::uint64_t seed = 0; seed < 20; ++seed)
    EXPECT_EQ(build_request(pool, TaskKind::TSD, {}, seed), "How big is the table?\nAnswer in JSON with row_number and column_number.");
}

TEST(Request, InlineHintAndSubstitution) {
  json doc{{"templates", json::object()}, {"hints", json::object()}};
  doc["templates"]["TCE"] = json::array({{{"id", "c0"}, {"body", "Cells {cells}.\n{format_hint}\nThanks."}}});
  doc["hints"]["TCE"] = json::array({{{"id", "h0"}, {"body", "Use JSON {\"answer\": [{\"value\", \"position\"}]}"}}});
  const auto pool = pool_from_json(doc, {TaskKind::TCE});
  // substituted text is not rescanned
  EXPECT_EQ(build_request(pool, TaskKind::TCE, {{"cells", "(1,1) {cells}"}}, 3),
            "Cells (1,1) {cells}.\nUse JSON {\"answer\": [{\"value\", \"position\"}]}\nThanks.");
  EXPECT_THROW(build_request(pool, TaskKind::TCE, {}, 3), MissingPlaceholder);
}

TEST(Request, DeterministicAndMarkerFree) {
  const PlaceholderValues values{{"cells", "(1,2)"}, {"format_name", "HTML"}, {"question", "Which city?"}};
  for (auto t : kAllTasks)
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      const std::string a = build_request(default_pool(), t, values, seed);
      EXPECT_EQ(a, build_request(default_pool(), t, values, seed));
      EXPECT_FALSE(has_marker(a)) << a;
    }
}

TEST(Request, UniformOverTemplatesAndHints) {
  json doc{{"templates", json::object()}, {"hints", json::object()}};
  for (int i = 0; i < 20; ++i) {
    doc["templates"]["TSD"].push_back({{"id", "t" + std::to_string(i)}, {"body", "T" + std::to_string(i)}});
    doc["hints"]["TSD"].push_back({{"id", "h" + std::to_string(i)}, {"body", "H" + std::to_string(i) + " row_number column_number"}});
  }
  const auto pool = pool_from_json(doc, kOnlyTsd);
  const int draws = 40000;
  std::map<std::string, int> n;
  for (int s = 0; s < draws; ++s) n[build_request(pool, TaskKind::TSD, {}, derive_seed(9, s))]++;
  EXPECT_EQ(n.size(), 400u);
  const double expected = draws / 400.0;
  double chi2 = 0;
  for (const auto& [k, v] : n) chi2 += (v - expected) * (v - expected) / expected;
  // df = 399; the 0.999 quantile is about 493
  EXPECT_LT(chi2, 493.0);
}

TEST(ExpandPool, AcceptsValidCandidatesOnly) {
  TemplatePool pool = pool_from_json(tiny_pool_doc(), kOnlyTsd);
  const std::string cmd = "python3 " + std::string(MMTAB_TEST_SUPPORT) + "/rephrase_templates.py";
  EXPECT_EQ(expand_pool(pool, cmd), 1u);
  ASSERT_EQ(pool.template_count(TaskKind::TSD), 2u);
  EXPECT_EQ(pool.templates[TaskKind::TSD][1].body, "Please answer. How big is the table?");
  EXPECT_EQ(pool.templates[TaskKind::TSD][1].id, "TSD-gen-1");
  // a second run produces the same rephrasings plus one of the new template
  EXPECT_EQ(expand_pool(pool, cmd), 1u);
}

TEST(ExpandPool, FailingCommandRaises) {
  TemplatePool pool = pool_from_json(tiny_pool_doc(), kOnlyTsd);
  EXPECT_THROW(expand_pool(pool, "false"), ConfigError);
}
