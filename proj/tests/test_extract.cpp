#include <gtest/gtest.h>

#include "mmtab/extract.hpp"
#include "mmtab/rng.hpp"

using namespace mmtab;
using namespace mmtab::eval;
using nlohmann::json;

TEST(Extract, PlainJson) {
  auto r = extract_json_answer(R"({"row_number": 3, "column_number": 4})", TaskKind::TSD);
  EXPECT_EQ(r.status, ExtractionStatus::ParsedJson);
  EXPECT_EQ(r.payload, json::parse(R"({"row_number": 3, "column_number": 4})"));
}

TEST(Extract, JsonInsideProse) {
  auto r = extract_json_answer("Sure! The table is {\"row_number\": 5, \"column_number\": 2}. Hope that's right.",
                               TaskKind::TSD);
  EXPECT_EQ(r.status, ExtractionStatus::ParsedJson);
  EXPECT_EQ(r.payload["row_number"], 5);
}

TEST(Extract, LastBlockWins) {
  auto r = extract_json_answer("First guess {\"row_number\": 1} then {\"row_number\": 2, \"column_number\": 7}",
                               TaskKind::TSD);
  EXPECT_EQ(r.payload["row_number"], 2);
}

TEST(Extract, SkipsUnparsableTrailingBlock) {
  auto r = extract_json_answer("{\"answer\": \"x\"} and then {not json}", TaskKind::QAWrap);
  EXPECT_EQ(r.status, ExtractionStatus::ParsedJson);
  EXPECT_EQ(r.payload["answer"], "x");
}

TEST(Extract, BracesInsideStrings) {
  auto r = extract_json_answer(R"(Answer: {"answer": "a } b { c"})", TaskKind::QAWrap);
  EXPECT_EQ(r.status, ExtractionStatus::ParsedJson);
  EXPECT_EQ(r.payload["answer"], "a } b { c");
}

TEST(Extract, FencedCodeBlock) {
  auto r = extract_json_answer("```json\n{\"has_merged\": true, \"regions\": [[[1,1],[1,2]]]}\n```", TaskKind::MCD);
  EXPECT_EQ(r.status, ExtractionStatus::ParsedJson);
  EXPECT_TRUE(r.payload["has_merged"].get<bool>());
}

TEST(Extract, RegexFallbackTsd) {
  auto r = extract_json_answer("row_number: 3, column_number = 4 (no json here", TaskKind::TSD);
  EXPECT_EQ(r.status, ExtractionStatus::RegexFallback);
  EXPECT_EQ(r.payload, (json{{"row_number", 3}, {"column_number", 4}}));
  r = extract_json_answer("The row_number is 12.", TaskKind::TSD);
  EXPECT_EQ(r.payload, (json{{"row_number", 12}}));
}

TEST(Extract, RegexFallbackMcd) {
  auto r = extract_json_answer("has_merged: yes, there are some", TaskKind::MCD);
  EXPECT_EQ(r.status, ExtractionStatus::RegexFallback);
  EXPECT_EQ(r.payload, (json{{"has_merged", true}}));
}

TEST(Extract, RegexFallbackAnswerString) {
  auto r = extract_json_answer(R"(broken {"answer": "<table><tr><td>a</td></tr></table>" oops)", TaskKind::TR);
  EXPECT_EQ(r.status, ExtractionStatus::RegexFallback);
  EXPECT_EQ(r.payload["answer"], "<table><tr><td>a</td></tr></table>");
}

TEST(Extract, RawTextAndFailed) {
  auto r = extract_json_answer("  Paris  ", TaskKind::QAWrap);
  EXPECT_EQ(r.status, ExtractionStatus::RawText);
  EXPECT_EQ(r.payload, "Paris");
  EXPECT_EQ(extract_json_answer(" \n\t ", TaskKind::TSD).status, ExtractionStatus::Failed);
  EXPECT_EQ(extract_json_answer("", TaskKind::TSD).status, ExtractionStatus::Failed);
  EXPECT_EQ(status_name(ExtractionStatus::RegexFallback), "regex_fallback");
}

TEST(Extract, NeverThrowsAndPayloadMatchesStatus) {
  Rng rng(1);
  const std::string alphabet = "{}[]\":,\\ abc0123456789row_numbercolumn_numberhas_mergedanswertrue\n";
  for (int i = 0; i < 20000; ++i) {
    std::string s;
    const auto n = rng.uniform_index(80);
    for (std::size_t k = 0; k < n; ++k)
      s.push_back(rng.bernoulli(0.85) ? alphabet[rng.uniform_index(alphabet.size())]
                                      : static_cast<char>(rng.uniform_index(256)));
    for (auto task : kAllTasks) {
      ExtractionResult r;
      ASSERT_NO_THROW(r = extract_json_answer(s, task));
      switch (r.status) {
        case ExtractionStatus::ParsedJson:
        case ExtractionStatus::RegexFallback: EXPECT_TRUE(r.payload.is_object()); break;
        case ExtractionStatus::RawText: EXPECT_TRUE(r.payload.is_string()); break;
        case ExtractionStatus::Failed: EXPECT_TRUE(r.payload.is_null()); break;
      }
      // the payload must always be serializable
      EXPECT_NO_THROW(r.payload.dump());
    }
  }
}
