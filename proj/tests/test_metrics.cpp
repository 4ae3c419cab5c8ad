#include <gtest/gtest.h>

#include <cmath>

#include "mmtab/metrics.hpp"
#include "mmtab/rng.hpp"
#include "oracles.hpp"

using namespace mmtab;
using namespace mmtab::eval;
using nlohmann::json;

TEST(Tsd, PerAxis) {
  const json gold{{"row_number", 3}, {"column_number", 4}};
  auto s = score_tsd(json{{"row_number", 3}, {"column_number", 5}}, gold);
  EXPECT_TRUE(s.row_correct);
  EXPECT_FALSE(s.col_correct);
  s = score_tsd(json{{"row_number", "3"}, {"column_number", 4.0}}, gold);
  EXPECT_TRUE(s.row_correct && s.col_correct);
  s = score_tsd(json{{"row_number", 3.5}}, gold);
  EXPECT_FALSE(s.row_correct || s.col_correct);
}

TEST(CellAccuracy, ByPosition) {
  const json gold = json::parse(R"([{"position":[1,2],"value":"Total "},{"position":[2,1],"value":"7"}])");
  const json pred = json::parse(R"j([{"position":"(1,2)","value":"total"},{"position":[2,1],"value":"8"}])j");
  auto acc = score_cell_accuracy(pred, gold, KeyedBy::Position);
  EXPECT_EQ(acc.matched, 1u);
  EXPECT_EQ(acc.total, 2u);
  EXPECT_DOUBLE_EQ(acc.accuracy(), 0.5);
}

TEST(CellAccuracy, ByValueFirstPredictionWins) {
  const json gold = json::parse(R"([{"value":"zebra","position":[2,3]}])");
  auto acc = score_cell_accuracy(json::parse(R"([{"value":"zebra","position":[1,1]},{"value":"zebra","position":[2,3]}])"),
                                 gold, KeyedBy::Value);
  EXPECT_EQ(acc.matched, 0u);
  acc = score_cell_accuracy(json::parse(R"([{"value":"Zebra","position":{"row":2,"col":3}}])"), gold, KeyedBy::Value);
  EXPECT_EQ(acc.matched, 1u);
  EXPECT_EQ(score_cell_accuracy("garbage", gold, KeyedBy::Value).matched, 0u);
}

TEST(SetF1, Examples) {
  auto s = score_set_f1(std::set<int>{1, 2}, std::set<int>{2, 3});
  EXPECT_DOUBLE_EQ(s.precision, 0.5);
  EXPECT_DOUBLE_EQ(s.recall, 0.5);
  EXPECT_DOUBLE_EQ(s.f1, 0.5);
  s = score_set_f1(std::set<int>{}, std::set<int>{});
  EXPECT_DOUBLE_EQ(s.f1, 1.0);
  s = score_set_f1(std::set<int>{}, std::set<int>{1});
  EXPECT_DOUBLE_EQ(s.f1, 0.0);
  s = score_set_f1(std::set<int>{1, 2, 3}, std::set<int>{1});
  EXPECT_NEAR(s.f1, 0.5, 1e-12);
}

TEST(Mcd, RegionsAndFlag) {
  const json gold = json::parse(R"({"has_merged":true,"regions":[[[1,1],[1,2]],[[2,1],[3,1]]]})");
  auto s = score_mcd(json::parse(R"({"has_merged":true,"regions":[[[1,1],[1,2]]]})"), gold);
  EXPECT_TRUE(s.has_merged_correct);
  EXPECT_DOUBLE_EQ(s.regions.precision, 1.0);
  EXPECT_DOUBLE_EQ(s.regions.recall, 0.5);
  s = score_mcd(json::parse(R"({"has_merged":false})"), json::parse(R"({"has_merged":false,"regions":[]})"));
  EXPECT_TRUE(s.has_merged_correct);
  EXPECT_DOUBLE_EQ(s.regions.f1, 0.0);
  s = score_mcd(json::parse(R"({"has_merged":false,"regions":[]})"), json::parse(R"({"has_merged":false,"regions":[]})"));
  EXPECT_DOUBLE_EQ(s.regions.f1, 1.0);
}

TEST(Rce, PerLineAverage) {
  const json gold = json::parse(R"({"rows":{"1":["a","b"],"2":["c","d"]}})");
  auto s = score_rce(json::parse(R"({"rows":{"1":["a","b"],"2":["c","x"]}})"), gold);
  EXPECT_TRUE(s.row_axis);
  EXPECT_EQ(s.lines, 2u);
  EXPECT_DOUBLE_EQ(s.f1, (1.0 + 0.5) / 2);
  // position matters
  s = score_rce(json::parse(R"({"rows":{"1":["b","a"]}})"), gold);
  EXPECT_DOUBLE_EQ(s.f1, 0.0);
  // wrong axis key
  s = score_rce(json::parse(R"({"columns":{"1":["a","b"]}})"), gold);
  EXPECT_DOUBLE_EQ(s.f1, 0.0);
}

TEST(Bleu, Tokenizer) {
  EXPECT_EQ(bleu_tokenize("Hello, World! 3.5"), (std::vector<std::string>{"hello", ",", "world", "!", "3", ".", "5"}));
  EXPECT_EQ(bleu_tokenize("<td>caf\xc3\xa9</td>"),
            (std::vector<std::string>{"<", "td", ">", "caf\xc3\xa9", "<", "/", "td", ">"}));
  EXPECT_TRUE(bleu_tokenize("  \t\n").empty());
}

TEST(Bleu, KnownValues) {
  EXPECT_NEAR(bleu({"the cat sat on the mat"}, {"the cat sat on the mat"}), 100.0, 1e-9);
  EXPECT_NEAR(bleu({"a b"}, {"a b"}), 100.0, 1e-9);
  // all precisions 1, brevity penalty exp(1 - 6/3)
  EXPECT_NEAR(bleu({"the cat sat"}, {"the cat sat on the mat"}), 100.0 * std::exp(-1.0), 1e-9);
  EXPECT_DOUBLE_EQ(bleu({"x y z"}, {"a b c"}), 0.0);
  EXPECT_DOUBLE_EQ(bleu({""}, {"a b c"}), 0.0);
  EXPECT_THROW(bleu({"a"}, {}), LengthMismatch);
}

TEST(Bleu, SmoothingForMissingHigherOrders) {
  // 4 tokens, unigrams all match, no bigram matches: p2 = 1/(3+1), p3 = 1/(2+1), p4 = 1/(1+1)
  const double want = 100.0 * std::pow(1.0 * 0.25 * (1.0 / 3) * 0.5, 0.25);
  EXPECT_NEAR(bleu({"d c b a"}, {"a b c d"}), want, 1e-9);
}

TEST(Bleu, MatchesOracleOnRandomPairs) {
  Rng rng(3);
  const std::vector<std::string> vocab{"the", "table", "has", "3", "rows", ",", ".", "<td>", "</td>", "A", "a", "x"};
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::string> preds, refs;
    for (int k = 0; k < 5; ++k) {
      auto sentence = [&] {
        std::string s;
        for (std::size_t i = rng.uniform_index(12); i > 0; --i) s += rng.pick(vocab) + " ";
        return s;
      };
      preds.push_back(sentence());
      refs.push_back(sentence());
    }
    EXPECT_NEAR(bleu(preds, refs), oracle::corpus_bleu(preds, refs), 1e-6);
  }
}

TEST(Bleu, StatsAccumulate) {
  BleuStats total = bleu_stats("a b c", "a b c");
  total += bleu_stats("d e", "d f");
  EXPECT_NEAR(bleu_from_stats(total), bleu({"a b c", "d e"}, {"a b c", "d f"}), 1e-12);
}

TEST(Answers, Match) {
  EXPECT_TRUE(answers_match("Paris", " paris "));
  EXPECT_TRUE(answers_match("1,234", "1234"));
  EXPECT_TRUE(answers_match("12%", "12"));
  EXPECT_TRUE(answers_match("3.0000001", "3"));
  EXPECT_FALSE(answers_match("3.01", "3"));
  EXPECT_FALSE(answers_match("inf", "nan"));
  EXPECT_TRUE(answers_match(json::array({"b", "a"}), json::array({"a", "b"})));
  EXPECT_TRUE(answers_match("b, a", json::array({"a", "b"})));
  EXPECT_FALSE(answers_match(json::array({"a", "a"}), json::array({"a", "b"})));
  EXPECT_TRUE(answers_match(json::array({"42"}), "42"));
  EXPECT_TRUE(answers_match(42, "42"));
  EXPECT_FALSE(answers_match(nullptr, "x"));
}
