#include <gtest/gtest.h>

#include <sstream>

#include "noveldetect/corpus.hpp"
#include "noveldetect/detectors.hpp"
#include "noveldetect/eval.hpp"
#include "noveldetect/factmodel.hpp"
#include "noveldetect/metrics.hpp"
#include "noveldetect/random.hpp"

using namespace noveldetect;
using namespace noveldetect::facts;

namespace {

std::vector<FactSentence> sentences(const std::vector<FactSet>& sets) {
  std::vector<FactSentence> out;
  for (std::size_t i = 0; i < sets.size(); ++i) out.push_back({"s" + std::to_string(i + 1), sets[i]});
  return out;
}

FactSet random_set(Rng& rng, std::size_t universe) {
  FactSet s;
  while (s.empty()) {
    for (std::size_t f = 0; f < universe; ++f) {
      if (rng.bernoulli(0.35)) s.push_back(static_cast<FactId>(f));
    }
  }
  return s;
}

}  // namespace

TEST(Relations, CoExamples) {
  EXPECT_TRUE(co_holds(FactSet{1, 2}, FactSet{2}));
  EXPECT_FALSE(co_holds(FactSet{1}, FactSet{1, 2}));
  EXPECT_TRUE(co_holds(FactSet{3, 4}, FactSet{3, 4}));
}

TEST(Relations, PoNonTransitiveExample) {
  FactSet a{0}, b{0, 1}, c{1};
  EXPECT_TRUE(po_holds(a, b));
  EXPECT_TRUE(po_holds(b, c));
  EXPECT_FALSE(po_holds(a, c));
  EXPECT_TRUE(po_holds(b, b));
  EXPECT_EQ(po_holds(a, b), po_holds(b, a));
}

TEST(Relations, SetOperations) {
  EXPECT_EQ(make_fact_set({3, 1, 3, 2}), (FactSet{1, 2, 3}));
  EXPECT_EQ(fact_intersection({1, 2, 5}, {2, 5, 7}), (FactSet{2, 5}));
  auto s = sentences({{1}, {4, 2}, {2, 3}});
  EXPECT_EQ(fact_union(s), (FactSet{1, 2, 3, 4}));
}

TEST(GoldLabel, Examples) {
  auto a = sentences({{1}, {2}, {1, 2}});
  auto l = gold_label(a, 2);
  EXPECT_FALSE(l.novel);
  EXPECT_EQ(l.po_relatives, (std::vector<std::string>{"s1", "s2"}));

  auto b = sentences({{1}, {2}, {1, 3}});
  l = gold_label(b, 2);
  EXPECT_TRUE(l.novel);
  EXPECT_EQ(l.po_relatives, std::vector<std::string>{"s1"});

  auto c = sentences({{1, 2}, {2}});
  l = gold_label(c, 1);
  EXPECT_FALSE(l.novel);
  EXPECT_EQ(l.po_relatives, std::vector<std::string>{"s1"});

  EXPECT_TRUE(gold_label(c, 0).novel);
  EXPECT_TRUE(gold_label(c, 0).po_relatives.empty());
  EXPECT_THROW(gold_label(c, 2), std::out_of_range);
}

TEST(GoldLabel, MatchesBruteForceUnionOfAllEarlier) {
  Rng rng(9);
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<FactSet> sets;
    std::size_t n = 1 + rng.below(7);
    for (std::size_t i = 0; i < n; ++i) sets.push_back(random_set(rng, 5));
    auto topic = sentences(sets);
    for (std::size_t i = 0; i < n; ++i) {
      FactSet earlier;
      for (std::size_t p = 0; p < i; ++p) earlier.insert(earlier.end(), sets[p].begin(), sets[p].end());
      earlier = make_fact_set(earlier);
      auto l = gold_label(topic, i);
      EXPECT_EQ(l.novel, !co_holds(earlier, sets[i]));
      std::vector<std::string> rel;
      for (std::size_t p = 0; p < i; ++p) {
        if (po_holds(sets[p], sets[i])) rel.push_back(topic[p].sentence_id);
      }
      EXPECT_EQ(l.po_relatives, rel);
    }
  }
}

TEST(Properties, NoViolationsOnFactSets) {
  Rng rng(77);
  std::vector<FactSentence> pool;
  for (int i = 0; i < 300; ++i) pool.push_back({"x" + std::to_string(i), random_set(rng, 6)});
  auto report = check_relation_properties(pool, 10000, 5);
  EXPECT_EQ(report.triples_checked, 10000u);
  EXPECT_EQ(report.total_violations(), 0u);
  for (auto p : kCheckedProperties) {
    ASSERT_TRUE(report.violations.count(p)) << to_string(p);
    EXPECT_EQ(report.violations.at(p), 0u) << to_string(p);
  }
  ASSERT_TRUE(report.po_non_transitive.has_value());
  ASSERT_TRUE(report.po_not_preserved_by_co.has_value());
}

TEST(Properties, WitnessesFromExhaustiveSearch) {
  // Expected triples from an independent bitmask enumeration.
  auto w3 = find_po_non_transitive(4);
  ASSERT_TRUE(w3.has_value());
  EXPECT_EQ(w3->a, FactSet{0});
  EXPECT_EQ(w3->b, (FactSet{0, 1}));
  EXPECT_EQ(w3->c, FactSet{1});

  auto w7 = find_po_not_preserved_by_co(4);
  ASSERT_TRUE(w7.has_value());
  EXPECT_EQ(w7->a, FactSet{0});
  EXPECT_EQ(w7->b, (FactSet{0, 1}));
  EXPECT_EQ(w7->c, FactSet{1});
  EXPECT_TRUE(po_holds(w7->a, w7->b));
  EXPECT_TRUE(co_holds(w7->b, w7->c));
  EXPECT_FALSE(po_holds(w7->a, w7->c));

  // A single fact cannot witness either non-property.
  EXPECT_FALSE(find_po_non_transitive(1).has_value());
  EXPECT_FALSE(find_po_not_preserved_by_co(1).has_value());
}

TEST(Generator, Deterministic) {
  GenParams p;
  p.seed = 7;
  p.noise_terms_per_sentence = 3;
  auto a = gen_corpus(p);
  auto b = gen_corpus(p);
  std::ostringstream ta, tb, sa, sb;
  write_corpus(ta, a.topics);
  write_corpus(tb, b.topics);
  write_fact_sidecar(sa, a);
  write_fact_sidecar(sb, b);
  EXPECT_EQ(ta.str(), tb.str());
  EXPECT_EQ(sa.str(), sb.str());
  p.seed = 8;
  std::ostringstream tc;
  write_corpus(tc, gen_corpus(p).topics);
  EXPECT_NE(ta.str(), tc.str());
}

TEST(Generator, NoRedundancyWithFreshFacts) {
  GenParams p;
  p.n_topics = 3;
  p.sentences_per_topic = 40;
  p.fact_vocab = 200;
  p.facts_lo = 1;
  p.facts_hi = 4;
  p.redundancy_bias = 0.0;
  p.fresh_novel_facts = true;
  auto c = gen_corpus(p);
  for (const auto& t : c.topics) {
    for (const auto& s : t.sentences) {
      EXPECT_EQ(s.gold_novel, true);
      EXPECT_TRUE(s.gold_po->empty());
    }
  }
  EXPECT_EQ(c.metadata.n_redundant, 0u);
}

TEST(Generator, FullBiasMakesEverythingRedundant) {
  GenParams p;
  p.n_topics = 5;
  p.sentences_per_topic = 30;
  p.facts_lo = p.facts_hi = 3;
  p.redundancy_bias = 1.0;
  auto c = gen_corpus(p);
  for (std::size_t t = 0; t < c.topics.size(); ++t) {
    for (std::size_t i = 0; i < c.topics[t].sentences.size(); ++i) {
      bool oracle_novel = gold_label(c.facts[t], i).novel;
      EXPECT_EQ(c.topics[t].sentences[i].gold_novel, oracle_novel);
      EXPECT_EQ(oracle_novel, i == 0);
    }
  }
  EXPECT_EQ(c.metadata.n_redundant, 5u * 29u);
}

TEST(Generator, LabelsAndMetadataConsistent) {
  GenParams p;
  p.n_topics = 6;
  p.sentences_per_topic = 50;
  p.fact_vocab = 40;
  p.facts_lo = 1;
  p.facts_hi = 4;
  p.redundancy_bias = 0.5;
  p.seed = 99;
  auto c = gen_corpus(p);
  std::size_t redundant = 0, union_only = 0;
  for (std::size_t t = 0; t < c.topics.size(); ++t) {
    const auto& topic = c.topics[t];
    EXPECT_EQ(topic.sentences[0].gold_novel, true);
    EXPECT_TRUE(validate_gold(topic).psm_computable());
    for (std::size_t i = 0; i < topic.sentences.size(); ++i) {
      auto l = gold_label(c.facts[t], i);
      EXPECT_EQ(topic.sentences[i].gold_novel, l.novel);
      EXPECT_EQ(topic.sentences[i].gold_po, l.po_relatives);
      if (l.novel) continue;
      ++redundant;
      bool single = false;
      for (std::size_t q = 0; q < i; ++q) single |= co_holds(c.facts[t][q].facts, c.facts[t][i].facts);
      if (!single) ++union_only;
    }
  }
  EXPECT_EQ(c.metadata.n_sentences, 300u);
  EXPECT_EQ(c.metadata.n_redundant, redundant);
  EXPECT_EQ(c.metadata.n_union_only, union_only);
  EXPECT_GT(redundant, 0u);
  EXPECT_GT(union_only, 0u);
}

TEST(Generator, SingleSentenceSourceHasNoUnionOnly) {
  GenParams p;
  p.redundancy_source = RedundancySource::single_sentence;
  p.redundancy_bias = 0.5;
  p.fresh_novel_facts = true;
  p.fact_vocab = 400;
  auto c = gen_corpus(p);
  EXPECT_GT(c.metadata.n_redundant, 0u);
  EXPECT_EQ(c.metadata.n_union_only, 0u);
}

TEST(Generator, NoiseFreeCeilingIsReachable) {
  // Exact term recovery: pool at alpha = 1 sees the facts directly.
  GenParams p;
  p.seed = 3;
  p.redundancy_bias = 0.4;
  auto c = gen_corpus(p);
  ASSERT_EQ(c.metadata.snm_ceiling, 1.0);
  DetectorParams d;
  d.method = Method::pool;
  d.alpha = 1.0;
  for (const auto& topic : c.topics) {
    auto prepared = prepare_topic(topic, {});
    auto js = judge_topic(prepared.vectors, d);
    auto m = evaluate_topic(js, topic, true);
    EXPECT_EQ(m.snm.f, 1.0) << topic.topic_id;
    EXPECT_EQ(m.counts.mistakes(), 0u);
  }
  p.noise_terms_per_sentence = 2;
  EXPECT_FALSE(gen_corpus(p).metadata.snm_ceiling.has_value());
}

TEST(Generator, TextRendering) {
  EXPECT_EQ(fact_terms(12, 3), (std::vector<std::string>{"f12t0", "f12t1", "f12t2"}));
  GenParams p;
  p.n_topics = 1;
  p.sentences_per_topic = 3;
  p.terms_per_fact = 2;
  p.noise_terms_per_sentence = 1;
  auto c = gen_corpus(p);
  const auto& s = c.topics[0].sentences[0];
  std::string expected;
  for (auto f : c.facts[0][0].facts) expected += "f" + std::to_string(f) + "t0 f" + std::to_string(f) + "t1 ";
  EXPECT_EQ(s.text.substr(0, expected.size()), expected);
  EXPECT_EQ(s.text[expected.size()], 'n');
}

TEST(Generator, InfeasibleParams) {
  GenParams p;
  p.fact_vocab = 5;
  p.facts_lo = 3;
  p.facts_hi = 9;
  EXPECT_THROW(gen_corpus(p), std::invalid_argument);
  p = {};
  p.facts_lo = 0;
  EXPECT_THROW(gen_corpus(p), std::invalid_argument);
  p = {};
  p.redundancy_bias = 1.5;
  EXPECT_THROW(gen_corpus(p), std::invalid_argument);
  p = {};
  p.fresh_novel_facts = true;
  p.redundancy_bias = 0.0;
  p.fact_vocab = 10;
  EXPECT_THROW(gen_corpus(p), std::invalid_argument);
}

TEST(Generator, Sidecar) {
  GenParams p;
  p.n_topics = 2;
  p.sentences_per_topic = 4;
  auto c = gen_corpus(p);
  std::ostringstream out;
  write_fact_sidecar(out, c);
  std::istringstream in(out.str());
  std::string line;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '#') ++rows;
  }
  EXPECT_EQ(rows, 8u);
  EXPECT_NE(out.str().find("syn001\ts0003\t"), std::string::npos);
}
