#include "noveldetect/factmodel.hpp"

#include <algorithm>
#include <array>
#include <iterator>
#include <ostream>
#include <stdexcept>

#include "noveldetect/random.hpp"

namespace noveldetect::facts {

FactSet make_fact_set(std::vector<FactId> facts) {
  std::sort(facts.begin(), facts.end());
  facts.erase(std::unique(facts.begin(), facts.end()), facts.end());
  return facts;
}

FactSet fact_union(std::span<const FactSentence> sentences) {
  FactSet out;
  for (const auto& s : sentences) out.insert(out.end(), s.facts.begin(), s.facts.end());
  return make_fact_set(std::move(out));
}

FactSet fact_intersection(const FactSet& a, const FactSet& b) {
  FactSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

bool co_holds(const FactSet& a, const FactSet& b) { return std::includes(a.begin(), a.end(), b.begin(), b.end()); }

bool po_holds(const FactSet& a, const FactSet& b) {
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      return true;
    }
  }
  return false;
}

GoldLabel gold_label(std::span<const FactSentence> topic, std::size_t index) {
  if (index >= topic.size()) throw std::out_of_range("gold_label: index out of range");
  const auto& current = topic[index].facts;
  GoldLabel label;
  FactSet covered;
  for (std::size_t p = 0; p < index; ++p) {
    if (!po_holds(topic[p].facts, current)) continue;
    label.po_relatives.push_back(topic[p].sentence_id);
    auto common = fact_intersection(topic[p].facts, current);
    covered.insert(covered.end(), common.begin(), common.end());
  }
  covered = make_fact_set(std::move(covered));
  label.novel = current.empty() || !co_holds(covered, current);
  return label;
}

std::string_view to_string(Property p) {
  switch (p) {
    case Property::co_reflexive:
      return "CO1 reflexivity";
    case Property::co_antisymmetric:
      return "CO2 antisymmetry";
    case Property::co_transitive:
      return "CO3 transitivity";
    case Property::po_reflexive:
      return "PO1 reflexivity";
    case Property::po_symmetric:
      return "PO2 symmetry";
    case Property::po_separation:
      return "PO4 separation of meanings";
    case Property::po_implied_by_co:
      return "PO5 CO implies PO";
    case Property::po_co_expansion:
      return "PO6 CO expansion preserves PO";
    case Property::po_intersection_max:
      return "PO8 intersection is the maximum common part";
  }
  return "?";
}

std::size_t PropertyReport::total_violations() const {
  std::size_t n = 0;
  for (const auto& [p, count] : violations) n += count;
  return n;
}

namespace {

FactSet from_mask(unsigned mask) {
  FactSet s;
  for (FactId f = 0; mask != 0; ++f, mask >>= 1) {
    if (mask & 1U) s.push_back(f);
  }
  return s;
}

template <typename Pred>
std::optional<Triple> search_triples(std::size_t universe_size, Pred pred) {
  if (universe_size == 0 || universe_size > 16) return std::nullopt;
  const unsigned limit = 1U << universe_size;
  for (unsigned a = 1; a < limit; ++a) {
    for (unsigned b = 1; b < limit; ++b) {
      for (unsigned c = 1; c < limit; ++c) {
        Triple t{from_mask(a), from_mask(b), from_mask(c)};
        if (pred(t)) return t;
      }
    }
  }
  return std::nullopt;
}

FactSet random_subset(const FactSet& from, Rng& rng) {
  FactSet out;
  for (auto f : from) {
    if (rng.bernoulli(0.5)) out.push_back(f);
  }
  return out;
}

}  // namespace

std::optional<Triple> find_po_non_transitive(std::size_t universe_size) {
  return search_triples(universe_size, [](const Triple& t) {
    return po_holds(t.a, t.b) && po_holds(t.b, t.c) && !po_holds(t.a, t.c);
  });
}

std::optional<Triple> find_po_not_preserved_by_co(std::size_t universe_size) {
  return search_triples(universe_size, [](const Triple& t) {
    return po_holds(t.a, t.b) && co_holds(t.b, t.c) && !po_holds(t.a, t.c);
  });
}

PropertyReport check_relation_properties(std::span<const FactSentence> sentences, std::size_t triples_budget,
                                         std::uint64_t seed, std::size_t witness_universe) {
  PropertyReport report;
  for (auto p : kCheckedProperties) report.violations[p] = 0;
  for (std::size_t u = 1; u <= witness_universe && !report.po_non_transitive; ++u) {
    report.po_non_transitive = find_po_non_transitive(u);
  }
  for (std::size_t u = 1; u <= witness_universe && !report.po_not_preserved_by_co; ++u) {
    report.po_not_preserved_by_co = find_po_not_preserved_by_co(u);
  }
  if (sentences.empty()) return report;

  Rng rng(seed);
  auto fail = [&](Property p, bool ok) {
    if (!ok) ++report.violations[p];
  };
  for (std::size_t t = 0; t < triples_budget; ++t) {
    const auto& a = sentences[rng.below(sentences.size())].facts;
    const auto& b = sentences[rng.below(sentences.size())].facts;
    const auto& c = sentences[rng.below(sentences.size())].facts;
    ++report.triples_checked;

    fail(Property::co_reflexive, co_holds(a, a));
    fail(Property::co_antisymmetric, !(co_holds(a, b) && co_holds(b, a)) || a == b);
    fail(Property::co_transitive, !(co_holds(a, b) && co_holds(b, c)) || co_holds(a, c));
    fail(Property::po_reflexive, a.empty() || po_holds(a, a));
    fail(Property::po_symmetric, po_holds(a, b) == po_holds(b, a));
    fail(Property::po_implied_by_co, !(co_holds(a, b) && !b.empty()) || po_holds(a, b));
    fail(Property::po_co_expansion, !(co_holds(a, b) && po_holds(b, c)) || po_holds(a, c));
    if (po_holds(a, b)) {
      auto common = fact_intersection(a, b);
      fail(Property::po_separation, !common.empty() && co_holds(a, common) && co_holds(b, common));
      bool maximal = !common.empty();
      FactSet probe_union;
      std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(probe_union));
      for (const FactSet* probe : std::array<const FactSet*, 2>{&c, &common}) {
        if (co_holds(a, *probe) && co_holds(b, *probe) && !co_holds(common, *probe)) maximal = false;
      }
      auto sampled = random_subset(probe_union, rng);
      if (co_holds(a, sampled) && co_holds(b, sampled) && !co_holds(common, sampled)) maximal = false;
      fail(Property::po_intersection_max, maximal);
    }
  }
  return report;
}

std::string_view to_string(RedundancySource s) {
  return s == RedundancySource::any_seen ? "any_seen" : "single_sentence";
}

RedundancySource parse_redundancy_source(std::string_view name) {
  if (name == "any_seen") return RedundancySource::any_seen;
  if (name == "single_sentence") return RedundancySource::single_sentence;
  throw std::invalid_argument("unknown redundancy source '" + std::string(name) + "'");
}

void GenParams::validate() const {
  auto bad = [](const std::string& what) { throw std::invalid_argument("infeasible generator params: " + what); };
  if (n_topics == 0) bad("n_topics must be positive");
  if (sentences_per_topic == 0) bad("sentences_per_topic must be positive");
  if (fact_vocab == 0) bad("fact_vocab must be positive");
  if (facts_lo < 1) bad("facts_per_sentence lower bound must be >= 1");
  if (facts_lo > facts_hi) bad("facts_per_sentence lower bound exceeds upper bound");
  if (facts_hi > fact_vocab) bad("facts_per_sentence upper bound exceeds fact_vocab");
  if (!(redundancy_bias >= 0.0 && redundancy_bias <= 1.0)) bad("redundancy_bias must lie in [0,1]");
  if (terms_per_fact == 0) bad("terms_per_fact must be positive");
  if (noise_terms_per_sentence > 0 && noise_vocab == 0) bad("noise_vocab must be positive when noise is on");
  if (fact_vocab > (std::size_t{1} << 31)) bad("fact_vocab too large");
}

std::vector<std::string> fact_terms(FactId fact, std::size_t terms_per_fact) {
  std::vector<std::string> terms;
  terms.reserve(terms_per_fact);
  for (std::size_t k = 0; k < terms_per_fact; ++k) {
    terms.push_back("f" + std::to_string(fact) + "t" + std::to_string(k));
  }
  return terms;
}

namespace {

// k distinct values from `pool`, moved to its tail and returned.
std::vector<FactId> draw_distinct(std::vector<FactId>& pool, std::size_t k, Rng& rng) {
  std::vector<FactId> out;
  out.reserve(k);
  std::size_t n = pool.size();
  for (std::size_t i = 0; i < k; ++i) {
    std::size_t j = static_cast<std::size_t>(rng.below(n - i));
    std::swap(pool[j], pool[n - i - 1]);
    out.push_back(pool[n - i - 1]);
  }
  return out;
}

// Floyd's algorithm: k distinct values from [0, n).
std::vector<FactId> draw_distinct_range(std::size_t n, std::size_t k, Rng& rng) {
  std::vector<FactId> out;
  out.reserve(k);
  for (std::size_t j = n - k; j < n; ++j) {
    auto t = static_cast<FactId>(rng.below(j + 1));
    if (std::find(out.begin(), out.end(), t) == out.end()) {
      out.push_back(t);
    } else {
      out.push_back(static_cast<FactId>(j));
    }
  }
  return out;
}

std::string topic_name(std::size_t t) {
  std::string digits = std::to_string(t);
  if (digits.size() < 3) digits.insert(0, 3 - digits.size(), '0');
  return "syn" + digits;
}

std::string sentence_name(std::size_t i) {
  std::string digits = std::to_string(i);
  if (digits.size() < 4) digits.insert(0, 4 - digits.size(), '0');
  return "s" + digits;
}

}  // namespace

SyntheticCorpus gen_corpus(const GenParams& params) {
  params.validate();
  SyntheticCorpus corpus;
  corpus.topics.reserve(params.n_topics);
  corpus.facts.reserve(params.n_topics);

  for (std::size_t t = 0; t < params.n_topics; ++t) {
    Rng rng(splitmix64(params.seed ^ splitmix64(t + 1)));
    Topic topic{topic_name(t), {}};
    std::vector<FactSentence> fact_sentences;
    std::vector<FactId> seen;
    std::vector<bool> is_seen(params.fact_vocab, false);
    std::vector<FactId> unused;
    if (params.fresh_novel_facts) {
      unused.resize(params.fact_vocab);
      for (std::size_t f = 0; f < params.fact_vocab; ++f) unused[f] = static_cast<FactId>(f);
    }

    for (std::size_t i = 0; i < params.sentences_per_topic; ++i) {
      std::size_t k = params.facts_lo + static_cast<std::size_t>(rng.below(params.facts_hi - params.facts_lo + 1));
      std::vector<FactId> drawn;
      if (i > 0 && rng.bernoulli(params.redundancy_bias)) {
        if (params.redundancy_source == RedundancySource::any_seen) {
          std::vector<FactId> pool = seen;
          drawn = draw_distinct(pool, std::min(k, pool.size()), rng);
        } else {
          std::vector<FactId> pool = fact_sentences[rng.below(i)].facts;
          drawn = draw_distinct(pool, std::min(k, pool.size()), rng);
        }
      } else if (params.fresh_novel_facts) {
        if (unused.size() < k) {
          throw std::invalid_argument("infeasible generator params: fact vocabulary exhausted in topic " +
                                      topic.topic_id);
        }
        drawn = draw_distinct(unused, k, rng);
        unused.resize(unused.size() - k);
      } else {
        drawn = draw_distinct_range(params.fact_vocab, k, rng);
      }

      FactSet facts = make_fact_set(std::move(drawn));
      for (auto f : facts) {
        if (!is_seen[f]) {
          is_seen[f] = true;
          seen.push_back(f);
        }
      }

      std::string text;
      for (auto f : facts) {
        for (const auto& term : fact_terms(f, params.terms_per_fact)) {
          if (!text.empty()) text += ' ';
          text += term;
        }
      }
      for (std::size_t n = 0; n < params.noise_terms_per_sentence; ++n) {
        text += " n" + std::to_string(rng.below(params.noise_vocab));
      }

      SentenceRecord rec;
      rec.topic_id = topic.topic_id;
      rec.sentence_id = sentence_name(i);
      rec.seq = i;
      rec.text = std::move(text);
      topic.sentences.push_back(std::move(rec));
      fact_sentences.push_back({topic.sentences.back().sentence_id, std::move(facts)});
    }

    for (std::size_t i = 0; i < fact_sentences.size(); ++i) {
      auto label = gold_label(fact_sentences, i);
      auto& rec = topic.sentences[i];
      rec.gold_novel = label.novel;
      rec.gold_po = std::move(label.po_relatives);
      ++corpus.metadata.n_sentences;
      if (label.novel) continue;
      ++corpus.metadata.n_redundant;
      bool single = false;
      for (std::size_t p = 0; p < i && !single; ++p) single = co_holds(fact_sentences[p].facts, fact_sentences[i].facts);
      if (!single) ++corpus.metadata.n_union_only;
    }

    corpus.topics.push_back(std::move(topic));
    corpus.facts.push_back(std::move(fact_sentences));
  }
  if (params.noise_terms_per_sentence == 0) corpus.metadata.snm_ceiling = 1.0;
  return corpus;
}

void write_fact_sidecar(std::ostream& out, const SyntheticCorpus& corpus) {
  const auto& m = corpus.metadata;
  out << "# noveldetect fact sidecar\n";
  out << "# sentences: " << m.n_sentences << '\n';
  out << "# redundant: " << m.n_redundant << '\n';
  out << "# union_only_redundant: " << m.n_union_only << '\n';
  out << "# snm_ceiling: " << (m.snm_ceiling ? std::to_string(*m.snm_ceiling) : std::string("unknown")) << '\n';
  for (std::size_t t = 0; t < corpus.topics.size(); ++t) {
    for (const auto& fs : corpus.facts[t]) {
      out << corpus.topics[t].topic_id << '\t' << fs.sentence_id << '\t';
      for (std::size_t k = 0; k < fs.facts.size(); ++k) out << (k ? "," : "") << fs.facts[k];
      out << '\n';
    }
  }
}

}  // namespace noveldetect::facts
