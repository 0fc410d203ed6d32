#pragma once

// Sentences as finite sets of atomic facts. This is the strongest reading of
// the partial-overlap (PO) and complete-overlap (CO) relations, which makes
// it usable as ground truth for synthetic corpora.

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "noveldetect/corpus.hpp"

namespace noveldetect::facts {

using FactId = std::uint32_t;

/// Sorted, duplicate-free fact ids.
using FactSet = std::vector<FactId>;

FactSet make_fact_set(std::vector<FactId> facts);

struct FactSentence {
  std::string sentence_id;
  FactSet facts;  // non-empty
};

FactSet fact_union(std::span<const FactSentence> sentences);
FactSet fact_intersection(const FactSet& a, const FactSet& b);

/// a >co b: a contains every fact of b.
bool co_holds(const FactSet& a, const FactSet& b);
inline bool co_holds(const FactSentence& a, const FactSentence& b) { return co_holds(a.facts, b.facts); }

/// a >po b: a and b share at least one fact.
bool po_holds(const FactSet& a, const FactSet& b);
inline bool po_holds(const FactSentence& a, const FactSentence& b) { return po_holds(a.facts, b.facts); }

struct GoldLabel {
  bool novel = true;
  std::vector<std::string> po_relatives;  // ascending seq
};

/// Gold novelty of sentence `index` given every sentence before it.
/// Throws std::out_of_range for a bad index.
GoldLabel gold_label(std::span<const FactSentence> topic, std::size_t index);

enum class Property {
  co_reflexive,
  co_antisymmetric,
  co_transitive,
  po_reflexive,
  po_symmetric,
  po_separation,        // PO implies a non-empty common part both CO-cover
  po_implied_by_co,     // CO with non-empty b implies PO
  po_co_expansion,      // a >co b and b >po c imply a >po c
  po_intersection_max,  // a ∩ b is the largest common part
};

inline constexpr std::array kCheckedProperties = {
    Property::co_reflexive,    Property::co_antisymmetric, Property::co_transitive,
    Property::po_reflexive,    Property::po_symmetric,     Property::po_separation,
    Property::po_implied_by_co, Property::po_co_expansion, Property::po_intersection_max,
};

std::string_view to_string(Property p);

struct Triple {
  FactSet a, b, c;
};

struct PropertyReport {
  std::size_t triples_checked = 0;
  std::map<Property, std::size_t> violations;  // zero entries included
  /// a >po b, b >po c, not a >po c.
  std::optional<Triple> po_non_transitive;
  /// a >po b, b >co c, not a >po c.
  std::optional<Triple> po_not_preserved_by_co;

  std::size_t total_violations() const;
};

/// Samples `triples_budget` triples (with replacement) from `sentences` and
/// checks every property in kCheckedProperties on each. Non-properties are
/// witnessed by exhaustive search over a universe of `witness_universe` facts.
PropertyReport check_relation_properties(std::span<const FactSentence> sentences, std::size_t triples_budget,
                                         std::uint64_t seed, std::size_t witness_universe = 4);

/// First triple of non-empty subsets of {0..universe_size-1}, in bitmask
/// order, with a >po b, b >po c and not a >po c.
std::optional<Triple> find_po_non_transitive(std::size_t universe_size);

/// First triple with a >po b, b >co c (c non-empty) and not a >po c.
std::optional<Triple> find_po_not_preserved_by_co(std::size_t universe_size);

enum class RedundancySource {
  any_seen,         // facts drawn from everything earlier in the topic
  single_sentence,  // facts drawn from one earlier sentence
};

struct GenParams {
  std::size_t n_topics = 10;
  std::size_t sentences_per_topic = 50;
  std::size_t fact_vocab = 200;
  std::size_t facts_lo = 1;
  std::size_t facts_hi = 3;
  double redundancy_bias = 0.3;
  std::size_t terms_per_fact = 2;
  std::size_t noise_terms_per_sentence = 0;
  std::size_t noise_vocab = 100;
  RedundancySource redundancy_source = RedundancySource::any_seen;
  /// Non-redundant draws take only facts unused so far in the topic.
  bool fresh_novel_facts = false;
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument for infeasible settings.
  void validate() const;
};

std::string_view to_string(RedundancySource s);
RedundancySource parse_redundancy_source(std::string_view name);

struct GenMetadata {
  std::size_t n_sentences = 0;
  std::size_t n_redundant = 0;
  /// Redundant sentences that no single earlier sentence covers.
  std::size_t n_union_only = 0;
  /// SNM reachable by a detector that recovers facts from terms exactly.
  /// Known to be 1 when there are no noise terms.
  std::optional<double> snm_ceiling;

  double union_only_fraction() const {
    return n_redundant == 0 ? 0.0 : static_cast<double>(n_union_only) / static_cast<double>(n_redundant);
  }
};

struct SyntheticCorpus {
  std::vector<Topic> topics;
  std::vector<std::vector<FactSentence>> facts;  // parallel to topics
  GenMetadata metadata;
};

SyntheticCorpus gen_corpus(const GenParams& params);

/// Term rendering of one fact: f<id>t0 ... f<id>t{k-1}. No underscore, since
/// the tokenizer would split on it.
std::vector<std::string> fact_terms(FactId fact, std::size_t terms_per_fact);

/// Audit sidecar: metadata comments, then topic_id, sentence_id and the
/// comma-joined sorted facts per line.
void write_fact_sidecar(std::ostream& out, const SyntheticCorpus& corpus);

}  // namespace noveldetect::facts
