#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "noveldetect/corpus.hpp"
#include "noveldetect/kernels.hpp"

namespace noveldetect {

using TermId = kernels::TermId;

struct TokenizerConfig {
  bool lowercase = true;
  std::optional<std::set<std::string>> stopwords;
  std::size_t min_token_len = 1;  // in code points, >= 1
};

/// Reads `key=value` lines: lowercase, min_token_len, stopwords_file.
/// Relative stopword paths resolve against the config file's directory.
TokenizerConfig load_tokenizer_config(const std::filesystem::path& path);

/// One term per line; blank lines and `#` comments are skipped.
std::set<std::string> load_stopwords(const std::filesystem::path& path);

std::vector<std::string> tokenize(std::string_view text, const TokenizerConfig& config);

/// Per-topic document frequencies over a topic-local term vocabulary.
/// Term ids are assigned in order of first appearance.
class TopicStats {
 public:
  std::size_t n_sentences() const { return n_sentences_; }
  std::size_t vocabulary_size() const { return terms_.size(); }
  std::optional<TermId> find(std::string_view term) const;
  const std::string& term(TermId id) const { return terms_.at(id); }
  /// 0 for terms not seen in the topic.
  std::size_t df(std::string_view term) const;
  std::size_t df(TermId id) const { return df_.at(id); }

 private:
  friend TopicStats build_topic_stats(const Topic&, const TokenizerConfig&);

  std::size_t n_sentences_ = 0;
  std::vector<std::string> terms_;
  std::vector<std::size_t> df_;
  std::unordered_map<std::string, TermId> index_;
};

TopicStats build_topic_stats(const Topic& topic, const TokenizerConfig& config);

/// Sparse non-negative weights keyed by term id, sorted by id, without zero
/// entries. `l1()` is computed with the lane-ordered kernel sum so it matches
/// the detector numerators exactly.
class WeightedVector {
 public:
  WeightedVector() = default;

  /// Duplicate ids are summed; non-positive weights are dropped.
  static WeightedVector from_pairs(std::vector<std::pair<TermId, double>> entries);

  bool empty() const { return ids_.empty(); }
  std::size_t size() const { return ids_.size(); }
  std::span<const TermId> ids() const { return ids_; }
  std::span<const double> weights() const { return weights_; }
  double l1() const { return l1_; }
  double weight(TermId id) const;
  /// One past the largest id, 0 when empty.
  std::size_t dimension() const { return ids_.empty() ? 0 : std::size_t{ids_.back()} + 1; }

  bool operator==(const WeightedVector&) const = default;

 private:
  std::vector<TermId> ids_;
  std::vector<double> weights_;
  double l1_ = 0.0;
};

/// tf(t) * ln((n_sentences + 1) / df(t)). Terms missing from `stats` are
/// dropped.
WeightedVector vectorize(const SentenceRecord& sentence, const TopicStats& stats, const TokenizerConfig& config);

}  // namespace noveldetect
