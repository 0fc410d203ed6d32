#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace noveldetect {

/// One unit of a chronologically ordered topic. Documents and sentences are
/// handled the same way.
struct SentenceRecord {
  std::string topic_id;
  std::string sentence_id;
  std::size_t seq = 0;
  std::string text;
  std::optional<bool> gold_novel;
  /// Earlier sentences that share meaning with this one.
  std::optional<std::vector<std::string>> gold_po;

  bool operator==(const SentenceRecord&) const = default;
};

struct Topic {
  std::string topic_id;
  std::vector<SentenceRecord> sentences;  // ascending seq

  bool operator==(const Topic&) const = default;
};

/// Raised for malformed input. `line()` is 1-based, 0 when not tied to a line.
class CorpusError : public std::runtime_error {
 public:
  CorpusError(std::size_t line, const std::string& what);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

struct ParseOptions {
  /// Strict mode additionally enforces contiguous seq numbering and rejects
  /// redundant sentences whose gold_po is present but empty.
  bool strict = true;
  char delimiter = '\t';
};

std::vector<Topic> parse_corpus(const std::filesystem::path& path, const ParseOptions& options = {});
std::vector<Topic> parse_corpus(std::istream& in, const ParseOptions& options = {});

/// Writes the canonical line format. Records whose text contains the
/// delimiter or a newline are written in the JSON-object form.
void write_corpus(std::ostream& out, const std::vector<Topic>& topics, char delimiter = '\t');

struct GoldReport {
  std::string topic_id;
  std::size_t n_sentences = 0;
  std::size_t n_with_novelty = 0;
  std::size_t n_gold_redundant = 0;
  std::size_t n_redundant_with_po = 0;
  std::vector<std::string> violations;

  bool novelty_complete() const { return n_sentences > 0 && n_with_novelty == n_sentences; }
  /// SNM, SPSM and mistake rate only need novelty labels.
  bool snm_computable() const { return novelty_complete(); }
  bool psm_computable() const {
    return novelty_complete() && n_redundant_with_po == n_gold_redundant && violations.empty();
  }
  std::string summary() const;
};

GoldReport validate_gold(const Topic& topic);

}  // namespace noveldetect
