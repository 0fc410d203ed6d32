#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "noveldetect/corpus.hpp"
#include "noveldetect/detectors.hpp"

namespace noveldetect {

class MetricError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Per-topic confusion of a run against gold novelty labels. "Returned"
/// means judged novel.
struct ConfusionCounts {
  std::size_t n_total = 0;               // |C|
  std::size_t n_gold_redundant = 0;      // |R|
  std::size_t n_returned = 0;            // |A_N|
  std::size_t n_returned_novel = 0;      // |A_N|_N
  std::size_t n_returned_redundant = 0;  // |A_N|_R
  std::size_t n_misses = 0;              // gold redundant, judged novel
  std::size_t n_false_alarms = 0;        // gold novel, judged redundant

  std::size_t n_gold_novel() const { return n_total - n_gold_redundant; }
  std::size_t mistakes() const { return n_misses + n_false_alarms; }
  bool consistent() const;
};

/// Throws MetricError when a sentence lacks gold_novel or the judgment ids
/// do not line up with the topic.
ConfusionCounts confusion(std::span<const Judgment> judgments, const Topic& gold);

struct Snm {
  double precision = 0.0;
  double recall = 0.0;
  double f = 0.0;
};

double f_measure(double precision, double recall);
Snm snm(const ConfusionCounts& counts);

/// (misses + false alarms) / |C|.
double mistake_rate(const ConfusionCounts& counts);

/// Exact rational value numerator / denominator.
struct Fraction {
  std::int64_t numerator = 0;
  std::int64_t denominator = 1;
  double value() const { return static_cast<double>(numerator) / static_cast<double>(denominator); }
  bool operator==(const Fraction&) const = default;
};

/// Simplified pairwise measure, closed form
/// (|A_N|_N - |A_N|_R - (|C| - 2|R|)) / |R|. Undefined when |R| = 0.
std::optional<Fraction> spsm(const ConfusionCounts& counts);

/// Same measure written as (|R| - misses - false alarms) / |R|.
std::optional<Fraction> spsm_from_mistakes(const ConfusionCounts& counts);

struct PairCounts {
  std::size_t misclassified = 0;
  std::size_t total = 0;
  /// 1 - misclassified / total; may be negative.
  double value() const { return 1.0 - static_cast<double>(misclassified) / static_cast<double>(total); }
  Fraction as_fraction() const {
    return {static_cast<std::int64_t>(total) - static_cast<std::int64_t>(misclassified),
            static_cast<std::int64_t>(total)};
  }
};

/// Pairwise sentence measure over gold PO pairs. Undefined (nullopt) when
/// the topic has no gold pairs. Throws MetricError when a gold-redundant
/// sentence lacks gold_po or an SPO entry is not an earlier sentence.
std::optional<PairCounts> psm(std::span<const Judgment> judgments, const Topic& gold);

/// psm() with every PO and SPO set collapsed to an indicator: one pair per
/// gold-redundant sentence, one per judged-redundant sentence, and agreeing
/// covering sets wherever both are redundant. Needs only novelty labels.
std::optional<PairCounts> psm_indicator(std::span<const Judgment> judgments, const Topic& gold);

/// Precision above which an extra returned set is guaranteed to raise F.
double f_augmentation_cutoff(double precision, double recall);

struct TopicMetrics {
  std::string topic_id;
  ConfusionCounts counts;
  Snm snm;
  double mistake_rate = 0.0;
  std::optional<double> spsm;
  std::optional<double> psm;
};

struct MetricReport {
  std::vector<TopicMetrics> topics;
  std::size_t n_returned = 0;        // #ret
  std::size_t n_returned_novel = 0;  // #novel
  double mean_precision = 0.0;       // Av.P
  double mean_recall = 0.0;          // Av.R
  double mean_f = 0.0;               // Av.F
  double mean_mistake_rate = 0.0;
  std::optional<double> mean_spsm;   // over topics where defined
  std::size_t spsm_excluded = 0;
  std::optional<double> mean_psm;
  std::size_t psm_excluded = 0;
  std::size_t total_mistakes = 0;
};

TopicMetrics evaluate_topic(std::span<const Judgment> judgments, const Topic& gold, bool with_psm);

/// `judgments[i]` belongs to `gold[i]`. Averages are unweighted over topics.
MetricReport evaluate_run(std::span<const Topic> gold, std::span<const std::vector<Judgment>> judgments,
                          bool with_psm);

}  // namespace noveldetect
