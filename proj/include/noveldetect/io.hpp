#pragma once

#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "noveldetect/corpus.hpp"
#include "noveldetect/detectors.hpp"
#include "noveldetect/eval.hpp"
#include "noveldetect/metrics.hpp"

namespace noveldetect {

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TopicJudgments {
  std::string topic_id;
  std::vector<Judgment> judgments;  // ascending seq
};

struct RunFile {
  std::string label;
  std::vector<TopicJudgments> topics;
};

/// Tab-separated: topic_id, sentence_id, redundant (1/0), score with six
/// decimals, comma-joined spo ids ("-" when empty).
void write_run(std::ostream& out, const RunFile& run);
RunFile read_run(std::istream& in);

/// Reorders run topics to match `corpus`. Throws FormatError when a corpus
/// topic has no judgments, or when the run has extra topics and
/// `allow_extra` is false.
std::vector<std::vector<Judgment>> align_run(const RunFile& run, std::span<const Topic> corpus,
                                             bool allow_extra = false);

struct ReportColumns {
  bool mistake = true;
  bool spsm = true;
  bool psm = false;
};

/// Per-topic rows and an ALL summary row; numbers with four decimals.
void write_metric_report(std::ostream& out, const MetricReport& report, const std::string& label,
                         const ReportColumns& columns);

void write_tune_report(std::ostream& out, const TuneResult& result, Objective objective);
void write_loo_report(std::ostream& out, const LooResult& result, Objective objective);

struct CompareRow {
  std::string topic_id;
  double a = 0.0;
  double b = 0.0;
};

void write_compare_report(std::ostream& out, const std::string& metric, const std::string& label_a,
                          const std::string& label_b, std::span<const CompareRow> rows, const TTestResult& t);

}  // namespace noveldetect
