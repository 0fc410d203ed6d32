#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "noveldetect/corpus.hpp"
#include "noveldetect/detectors.hpp"
#include "noveldetect/metrics.hpp"
#include "noveldetect/textvec.hpp"

namespace noveldetect {

class EvalError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A topic with its TFIDF vectors computed once.
struct PreparedTopic {
  Topic topic;
  std::vector<SentenceVector> vectors;
};

PreparedTopic prepare_topic(const Topic& topic, const TokenizerConfig& config);
std::vector<PreparedTopic> prepare_topics(std::span<const Topic> topics, const TokenizerConfig& config);

struct Grid {
  std::vector<double> alphas;
  std::vector<double> betas;  // selected_pool only

  /// Throws EvalError unless alphas are non-empty, ascending, unique and in
  /// [0,1], and betas are non-empty exactly when `method` is selected_pool.
  void validate(Method method) const;
};

/// 0.05, 0.10, ..., 0.95 for alpha, and for beta when selected_pool.
Grid default_grid(Method method);

enum class Objective { mean_f, total_errors };
std::string_view to_string(Objective o);
Objective parse_objective(std::string_view name);

struct GridPointResult {
  double alpha = 0.0;
  std::optional<double> beta;
  double objective = 0.0;
};

struct TuneResult {
  DetectorParams best;
  double best_objective = 0.0;
  std::vector<GridPointResult> table;  // alpha-major, beta-minor
};

/// Per-point, per-topic scores. Rows follow the grid order, columns follow
/// the topics sorted by topic_id so reductions do not depend on input order.
struct GridTable {
  std::vector<DetectorParams> points;
  std::vector<std::string> topic_ids;      // sorted
  std::vector<std::vector<double>> f;      // [point][topic]
  std::vector<std::vector<std::size_t>> errors;
};

GridTable evaluate_grid(std::span<const PreparedTopic> topics, const DetectorParams& base, const Grid& grid);

/// Exhaustive search. Maximizes mean F or minimizes total errors; ties go
/// to the smaller alpha, then the smaller beta. `base` supplies method and
/// pool options.
TuneResult grid_search(std::span<const PreparedTopic> topics, const DetectorParams& base, const Grid& grid,
                       Objective objective);

struct LooRow {
  std::string topic_id;
  DetectorParams params;  // trained on the other topics
  TopicMetrics metrics;
};

struct LooResult {
  std::vector<LooRow> rows;  // sorted by topic_id
  double mean_f = 0.0;
  double mean_mistake_rate = 0.0;
  std::size_t total_errors = 0;
};

/// Leave-one-out: each topic is judged with the parameters that win on all
/// the other topics. Needs at least two topics.
LooResult loo(std::span<const PreparedTopic> topics, const DetectorParams& base, const Grid& grid,
              Objective objective);

struct TTestResult {
  double t_statistic = 0.0;
  std::size_t degrees_of_freedom = 0;
  double p_two_sided = 1.0;
  std::size_t n_pairs = 0;
  double mean_difference = 0.0;
  /// Zero-variance differences with a non-zero mean: t is +-infinity, p = 0.
  bool infinite = false;
};

/// Paired two-sided t-test on xs - ys. Throws EvalError on length mismatch
/// or fewer than two pairs.
TTestResult paired_t(std::span<const double> xs, std::span<const double> ys);

/// Two-sided tail probability of Student's t with `df` degrees of freedom.
double t_two_sided_p(double t, double df);

}  // namespace noveldetect
