#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "noveldetect/textvec.hpp"

namespace noveldetect {

enum class Method { similarity, overlap, pool, selected_pool };
enum class PoolScope { all_previous, novel_only };
enum class PoolAggregation { max, sum };

std::string_view to_string(Method m);
std::string_view to_string(PoolScope s);
std::string_view to_string(PoolAggregation a);
/// Throws std::invalid_argument on unknown names.
Method parse_method(std::string_view name);
PoolScope parse_pool_scope(std::string_view name);
PoolAggregation parse_pool_aggregation(std::string_view name);

struct DetectorParams {
  Method method = Method::overlap;
  double alpha = 0.7;           // redundancy threshold
  std::optional<double> beta;   // selection threshold, selected_pool only
  PoolScope pool_scope = PoolScope::all_previous;
  PoolAggregation pool_aggregation = PoolAggregation::max;

  /// Throws std::invalid_argument when a threshold is outside [0,1] or beta is
  /// missing for selected_pool.
  void validate() const;
};

/// Run label: s0.4, o0.7, p0.7, sp0.7s2.0. The selection threshold appears
/// scaled by 8.
std::string run_label(const DetectorParams& params);

struct Judgment {
  std::string sentence_id;
  bool redundant = false;
  double score = 0.0;
  std::vector<std::string> spo;  // covering set, ascending seq

  bool operator==(const Judgment&) const = default;
};

/// Weighted Jaccard: sum of min over sum of max. 0 when both are empty.
double sim(const WeightedVector& a, const WeightedVector& b);

/// Share of `b` covered by the earlier sentence `a`. 0 when `b` is empty.
double overlap(const WeightedVector& a, const WeightedVector& b);

WeightedVector pool_union(std::span<const WeightedVector> members, PoolAggregation aggregation);

struct SentenceVector {
  std::string sentence_id;
  std::size_t seq = 0;
  WeightedVector vector;
};

class DetectorError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Streams over one topic in seq order and judges every sentence against
/// the sentences before it. Empty vectors are judged novel and never pooled.
/// Throws DetectorError for unordered input or invalid params.
std::vector<Judgment> judge_topic(std::span<const SentenceVector> topic, const DetectorParams& params);

}  // namespace noveldetect
