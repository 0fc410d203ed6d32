#include "noveldetect/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <boost/math/special_functions/beta.hpp>

namespace noveldetect {

PreparedTopic prepare_topic(const Topic& topic, const TokenizerConfig& config) {
  PreparedTopic out{topic, {}};
  auto stats = build_topic_stats(topic, config);
  out.vectors.reserve(topic.sentences.size());
  for (const auto& s : topic.sentences) out.vectors.push_back({s.sentence_id, s.seq, vectorize(s, stats, config)});
  return out;
}

std::vector<PreparedTopic> prepare_topics(std::span<const Topic> topics, const TokenizerConfig& config) {
  std::vector<PreparedTopic> out;
  out.reserve(topics.size());
  for (const auto& t : topics) out.push_back(prepare_topic(t, config));
  return out;
}

namespace {

void validate_axis(const std::vector<double>& values, const char* name) {
  if (values.empty()) throw EvalError(std::string("grid ") + name + " must not be empty");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] >= 0.0 && values[i] <= 1.0)) throw EvalError(std::string("grid ") + name + " outside [0,1]");
    if (i > 0 && !(values[i] > values[i - 1])) {
      throw EvalError(std::string("grid ") + name + " must be strictly ascending");
    }
  }
}

std::vector<double> twentieths() {
  std::vector<double> v;
  for (int k = 1; k <= 19; ++k) v.push_back(k / 20.0);
  return v;
}

// Column order: topics sorted by id.
std::vector<std::size_t> sorted_order(std::span<const PreparedTopic> topics) {
  std::vector<std::size_t> order(topics.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return topics[a].topic.topic_id < topics[b].topic.topic_id;
  });
  return order;
}

double point_objective(const GridTable& table, std::size_t p, const std::vector<bool>& include,
                       Objective objective) {
  double value = 0.0;
  std::size_t n = 0;
  for (std::size_t col = 0; col < include.size(); ++col) {
    if (!include[col]) continue;
    value += objective == Objective::mean_f ? table.f[p][col] : static_cast<double>(table.errors[p][col]);
    ++n;
  }
  if (objective == Objective::mean_f && n > 0) value /= static_cast<double>(n);
  return value;
}

// Index of the winning point over the columns where include[col] is set.
// Points are in alpha-major order, so keeping the first of equal values
// breaks ties toward smaller alpha, then smaller beta.
std::size_t best_point(const GridTable& table, const std::vector<bool>& include, Objective objective) {
  std::size_t best = 0;
  double best_value = 0.0;
  for (std::size_t p = 0; p < table.points.size(); ++p) {
    double value = point_objective(table, p, include, objective);
    bool better = p == 0 || (objective == Objective::mean_f ? value > best_value : value < best_value);
    if (better) {
      best = p;
      best_value = value;
    }
  }
  return best;
}

}  // namespace

void Grid::validate(Method method) const {
  validate_axis(alphas, "alphas");
  if (method == Method::selected_pool) {
    validate_axis(betas, "betas");
  } else if (!betas.empty()) {
    throw EvalError("grid betas are only used by selected_pool");
  }
}

Grid default_grid(Method method) {
  Grid g{twentieths(), {}};
  if (method == Method::selected_pool) g.betas = twentieths();
  return g;
}

std::string_view to_string(Objective o) { return o == Objective::mean_f ? "mean_f" : "total_errors"; }

Objective parse_objective(std::string_view name) {
  if (name == "mean_f") return Objective::mean_f;
  if (name == "total_errors") return Objective::total_errors;
  throw EvalError("unknown objective '" + std::string(name) + "'");
}

GridTable evaluate_grid(std::span<const PreparedTopic> topics, const DetectorParams& base, const Grid& grid) {
  grid.validate(base.method);
  GridTable table;
  for (double a : grid.alphas) {
    if (base.method == Method::selected_pool) {
      for (double b : grid.betas) {
        DetectorParams p = base;
        p.alpha = a;
        p.beta = b;
        table.points.push_back(p);
      }
    } else {
      DetectorParams p = base;
      p.alpha = a;
      p.beta.reset();
      table.points.push_back(p);
    }
  }
  auto order = sorted_order(topics);
  for (auto i : order) table.topic_ids.push_back(topics[i].topic.topic_id);
  table.f.assign(table.points.size(), std::vector<double>(order.size(), 0.0));
  table.errors.assign(table.points.size(), std::vector<std::size_t>(order.size(), 0));
  for (std::size_t p = 0; p < table.points.size(); ++p) {
    for (std::size_t col = 0; col < order.size(); ++col) {
      const auto& t = topics[order[col]];
      auto judgments = judge_topic(t.vectors, table.points[p]);
      auto counts = confusion(judgments, t.topic);
      table.f[p][col] = snm(counts).f;
      table.errors[p][col] = counts.mistakes();
    }
  }
  return table;
}

TuneResult grid_search(std::span<const PreparedTopic> topics, const DetectorParams& base, const Grid& grid,
                       Objective objective) {
  if (topics.empty()) throw EvalError("grid_search needs at least one topic");
  auto table = evaluate_grid(topics, base, grid);
  std::vector<bool> all(table.topic_ids.size(), true);
  TuneResult result;
  for (std::size_t p = 0; p < table.points.size(); ++p) {
    result.table.push_back({table.points[p].alpha, table.points[p].beta, point_objective(table, p, all, objective)});
  }
  std::size_t best = best_point(table, all, objective);
  result.best = table.points[best];
  result.best_objective = result.table[best].objective;
  return result;
}

LooResult loo(std::span<const PreparedTopic> topics, const DetectorParams& base, const Grid& grid,
              Objective objective) {
  if (topics.size() < 2) throw EvalError("leave-one-out needs at least two topics");
  auto table = evaluate_grid(topics, base, grid);
  auto order = sorted_order(topics);
  LooResult result;
  for (std::size_t held = 0; held < order.size(); ++held) {
    std::vector<bool> include(order.size(), true);
    include[held] = false;
    const auto& params = table.points[best_point(table, include, objective)];
    const auto& t = topics[order[held]];
    auto judgments = judge_topic(t.vectors, params);
    LooRow row{t.topic.topic_id, params, evaluate_topic(judgments, t.topic, false)};
    result.mean_f += row.metrics.snm.f;
    result.mean_mistake_rate += row.metrics.mistake_rate;
    result.total_errors += row.metrics.counts.mistakes();
    result.rows.push_back(std::move(row));
  }
  result.mean_f /= static_cast<double>(order.size());
  result.mean_mistake_rate /= static_cast<double>(order.size());
  return result;
}

double t_two_sided_p(double t, double df) {
  if (std::isinf(t)) return 0.0;
  if (t == 0.0) return 1.0;
  const double x = df / (df + t * t);
  return std::clamp(boost::math::ibeta(df / 2.0, 0.5, x), 0.0, 1.0);
}

TTestResult paired_t(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw EvalError("paired_t: inputs differ in length");
  if (xs.size() < 2) throw EvalError("paired_t: needs at least two pairs");
  const std::size_t n = xs.size();
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = xs[i] - ys[i];
  const double mean = std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(n);
  double ss = 0.0;
  for (double v : d) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));

  TTestResult r;
  r.n_pairs = n;
  r.degrees_of_freedom = n - 1;
  r.mean_difference = mean;
  if (sd == 0.0) {
    if (mean == 0.0) {
      r.t_statistic = 0.0;
      r.p_two_sided = 1.0;
    } else {
      r.infinite = true;
      r.t_statistic = mean > 0.0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
      r.p_two_sided = 0.0;
    }
    return r;
  }
  r.t_statistic = mean / (sd / std::sqrt(static_cast<double>(n)));
  r.p_two_sided = t_two_sided_p(r.t_statistic, static_cast<double>(r.degrees_of_freedom));
  return r;
}

}  // namespace noveldetect
