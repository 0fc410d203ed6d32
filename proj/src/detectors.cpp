#include "noveldetect/detectors.hpp"

#include <algorithm>
#include <cstdio>
#include <map>

#include "noveldetect/kernels.hpp"

namespace noveldetect {

std::string_view to_string(Method m) {
  switch (m) {
    case Method::similarity:
      return "similarity";
    case Method::overlap:
      return "overlap";
    case Method::pool:
      return "pool";
    case Method::selected_pool:
      return "selected_pool";
  }
  return "?";
}

std::string_view to_string(PoolScope s) { return s == PoolScope::all_previous ? "all_previous" : "novel_only"; }

std::string_view to_string(PoolAggregation a) { return a == PoolAggregation::max ? "max" : "sum"; }

Method parse_method(std::string_view name) {
  for (auto m : {Method::similarity, Method::overlap, Method::pool, Method::selected_pool}) {
    if (name == to_string(m)) return m;
  }
  throw std::invalid_argument("unknown method '" + std::string(name) + "'");
}

PoolScope parse_pool_scope(std::string_view name) {
  if (name == "all_previous") return PoolScope::all_previous;
  if (name == "novel_only") return PoolScope::novel_only;
  throw std::invalid_argument("unknown pool scope '" + std::string(name) + "'");
}

PoolAggregation parse_pool_aggregation(std::string_view name) {
  if (name == "max") return PoolAggregation::max;
  if (name == "sum") return PoolAggregation::sum;
  throw std::invalid_argument("unknown pool aggregation '" + std::string(name) + "'");
}

void DetectorParams::validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw DetectorError("alpha must lie in [0,1]");
  if (method == Method::selected_pool) {
    if (!beta) throw DetectorError("selected_pool requires beta");
    if (!(*beta >= 0.0 && *beta <= 1.0)) throw DetectorError("beta must lie in [0,1]");
  }
}

namespace {

std::string format_threshold(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", value);
  std::string s = buf;
  while (s.back() == '0' && s[s.size() - 2] != '.') s.pop_back();
  return s;
}

}  // namespace

std::string run_label(const DetectorParams& params) {
  switch (params.method) {
    case Method::similarity:
      return "s" + format_threshold(params.alpha);
    case Method::overlap:
      return "o" + format_threshold(params.alpha);
    case Method::pool:
      return "p" + format_threshold(params.alpha);
    case Method::selected_pool:
      return "sp" + format_threshold(params.alpha) + "s" + format_threshold(8.0 * params.beta.value_or(0.0));
  }
  return "?";
}

double sim(const WeightedVector& a, const WeightedVector& b) {
  auto ai = a.ids(), bi = b.ids();
  auto aw = a.weights(), bw = b.weights();
  double min_sum = 0.0, max_sum = 0.0;
  std::size_t i = 0, j = 0;
  while (i < ai.size() || j < bi.size()) {
    if (j == bi.size() || (i < ai.size() && ai[i] < bi[j])) {
      max_sum += aw[i++];
    } else if (i == ai.size() || bi[j] < ai[i]) {
      max_sum += bw[j++];
    } else {
      min_sum += std::min(aw[i], bw[j]);
      max_sum += std::max(aw[i], bw[j]);
      ++i;
      ++j;
    }
  }
  if (max_sum <= 0.0) return 0.0;
  return std::clamp(min_sum / max_sum, 0.0, 1.0);
}

double overlap(const WeightedVector& a, const WeightedVector& b) {
  if (b.empty()) return 0.0;
  auto ai = a.ids(), bi = b.ids();
  auto aw = a.weights(), bw = b.weights();
  double min_sum = 0.0, b_sum = 0.0;
  std::size_t i = 0;
  for (std::size_t j = 0; j < bi.size(); ++j) {
    b_sum += bw[j];
    while (i < ai.size() && ai[i] < bi[j]) ++i;
    if (i < ai.size() && ai[i] == bi[j]) min_sum += std::min(aw[i], bw[j]);
  }
  return std::clamp(min_sum / b_sum, 0.0, 1.0);
}

WeightedVector pool_union(std::span<const WeightedVector> members, PoolAggregation aggregation) {
  std::map<TermId, double> merged;
  for (const auto& m : members) {
    auto ids = m.ids();
    auto ws = m.weights();
    for (std::size_t k = 0; k < ids.size(); ++k) {
      auto [it, inserted] = merged.try_emplace(ids[k], ws[k]);
      if (inserted) continue;
      it->second = aggregation == PoolAggregation::max ? std::max(it->second, ws[k]) : it->second + ws[k];
    }
  }
  return WeightedVector::from_pairs({merged.begin(), merged.end()});
}

namespace {

// Dense scratch rows over the topic vocabulary. Every score for a sentence s
// is a gather over s's own ids, so the summation order is the same whether
// the covering side holds one previous sentence or a pool of them.
class TopicJudge {
 public:
  TopicJudge(std::span<const SentenceVector> topic, const DetectorParams& params)
      : topic_(topic), params_(params) {
    std::size_t dim = 0;
    for (const auto& s : topic) dim = std::max(dim, s.vector.dimension());
    scratch_.assign(dim, 0.0);
    if (params.method == Method::pool) running_pool_.assign(dim, 0.0);
  }

  std::vector<Judgment> run() {
    std::vector<Judgment> out;
    out.reserve(topic_.size());
    for (std::size_t idx = 0; idx < topic_.size(); ++idx) {
      const auto& s = topic_[idx];
      Judgment j{s.sentence_id, false, 0.0, {}};
      if (!s.vector.empty()) {
        if (!candidates_.empty()) judge(s, j);
        if (!j.redundant || params_.pool_scope == PoolScope::all_previous) admit(idx);
      }
      out.push_back(std::move(j));
    }
    return out;
  }

 private:
  void admit(std::size_t idx) {
    candidates_.push_back(idx);
    if (params_.method == Method::pool) accumulate(running_pool_.data(), topic_[idx].vector);
  }

  void accumulate(double* dense, const WeightedVector& v) const {
    if (params_.pool_aggregation == PoolAggregation::max) {
      kernels::scatter_max(dense, v.ids(), v.weights());
    } else {
      kernels::scatter_add(dense, v.ids(), v.weights());
    }
  }

  double covered(const double* dense, const WeightedVector& s) const {
    return kernels::gather_min_sum(dense, s.ids(), s.weights());
  }

  // Numerator of overlap(p, s).
  double pair_min_sum(const WeightedVector& p, const WeightedVector& s) {
    kernels::scatter_max(scratch_.data(), p.ids(), p.weights());
    double m = covered(scratch_.data(), s);
    kernels::scatter_zero(scratch_.data(), p.ids());
    return m;
  }

  void judge(const SentenceVector& s, Judgment& j) {
    const auto& sv = s.vector;
    const double alpha = params_.alpha;
    switch (params_.method) {
      case Method::similarity:
      case Method::overlap: {
        std::size_t best = candidates_.front();
        double best_score = -1.0;
        for (auto p : candidates_) {
          const auto& pv = topic_[p].vector;
          double m = pair_min_sum(pv, sv);
          double score = params_.method == Method::overlap ? m / sv.l1() : m / (pv.l1() + sv.l1() - m);
          score = std::clamp(score, 0.0, 1.0);
          if (score > best_score) {
            best_score = score;
            best = p;
          }
        }
        j.score = best_score;
        j.redundant = best_score >= alpha;
        if (j.redundant) j.spo.push_back(topic_[best].sentence_id);
        break;
      }
      case Method::pool: {
        j.score = std::clamp(covered(running_pool_.data(), sv) / sv.l1(), 0.0, 1.0);
        j.redundant = j.score >= alpha;
        if (j.redundant) {
          for (auto p : candidates_) j.spo.push_back(topic_[p].sentence_id);
        }
        break;
      }
      case Method::selected_pool: {
        const double beta = *params_.beta;
        selected_.clear();
        for (auto p : candidates_) {
          double ov = std::clamp(pair_min_sum(topic_[p].vector, sv) / sv.l1(), 0.0, 1.0);
          if (ov >= beta) selected_.push_back(p);
        }
        if (selected_.empty()) break;
        for (auto p : selected_) accumulate(scratch_.data(), topic_[p].vector);
        j.score = std::clamp(covered(scratch_.data(), sv) / sv.l1(), 0.0, 1.0);
        for (auto p : selected_) kernels::scatter_zero(scratch_.data(), topic_[p].vector.ids());
        j.redundant = j.score >= alpha;
        if (j.redundant) {
          for (auto p : selected_) j.spo.push_back(topic_[p].sentence_id);
        }
        break;
      }
    }
  }

  std::span<const SentenceVector> topic_;
  const DetectorParams& params_;
  std::vector<double> scratch_;
  std::vector<double> running_pool_;
  std::vector<std::size_t> candidates_;  // pooled sentence indices, ascending seq
  std::vector<std::size_t> selected_;
};

}  // namespace

std::vector<Judgment> judge_topic(std::span<const SentenceVector> topic, const DetectorParams& params) {
  params.validate();
  for (std::size_t i = 1; i < topic.size(); ++i) {
    if (topic[i].seq <= topic[i - 1].seq) {
      throw DetectorError("sentences are not in ascending seq order at '" + topic[i].sentence_id + "'");
    }
  }
  return TopicJudge(topic, params).run();
}

}  // namespace noveldetect
