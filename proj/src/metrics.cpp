#include "noveldetect/metrics.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>

namespace noveldetect {

bool ConfusionCounts::consistent() const {
  if (n_returned_novel + n_returned_redundant != n_returned) return false;
  if (n_misses != n_returned_redundant) return false;
  if (n_gold_redundant > n_total || n_returned > n_total) return false;
  const std::size_t judged_redundant = n_total - n_returned;
  const std::size_t caught = n_gold_redundant - n_misses;
  return judged_redundant >= caught && n_false_alarms == judged_redundant - caught;
}

ConfusionCounts confusion(std::span<const Judgment> judgments, const Topic& gold) {
  if (judgments.size() != gold.sentences.size()) {
    throw MetricError("topic '" + gold.topic_id + "': " + std::to_string(judgments.size()) + " judgments for " +
                      std::to_string(gold.sentences.size()) + " sentences");
  }
  ConfusionCounts c;
  c.n_total = gold.sentences.size();
  for (std::size_t i = 0; i < judgments.size(); ++i) {
    const auto& s = gold.sentences[i];
    const auto& j = judgments[i];
    if (j.sentence_id != s.sentence_id) {
      throw MetricError("topic '" + gold.topic_id + "': judgment id '" + j.sentence_id + "' does not match '" +
                        s.sentence_id + "'");
    }
    if (!s.gold_novel) {
      throw MetricError("topic '" + gold.topic_id + "': sentence '" + s.sentence_id + "' lacks gold_novel");
    }
    const bool gold_novel = *s.gold_novel;
    if (!gold_novel) ++c.n_gold_redundant;
    if (!j.redundant) {
      ++c.n_returned;
      if (gold_novel) {
        ++c.n_returned_novel;
      } else {
        ++c.n_returned_redundant;
        ++c.n_misses;
      }
    } else if (gold_novel) {
      ++c.n_false_alarms;
    }
  }
  return c;
}

double f_measure(double precision, double recall) {
  if (precision + recall <= 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

Snm snm(const ConfusionCounts& c) {
  Snm out;
  const std::size_t gold_novel = c.n_gold_novel();
  if (c.n_returned > 0) out.precision = static_cast<double>(c.n_returned_novel) / static_cast<double>(c.n_returned);
  if (gold_novel > 0) {
    out.recall = static_cast<double>(c.n_returned_novel) / static_cast<double>(gold_novel);
  } else {
    out.recall = c.n_returned == 0 ? 1.0 : 0.0;
  }
  if (c.n_returned == 0 && gold_novel > 0) return {0.0, 0.0, 0.0};
  out.f = f_measure(out.precision, out.recall);
  return out;
}

double mistake_rate(const ConfusionCounts& c) {
  if (c.n_total == 0) return 0.0;
  return static_cast<double>(c.mistakes()) / static_cast<double>(c.n_total);
}

std::optional<Fraction> spsm(const ConfusionCounts& c) {
  if (c.n_gold_redundant == 0) return std::nullopt;
  const auto novel = static_cast<std::int64_t>(c.n_returned_novel);
  const auto redundant = static_cast<std::int64_t>(c.n_returned_redundant);
  const auto total = static_cast<std::int64_t>(c.n_total);
  const auto gold_r = static_cast<std::int64_t>(c.n_gold_redundant);
  return Fraction{novel - redundant - (total - 2 * gold_r), gold_r};
}

std::optional<Fraction> spsm_from_mistakes(const ConfusionCounts& c) {
  if (c.n_gold_redundant == 0) return std::nullopt;
  const auto gold_r = static_cast<std::int64_t>(c.n_gold_redundant);
  return Fraction{gold_r - static_cast<std::int64_t>(c.n_misses) - static_cast<std::int64_t>(c.n_false_alarms),
                  gold_r};
}

namespace {

struct PairEntry {
  bool judged_redundant = false;
  bool gold_redundant = false;
  std::set<std::string> spo;
  std::set<std::string> po;
};

PairCounts count_pairs(const std::vector<PairEntry>& entries) {
  PairCounts pc;
  for (const auto& e : entries) {
    if (e.gold_redundant) pc.total += e.po.size();
    if (e.judged_redundant && !e.gold_redundant) {
      pc.misclassified += e.spo.size();
    } else if (!e.judged_redundant && e.gold_redundant) {
      pc.misclassified += e.po.size();
    } else if (e.judged_redundant && e.gold_redundant) {
      for (const auto& id : e.spo) pc.misclassified += e.po.contains(id) ? 0 : 1;
      for (const auto& id : e.po) pc.misclassified += e.spo.contains(id) ? 0 : 1;
    }
  }
  return pc;
}

void check_alignment(std::span<const Judgment> judgments, const Topic& gold) {
  // confusion() performs the id, length and label checks.
  (void)confusion(judgments, gold);
}

}  // namespace

std::optional<PairCounts> psm(std::span<const Judgment> judgments, const Topic& gold) {
  check_alignment(judgments, gold);
  std::unordered_map<std::string, std::size_t> position;
  for (std::size_t i = 0; i < gold.sentences.size(); ++i) position.emplace(gold.sentences[i].sentence_id, i);

  std::vector<PairEntry> entries;
  entries.reserve(judgments.size());
  for (std::size_t i = 0; i < judgments.size(); ++i) {
    const auto& s = gold.sentences[i];
    const auto& j = judgments[i];
    PairEntry e;
    e.judged_redundant = j.redundant;
    e.gold_redundant = !*s.gold_novel;
    if (e.gold_redundant) {
      if (!s.gold_po || s.gold_po->empty()) {
        throw MetricError("topic '" + gold.topic_id + "': redundant sentence '" + s.sentence_id +
                          "' has no gold_po; PSM needs PO assessments");
      }
      e.po.insert(s.gold_po->begin(), s.gold_po->end());
    }
    for (const auto& id : j.spo) {
      auto it = position.find(id);
      if (it == position.end() || it->second >= i) {
        throw MetricError("topic '" + gold.topic_id + "': SPO of '" + s.sentence_id + "' names '" + id +
                          "', which is not an earlier sentence");
      }
    }
    if (e.judged_redundant) e.spo.insert(j.spo.begin(), j.spo.end());
    entries.push_back(std::move(e));
  }
  auto pc = count_pairs(entries);
  if (pc.total == 0) return std::nullopt;
  return pc;
}

std::optional<PairCounts> psm_indicator(std::span<const Judgment> judgments, const Topic& gold) {
  check_alignment(judgments, gold);
  static const std::string kCover = "*";
  std::vector<PairEntry> entries;
  entries.reserve(judgments.size());
  for (std::size_t i = 0; i < judgments.size(); ++i) {
    PairEntry e;
    e.judged_redundant = judgments[i].redundant;
    e.gold_redundant = !*gold.sentences[i].gold_novel;
    if (e.gold_redundant) e.po.insert(kCover);
    if (e.judged_redundant) e.spo.insert(kCover);
    entries.push_back(std::move(e));
  }
  auto pc = count_pairs(entries);
  if (pc.total == 0) return std::nullopt;
  return pc;
}

double f_augmentation_cutoff(double precision, double recall) { return precision / (precision + recall); }

TopicMetrics evaluate_topic(std::span<const Judgment> judgments, const Topic& gold, bool with_psm) {
  TopicMetrics m;
  m.topic_id = gold.topic_id;
  m.counts = confusion(judgments, gold);
  m.snm = snm(m.counts);
  m.mistake_rate = mistake_rate(m.counts);
  if (auto s = spsm(m.counts)) m.spsm = s->value();
  if (with_psm) {
    if (auto p = psm(judgments, gold)) m.psm = p->value();
  }
  return m;
}

MetricReport evaluate_run(std::span<const Topic> gold, std::span<const std::vector<Judgment>> judgments,
                          bool with_psm) {
  if (gold.size() != judgments.size()) throw MetricError("run and corpus cover different numbers of topics");
  MetricReport r;
  double spsm_sum = 0.0, psm_sum = 0.0;
  std::size_t spsm_n = 0, psm_n = 0;
  for (std::size_t t = 0; t < gold.size(); ++t) {
    auto m = evaluate_topic(judgments[t], gold[t], with_psm);
    r.n_returned += m.counts.n_returned;
    r.n_returned_novel += m.counts.n_returned_novel;
    r.total_mistakes += m.counts.mistakes();
    r.mean_precision += m.snm.precision;
    r.mean_recall += m.snm.recall;
    r.mean_f += m.snm.f;
    r.mean_mistake_rate += m.mistake_rate;
    if (m.spsm) {
      spsm_sum += *m.spsm;
      ++spsm_n;
    } else {
      ++r.spsm_excluded;
    }
    if (with_psm) {
      if (m.psm) {
        psm_sum += *m.psm;
        ++psm_n;
      } else {
        ++r.psm_excluded;
      }
    }
    r.topics.push_back(std::move(m));
  }
  if (!gold.empty()) {
    const double n = static_cast<double>(gold.size());
    r.mean_precision /= n;
    r.mean_recall /= n;
    r.mean_f /= n;
    r.mean_mistake_rate /= n;
  }
  if (spsm_n > 0) r.mean_spsm = spsm_sum / static_cast<double>(spsm_n);
  if (psm_n > 0) r.mean_psm = psm_sum / static_cast<double>(psm_n);
  return r;
}

}  // namespace noveldetect
