#include "noveldetect/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <unordered_map>

namespace noveldetect {

namespace {

std::string fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  std::string s = buf;
  if (s.starts_with('-') && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

std::string general(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", value);
  return buf;
}

std::string optional_fixed(const std::optional<double>& value, int decimals) {
  return value ? fixed(*value, decimals) : std::string("-");
}

std::string join_ids(const std::vector<std::string>& ids) {
  if (ids.empty()) return "-";
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) out += ',';
    out += ids[i];
  }
  return out;
}

std::vector<std::string> split(const std::string& s, char delim) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    auto end = s.find(delim, start);
    out.push_back(s.substr(start, end == std::string::npos ? std::string::npos : end - start));
    if (end == std::string::npos) return out;
    start = end + 1;
  }
}

std::string threshold_cell(const std::optional<double>& v) { return v ? fixed(*v, 4) : std::string("-"); }

}  // namespace

void write_run(std::ostream& out, const RunFile& run) {
  out << "# noveldetect run\n";
  out << "# label: " << run.label << '\n';
  out << "# topic_id\tsentence_id\tredundant\tscore\tspo\n";
  for (const auto& topic : run.topics) {
    for (const auto& j : topic.judgments) {
      out << topic.topic_id << '\t' << j.sentence_id << '\t' << (j.redundant ? 1 : 0) << '\t' << fixed(j.score, 6)
          << '\t' << join_ids(j.spo) << '\n';
    }
  }
}

RunFile read_run(std::istream& in) {
  RunFile run;
  std::unordered_map<std::string, std::size_t> topic_index;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      if (line.starts_with("# label: ")) run.label = line.substr(9);
      continue;
    }
    auto fields = split(line, '\t');
    auto fail = [&](const std::string& what) {
      throw FormatError("run line " + std::to_string(lineno) + ": " + what);
    };
    if (fields.size() != 5) fail("expected 5 fields");
    Judgment j;
    j.sentence_id = fields[1];
    if (fields[2] == "1") {
      j.redundant = true;
    } else if (fields[2] != "0") {
      fail("redundant flag must be 0 or 1");
    }
    const auto& sc = fields[3];
    auto [ptr, ec] = std::from_chars(sc.data(), sc.data() + sc.size(), j.score);
    if (ec != std::errc() || ptr != sc.data() + sc.size()) fail("bad score '" + sc + "'");
    if (fields[4] != "-") j.spo = split(fields[4], ',');
    auto [it, inserted] = topic_index.try_emplace(fields[0], run.topics.size());
    if (inserted) run.topics.push_back({fields[0], {}});
    run.topics[it->second].judgments.push_back(std::move(j));
  }
  return run;
}

std::vector<std::vector<Judgment>> align_run(const RunFile& run, std::span<const Topic> corpus, bool allow_extra) {
  std::unordered_map<std::string, const TopicJudgments*> by_id;
  for (const auto& t : run.topics) by_id.emplace(t.topic_id, &t);
  std::vector<std::vector<Judgment>> out;
  out.reserve(corpus.size());
  for (const auto& topic : corpus) {
    auto it = by_id.find(topic.topic_id);
    if (it == by_id.end()) throw FormatError("run has no judgments for topic '" + topic.topic_id + "'");
    out.push_back(it->second->judgments);
    by_id.erase(it);
  }
  if (!by_id.empty() && !allow_extra) throw FormatError("run judges topics absent from the corpus");
  return out;
}

void write_metric_report(std::ostream& out, const MetricReport& report, const std::string& label,
                         const ReportColumns& columns) {
  out << "# noveldetect metric report\n";
  out << "# label: " << label << '\n';
  out << "topic\t#ret\tAv.P\tAv.R\tAv.F\t#novel";
  if (columns.mistake) out << "\tMistake%";
  if (columns.spsm) out << "\tSPSM";
  if (columns.psm) out << "\tPSM";
  out << '\n';
  for (const auto& t : report.topics) {
    out << t.topic_id << '\t' << t.counts.n_returned << '\t' << fixed(t.snm.precision, 4) << '\t'
        << fixed(t.snm.recall, 4) << '\t' << fixed(t.snm.f, 4) << '\t' << t.counts.n_returned_novel;
    if (columns.mistake) out << '\t' << fixed(t.mistake_rate, 4);
    if (columns.spsm) out << '\t' << optional_fixed(t.spsm, 4);
    if (columns.psm) out << '\t' << optional_fixed(t.psm, 4);
    out << '\n';
  }
  out << "ALL\t" << report.n_returned << '\t' << fixed(report.mean_precision, 4) << '\t'
      << fixed(report.mean_recall, 4) << '\t' << fixed(report.mean_f, 4) << '\t' << report.n_returned_novel;
  if (columns.mistake) out << '\t' << fixed(report.mean_mistake_rate, 4);
  if (columns.spsm) out << '\t' << optional_fixed(report.mean_spsm, 4);
  if (columns.psm) out << '\t' << optional_fixed(report.mean_psm, 4);
  out << '\n';
  if (columns.spsm && report.spsm_excluded > 0) {
    out << "# SPSM undefined (no gold-redundant sentences) for " << report.spsm_excluded << " topic(s)\n";
  }
  if (columns.psm && report.psm_excluded > 0) {
    out << "# PSM undefined (no gold pairs) for " << report.psm_excluded << " topic(s)\n";
  }
}

void write_tune_report(std::ostream& out, const TuneResult& result, Objective objective) {
  out << "# noveldetect tune report\n";
  out << "# objective: " << to_string(objective) << '\n';
  out << "# best: " << run_label(result.best) << " alpha=" << fixed(result.best.alpha, 4)
      << " beta=" << threshold_cell(result.best.beta) << " objective=" << fixed(result.best_objective, 6) << '\n';
  out << "alpha\tbeta\tobjective\n";
  for (const auto& row : result.table) {
    out << fixed(row.alpha, 4) << '\t' << threshold_cell(row.beta) << '\t' << fixed(row.objective, 6) << '\n';
  }
}

void write_loo_report(std::ostream& out, const LooResult& result, Objective objective) {
  out << "# noveldetect leave-one-out report\n";
  out << "# objective: " << to_string(objective) << '\n';
  out << "topic\talpha\tbeta\tlabel\tF\tMistake%\terrors\n";
  for (const auto& row : result.rows) {
    out << row.topic_id << '\t' << fixed(row.params.alpha, 4) << '\t' << threshold_cell(row.params.beta) << '\t'
        << run_label(row.params) << '\t' << fixed(row.metrics.snm.f, 4) << '\t'
        << fixed(row.metrics.mistake_rate, 4) << '\t' << row.metrics.counts.mistakes() << '\n';
  }
  out << "ALL\t-\t-\t-\t" << fixed(result.mean_f, 4) << '\t' << fixed(result.mean_mistake_rate, 4) << '\t'
      << result.total_errors << '\n';
}

void write_compare_report(std::ostream& out, const std::string& metric, const std::string& label_a,
                          const std::string& label_b, std::span<const CompareRow> rows, const TTestResult& t) {
  out << "# noveldetect compare report\n";
  out << "# metric: " << metric << '\n';
  out << "topic\t" << label_a << '\t' << label_b << '\n';
  for (const auto& row : rows) out << row.topic_id << '\t' << fixed(row.a, 4) << '\t' << fixed(row.b, 4) << '\n';
  std::string t_cell = t.infinite ? (t.t_statistic > 0 ? "inf" : "-inf") : fixed(t.t_statistic, 6);
  out << "# t=" << t_cell << " df=" << t.degrees_of_freedom << " p=" << general(t.p_two_sided)
      << " mean_diff=" << fixed(t.mean_difference, 6) << " n=" << t.n_pairs << '\n';
}

}  // namespace noveldetect
