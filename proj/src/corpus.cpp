#include "noveldetect/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

namespace noveldetect {

namespace {

struct PendingRecord {
  SentenceRecord record;
  std::size_t line = 0;
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

std::vector<std::string> split_ids(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    auto end = s.find(',', start);
    if (end == std::string_view::npos) end = s.size();
    auto piece = trim(s.substr(start, end - start));
    if (!piece.empty()) out.emplace_back(piece);
    start = end + 1;
  }
  return out;
}

std::size_t parse_seq(std::string_view field, std::size_t line) {
  field = trim(field);
  if (field.empty() || field == "-") throw CorpusError(line, "missing seq");
  std::size_t value = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw CorpusError(line, "seq is not a non-negative integer: '" + std::string(field) + "'");
  }
  return value;
}

std::optional<bool> parse_novel_flag(std::string_view field, std::size_t line) {
  field = trim(field);
  if (field == "1") return true;
  if (field == "0") return false;
  if (field == "-") return std::nullopt;
  throw CorpusError(line, "gold_novel must be 1, 0 or -: '" + std::string(field) + "'");
}

char parse_delimiter_name(std::string_view name, std::size_t line) {
  name = trim(name);
  if (name == "tab") return '\t';
  if (name == "comma") return ',';
  if (name == "pipe") return '|';
  if (name == "semicolon") return ';';
  if (name.size() == 1) return name.front();
  throw CorpusError(line, "unsupported delimiter declaration: '" + std::string(name) + "'");
}

SentenceRecord parse_json_record(std::string_view text, std::size_t line) {
  nlohmann::json obj;
  try {
    obj = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw CorpusError(line, std::string("malformed record: ") + e.what());
  }
  if (!obj.is_object()) throw CorpusError(line, "malformed record: expected an object");

  SentenceRecord rec;
  try {
    rec.topic_id = obj.at("topic_id").get<std::string>();
    rec.sentence_id = obj.at("sentence_id").get<std::string>();
    if (!obj.contains("seq") || obj["seq"].is_null()) throw CorpusError(line, "missing seq");
    const auto& seq = obj["seq"];
    if (seq.is_number_unsigned()) {
      rec.seq = seq.get<std::size_t>();
    } else if (seq.is_string()) {
      rec.seq = parse_seq(seq.get<std::string>(), line);
    } else {
      throw CorpusError(line, "seq is not a non-negative integer");
    }
    rec.text = obj.value("text", std::string{});
    if (obj.contains("gold_novel") && !obj["gold_novel"].is_null()) {
      const auto& g = obj["gold_novel"];
      if (g.is_boolean()) {
        rec.gold_novel = g.get<bool>();
      } else if (g.is_string()) {
        rec.gold_novel = parse_novel_flag(g.get<std::string>(), line);
      } else if (g.is_number_integer()) {
        rec.gold_novel = parse_novel_flag(std::to_string(g.get<long long>()), line);
      } else {
        throw CorpusError(line, "gold_novel has an unsupported type");
      }
    }
    if (obj.contains("gold_po") && !obj["gold_po"].is_null()) {
      const auto& g = obj["gold_po"];
      if (g.is_array()) {
        rec.gold_po = g.get<std::vector<std::string>>();
      } else if (g.is_string()) {
        auto s = g.get<std::string>();
        if (s != "-") rec.gold_po = split_ids(s);
      } else {
        throw CorpusError(line, "gold_po has an unsupported type");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw CorpusError(line, std::string("malformed record: ") + e.what());
  }
  if (rec.topic_id.empty() || rec.sentence_id.empty()) throw CorpusError(line, "empty topic_id or sentence_id");
  return rec;
}

SentenceRecord parse_delimited_record(std::string_view text, char delim, std::size_t line) {
  std::string_view fields[5];
  std::size_t pos = 0;
  for (auto& field : fields) {
    auto end = text.find(delim, pos);
    if (end == std::string_view::npos) {
      throw CorpusError(line, "malformed record: expected 6 fields");
    }
    field = text.substr(pos, end - pos);
    pos = end + 1;
  }
  SentenceRecord rec;
  rec.topic_id = std::string(trim(fields[0]));
  rec.sentence_id = std::string(trim(fields[1]));
  if (rec.topic_id.empty() || rec.sentence_id.empty()) throw CorpusError(line, "empty topic_id or sentence_id");
  rec.seq = parse_seq(fields[2], line);
  rec.gold_novel = parse_novel_flag(fields[3], line);
  auto po = trim(fields[4]);
  if (po != "-") rec.gold_po = split_ids(po);
  rec.text = std::string(text.substr(pos));
  return rec;
}

std::vector<Topic> assemble(std::vector<PendingRecord> pending, const ParseOptions& options) {
  std::vector<std::string> order;
  std::unordered_map<std::string, std::vector<PendingRecord>> grouped;
  for (auto& p : pending) {
    auto [it, inserted] = grouped.try_emplace(p.record.topic_id);
    if (inserted) order.push_back(p.record.topic_id);
    it->second.push_back(std::move(p));
  }

  std::vector<Topic> topics;
  topics.reserve(order.size());
  for (const auto& topic_id : order) {
    auto& recs = grouped[topic_id];
    std::stable_sort(recs.begin(), recs.end(),
                     [](const PendingRecord& a, const PendingRecord& b) { return a.record.seq < b.record.seq; });

    std::unordered_map<std::string, std::size_t> seq_of;
    for (std::size_t i = 0; i < recs.size(); ++i) {
      const auto& r = recs[i];
      if (!seq_of.emplace(r.record.sentence_id, r.record.seq).second) {
        throw CorpusError(r.line, "duplicate sentence '" + r.record.sentence_id + "' in topic '" + topic_id + "'");
      }
      if (i > 0 && recs[i - 1].record.seq == r.record.seq) {
        throw CorpusError(r.line, "duplicate seq " + std::to_string(r.record.seq) + " in topic '" + topic_id + "'");
      }
      if (options.strict && r.record.seq != i) {
        throw CorpusError(r.line, "seq values of topic '" + topic_id + "' are not contiguous from 0");
      }
    }

    Topic topic{topic_id, {}};
    topic.sentences.reserve(recs.size());
    for (auto& r : recs) {
      if (r.record.gold_po) {
        for (const auto& ref : *r.record.gold_po) {
          auto it = seq_of.find(ref);
          if (it == seq_of.end()) {
            throw CorpusError(r.line, "unknown PO reference '" + ref + "'");
          }
          if (it->second >= r.record.seq) {
            throw CorpusError(r.line, "forward PO reference '" + ref + "'");
          }
        }
        if (options.strict && r.record.gold_novel == false && r.record.gold_po->empty()) {
          throw CorpusError(r.line, "redundant sentence '" + r.record.sentence_id + "' has an empty gold_po");
        }
      }
      topic.sentences.push_back(std::move(r.record));
    }
    topics.push_back(std::move(topic));
  }
  return topics;
}

}  // namespace

CorpusError::CorpusError(std::size_t line, const std::string& what)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

std::vector<Topic> parse_corpus(std::istream& in, const ParseOptions& options) {
  std::vector<PendingRecord> pending;
  char delim = options.delimiter;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    std::string_view text = raw;
    if (trim(text).empty()) continue;
    if (text.front() == '#') {
      constexpr std::string_view directive = "# delimiter:";
      if (text.starts_with(directive)) delim = parse_delimiter_name(text.substr(directive.size()), line);
      continue;
    }
    if (text.front() == '{') {
      pending.push_back({parse_json_record(text, line), line});
    } else {
      pending.push_back({parse_delimited_record(text, delim, line), line});
    }
  }
  return assemble(std::move(pending), options);
}

std::vector<Topic> parse_corpus(const std::filesystem::path& path, const ParseOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CorpusError(0, "cannot open corpus file '" + path.string() + "'");
  return parse_corpus(in, options);
}

void write_corpus(std::ostream& out, const std::vector<Topic>& topics, char delimiter) {
  out << "# noveldetect corpus\n";
  out << "# delimiter: " << (delimiter == '\t' ? std::string("tab") : std::string(1, delimiter)) << '\n';
  for (const auto& topic : topics) {
    for (const auto& s : topic.sentences) {
      bool needs_object = s.text.find(delimiter) != std::string::npos || s.text.find('\n') != std::string::npos ||
                          s.text.find('\r') != std::string::npos;
      for (const auto& id : {s.topic_id, s.sentence_id}) {
        if (id.find(delimiter) != std::string::npos || id.find(',') != std::string::npos) needs_object = true;
      }
      if (needs_object) {
        nlohmann::ordered_json obj;
        obj["topic_id"] = s.topic_id;
        obj["sentence_id"] = s.sentence_id;
        obj["seq"] = s.seq;
        obj["gold_novel"] = s.gold_novel ? nlohmann::ordered_json(*s.gold_novel) : nlohmann::ordered_json(nullptr);
        obj["gold_po"] = s.gold_po ? nlohmann::ordered_json(*s.gold_po) : nlohmann::ordered_json(nullptr);
        obj["text"] = s.text;
        out << obj.dump() << '\n';
        continue;
      }
      out << s.topic_id << delimiter << s.sentence_id << delimiter << s.seq << delimiter;
      out << (s.gold_novel ? (*s.gold_novel ? "1" : "0") : "-") << delimiter;
      if (!s.gold_po) {
        out << '-';
      } else {
        for (std::size_t i = 0; i < s.gold_po->size(); ++i) out << (i ? "," : "") << (*s.gold_po)[i];
      }
      out << delimiter << s.text << '\n';
    }
  }
}

GoldReport validate_gold(const Topic& topic) {
  GoldReport report;
  report.topic_id = topic.topic_id;
  report.n_sentences = topic.sentences.size();
  for (std::size_t i = 0; i < topic.sentences.size(); ++i) {
    const auto& s = topic.sentences[i];
    if (s.seq != i) {
      report.violations.push_back("sentence '" + s.sentence_id + "' has seq " + std::to_string(s.seq) +
                                  ", expected " + std::to_string(i));
    }
    if (!s.gold_novel) continue;
    ++report.n_with_novelty;
    if (*s.gold_novel) continue;
    ++report.n_gold_redundant;
    if (s.gold_po) {
      if (s.gold_po->empty()) {
        report.violations.push_back("redundant sentence '" + s.sentence_id + "' has an empty gold_po");
      } else {
        ++report.n_redundant_with_po;
      }
    }
  }
  return report;
}

std::string GoldReport::summary() const {
  std::ostringstream out;
  out << "topic " << topic_id << ": ";
  if (!snm_computable()) {
    out << "novelty labels incomplete (" << n_with_novelty << "/" << n_sentences << "), no metric computable";
  } else if (psm_computable()) {
    out << "SNM/SPSM computable, PSM computable";
  } else {
    out << "SNM/SPSM computable, PSM not";
  }
  for (const auto& v : violations) out << "; violation: " << v;
  return out.str();
}

}  // namespace noveldetect
