#include "noveldetect/textvec.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace noveldetect {

namespace {

constexpr char32_t kInvalid = 0xFFFD;

// Decodes one code point starting at `pos`, advancing it. Malformed
// sequences consume one byte and decode to U+FFFD.
char32_t next_code_point(std::string_view s, std::size_t& pos) {
  auto byte = [&](std::size_t i) { return static_cast<unsigned char>(s[i]); };
  unsigned char b0 = byte(pos);
  if (b0 < 0x80) {
    ++pos;
    return b0;
  }
  int len = 0;
  char32_t cp = 0;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    ++pos;
    return kInvalid;
  }
  if (pos + len > s.size()) {
    ++pos;
    return kInvalid;
  }
  for (int k = 1; k < len; ++k) {
    unsigned char b = byte(pos + k);
    if ((b & 0xC0) != 0x80) {
      ++pos;
      return kInvalid;
    }
    cp = (cp << 6) | (b & 0x3F);
  }
  static constexpr char32_t kMin[] = {0, 0, 0x80, 0x800, 0x10000};
  if (cp < kMin[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
    ++pos;
    return kInvalid;
  }
  pos += len;
  return cp;
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

bool in(char32_t cp, char32_t lo, char32_t hi) { return cp >= lo && cp <= hi; }

// ASCII letters and digits; outside ASCII everything except the common
// punctuation, symbol and whitespace blocks counts as a word character.
bool is_word_char(char32_t cp) {
  if (cp < 0x80) {
    return in(cp, U'0', U'9') || in(cp, U'a', U'z') || in(cp, U'A', U'Z');
  }
  if (in(cp, 0x80, 0xBF)) return cp == 0xAA || cp == 0xB5 || cp == 0xBA;
  if (cp == 0xD7 || cp == 0xF7) return false;
  if (in(cp, 0x2000, 0x206F) || in(cp, 0x20A0, 0x20CF) || in(cp, 0x2190, 0x23FF) || in(cp, 0x2500, 0x27BF) ||
      in(cp, 0x3000, 0x303F) || in(cp, 0xFE30, 0xFE4F) || in(cp, 0xFF00, 0xFF0F) || in(cp, 0xFF1A, 0xFF20) ||
      in(cp, 0xFF3B, 0xFF40) || in(cp, 0xFF5B, 0xFF65) || in(cp, 0x1F000, 0x1FAFF)) {
    return false;
  }
  return cp != kInvalid && cp != 0xFEFF;
}

// Simple case folding for ASCII, Latin-1, Latin Extended-A, Greek and Cyrillic.
char32_t to_lower(char32_t cp) {
  if (in(cp, U'A', U'Z')) return cp + 0x20;
  if (cp < 0x80) return cp;
  if (in(cp, 0xC0, 0xDE) && cp != 0xD7) return cp + 0x20;
  if (in(cp, 0x100, 0x137) || in(cp, 0x14A, 0x177)) return cp | 1;
  if (in(cp, 0x139, 0x148) || in(cp, 0x179, 0x17E)) return (cp & 1) ? cp + 1 : cp;
  if (in(cp, 0x391, 0x3A9) && cp != 0x3A2) return cp + 0x20;
  if (in(cp, 0x410, 0x42F)) return cp + 0x20;
  if (in(cp, 0x400, 0x40F)) return cp + 0x50;
  return cp;
}

bool parse_bool(const std::string& value, const std::string& key) {
  if (value == "1" || value == "true" || value == "yes" || value == "on") return true;
  if (value == "0" || value == "false" || value == "no" || value == "off") return false;
  throw std::invalid_argument("config key '" + key + "' expects a boolean, got '" + value + "'");
}

std::string trim_copy(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::set<std::string> load_stopwords(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open stopword file '" + path.string() + "'");
  std::set<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    line = trim_copy(line);
    if (line.empty() || line.front() == '#') continue;
    words.insert(line);
  }
  return words;
}

TokenizerConfig load_tokenizer_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file '" + path.string() + "'");
  TokenizerConfig config;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim_copy(line);
    if (line.empty() || line.front() == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument(path.string() + ":" + std::to_string(lineno) + ": expected key=value");
    }
    auto key = trim_copy(line.substr(0, eq));
    auto value = trim_copy(line.substr(eq + 1));
    if (key == "lowercase") {
      config.lowercase = parse_bool(value, key);
    } else if (key == "min_token_len") {
      std::size_t parsed = 0;
      long long n = std::stoll(value, &parsed);
      if (parsed != value.size() || n < 1) {
        throw std::invalid_argument("min_token_len must be a positive integer, got '" + value + "'");
      }
      config.min_token_len = static_cast<std::size_t>(n);
    } else if (key == "stopwords_file") {
      std::filesystem::path p = value;
      if (p.is_relative()) p = path.parent_path() / p;
      config.stopwords = load_stopwords(p);
    } else {
      throw std::invalid_argument(path.string() + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
  }
  return config;
}

std::vector<std::string> tokenize(std::string_view text, const TokenizerConfig& config) {
  if (config.min_token_len < 1) throw std::invalid_argument("min_token_len must be >= 1");
  std::vector<std::string> tokens;
  std::string current;
  std::size_t current_len = 0;
  auto flush = [&] {
    if (current_len >= config.min_token_len && !(config.stopwords && config.stopwords->contains(current))) {
      tokens.push_back(current);
    }
    current.clear();
    current_len = 0;
  };
  std::size_t pos = 0;
  while (pos < text.size()) {
    char32_t cp = next_code_point(text, pos);
    if (!is_word_char(cp)) {
      if (current_len > 0) flush();
      continue;
    }
    append_utf8(current, config.lowercase ? to_lower(cp) : cp);
    ++current_len;
  }
  if (current_len > 0) flush();
  return tokens;
}

std::optional<TermId> TopicStats::find(std::string_view term) const {
  auto it = index_.find(std::string(term));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t TopicStats::df(std::string_view term) const {
  auto id = find(term);
  return id ? df_[*id] : 0;
}

TopicStats build_topic_stats(const Topic& topic, const TokenizerConfig& config) {
  TopicStats stats;
  stats.n_sentences_ = topic.sentences.size();
  std::vector<std::size_t> last_seen;  // sentence index + 1 that last counted the term
  for (std::size_t i = 0; i < topic.sentences.size(); ++i) {
    for (auto& token : tokenize(topic.sentences[i].text, config)) {
      auto [it, inserted] = stats.index_.try_emplace(token, static_cast<TermId>(stats.terms_.size()));
      if (inserted) {
        stats.terms_.push_back(std::move(token));
        stats.df_.push_back(0);
        last_seen.push_back(0);
      }
      TermId id = it->second;
      if (last_seen[id] != i + 1) {
        last_seen[id] = i + 1;
        ++stats.df_[id];
      }
    }
  }
  return stats;
}

WeightedVector WeightedVector::from_pairs(std::vector<std::pair<TermId, double>> entries) {
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  WeightedVector v;
  for (std::size_t i = 0; i < entries.size();) {
    TermId id = entries[i].first;
    double w = 0.0;
    for (; i < entries.size() && entries[i].first == id; ++i) w += entries[i].second;
    if (w > 0.0) {
      v.ids_.push_back(id);
      v.weights_.push_back(w);
    }
  }
  v.l1_ = kernels::sum(v.weights_);
  return v;
}

double WeightedVector::weight(TermId id) const {
  auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
  if (it == ids_.end() || *it != id) return 0.0;
  return weights_[static_cast<std::size_t>(it - ids_.begin())];
}

WeightedVector vectorize(const SentenceRecord& sentence, const TopicStats& stats, const TokenizerConfig& config) {
  std::map<TermId, std::size_t> tf;
  for (const auto& token : tokenize(sentence.text, config)) {
    if (auto id = stats.find(token)) ++tf[*id];
  }
  const double n_plus_one = static_cast<double>(stats.n_sentences() + 1);
  std::vector<std::pair<TermId, double>> entries;
  entries.reserve(tf.size());
  for (auto [id, count] : tf) {
    double idf = std::log(n_plus_one / static_cast<double>(stats.df(id)));
    entries.emplace_back(id, static_cast<double>(count) * idf);
  }
  return WeightedVector::from_pairs(std::move(entries));
}

}  // namespace noveldetect
