#include "mmerge/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

namespace mmerge {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v'; }

std::size_t utf8_length(unsigned char lead) {
  if (lead < 0x80) return 1;
  if ((lead >> 5) == 0x6) return 2;
  if ((lead >> 4) == 0xE) return 3;
  if ((lead >> 3) == 0x1E) return 4;
  return 1;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

}  // namespace

Tokenization parse_tokenization(std::string_view name) {
  if (name == "chars") return Tokenization::chars;
  if (name == "words") return Tokenization::words;
  throw ConfigError("unknown tokenization '" + std::string(name) + "' (expected chars or words)");
}

Sentence tokenize(std::string_view text, Tokenization mode) {
  Sentence out;
  std::size_t i = 0;
  while (i < text.size()) {
    if (is_space(text[i])) {
      ++i;
      continue;
    }
    if (mode == Tokenization::chars) {
      std::size_t n = std::min(utf8_length(static_cast<unsigned char>(text[i])), text.size() - i);
      out.emplace_back(text.substr(i, n));
      i += n;
    } else {
      std::size_t j = i;
      while (j < text.size() && !is_space(text[j])) ++j;
      out.emplace_back(text.substr(i, j - i));
      i = j;
    }
  }
  return out;
}

std::string join_tokens(const Sentence& tokens, Tokenization mode) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0 && mode == Tokenization::words) out += ' ';
    out += tokens[i];
  }
  return out;
}

Corpus::Corpus(const std::vector<Sample>& samples) {
  std::map<Sentence, std::size_t> index;
  for (const auto& s : samples) {
    if (s.tokens.empty()) throw ModelError("corpus sample has no tokens");
    if (s.count <= 0) throw ModelError("corpus sample count must be positive");
    auto [it, inserted] = index.try_emplace(s.tokens, samples_.size());
    if (inserted) {
      samples_.push_back(s);
      alphabet_.insert(s.tokens.begin(), s.tokens.end());
    } else {
      samples_[it->second].count += s.count;
    }
  }
}

Count Corpus::total() const {
  Count t = 0;
  for (const auto& s : samples_) t += s.count;
  return t;
}

std::size_t Corpus::max_length() const {
  std::size_t n = 0;
  for (const auto& s : samples_) n = std::max(n, s.tokens.size());
  return n;
}

Corpus Corpus::slice(std::size_t first, std::size_t n) const {
  std::vector<Sample> part;
  for (std::size_t i = first; i < samples_.size() && i < first + n; ++i) part.push_back(samples_[i]);
  return Corpus(part);
}

Corpus parse_corpus(std::string_view text, Tokenization mode) {
  std::vector<Sample> samples;
  int line_no = 0;
  while (!text.empty()) {
    auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (trim(line).empty() || trim(line).front() == '#') continue;

    Count count = 1;
    std::string_view body = line;
    if (auto tab = line.find('\t'); tab != std::string_view::npos) {
      std::string_view prefix = trim(line.substr(0, tab));
      try {
        count = parse_count(prefix);
      } catch (const std::invalid_argument& e) {
        throw ParseError(e.what(), line_no, 1);
      }
      if (count <= 0) throw ParseError("count must be positive, got '" + std::string(prefix) + "'", line_no, 1);
      body = line.substr(tab + 1);
    }
    Sentence tokens = tokenize(body, mode);
    if (tokens.empty()) throw ParseError("sample has a count but no tokens", line_no);
    samples.push_back({std::move(tokens), count});
  }
  if (samples.empty()) throw ParseError("empty corpus", 0);
  return Corpus(samples);
}

Corpus load_corpus(std::istream& in, Tokenization mode) {
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_corpus(buffer.str(), mode);
}

Corpus load_corpus_file(const std::string& path, Tokenization mode) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open corpus file '" + path + "'");
  return load_corpus(in, mode);
}

std::string serialize_corpus(const Corpus& corpus, Tokenization mode) {
  std::string out;
  for (const auto& s : corpus.samples()) {
    out += format_count(s.count);
    out += '\t';
    out += join_tokens(s.tokens, mode);
    out += '\n';
  }
  return out;
}

Corpus scale_counts(const Corpus& corpus, const Count& total) {
  if (corpus.empty()) throw ModelError("cannot scale an empty corpus");
  if (total <= 0) throw ModelError("scale total must be positive");
  Count factor = total / corpus.total();
  std::vector<Sample> scaled = corpus.samples();
  for (auto& s : scaled) s.count *= factor;
  return Corpus(scaled);
}

}  // namespace mmerge
