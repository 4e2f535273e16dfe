#pragma once

#include <iosfwd>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "mmerge/count.hpp"

namespace mmerge {

using Symbol = std::string;
using Sentence = std::vector<Symbol>;

enum class Tokenization {
  chars,  // every non-space code point is a token: "abab"
  words,  // whitespace-separated tokens: "the dog saw a cat"
};

Tokenization parse_tokenization(std::string_view name);

/// Splits one line of sample text according to the tokenization mode.
Sentence tokenize(std::string_view text, Tokenization mode);

/// Inverse of tokenize() for display and serialization.
std::string join_tokens(const Sentence& tokens, Tokenization mode);

struct Sample {
  Sentence tokens;
  Count count;

  bool operator==(const Sample&) const = default;
};

/// Weighted multiset of token strings. Identical samples are consolidated by
/// summing their counts; first-appearance order is kept. Immutable once built.
class Corpus {
 public:
  Corpus() = default;

  /// Validates (non-empty tokens, positive counts) and consolidates duplicates.
  explicit Corpus(const std::vector<Sample>& samples);

  const std::vector<Sample>& samples() const { return samples_; }
  const std::set<Symbol>& alphabet() const { return alphabet_; }
  std::size_t size() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }
  Count total() const;
  std::size_t max_length() const;

  /// The samples in [first, first + n), used by on-line incorporation.
  Corpus slice(std::size_t first, std::size_t n) const;

  bool operator==(const Corpus&) const = default;

 private:
  std::vector<Sample> samples_;
  std::set<Symbol> alphabet_;
};

/// Reads the corpus file format: one sample per line, optional
/// "<count>\t" prefix, '#' comments and blank lines ignored.
Corpus parse_corpus(std::string_view text, Tokenization mode);
Corpus load_corpus(std::istream& in, Tokenization mode);
Corpus load_corpus_file(const std::string& path, Tokenization mode);

/// Writes the corpus in the same format parse_corpus() reads.
std::string serialize_corpus(const Corpus& corpus, Tokenization mode);

/// Multiplies every count by total / corpus.total(); ratios are unchanged and
/// the new total is exactly `total`.
Corpus scale_counts(const Corpus& corpus, const Count& total);

}  // namespace mmerge
