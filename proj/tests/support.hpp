#pragma once

#include <algorithm>
#include <random>
#include <map>
#include <string>
#include <vector>

#include "mmerge/corpus.hpp"
#include "mmerge/hmm.hpp"
#include "mmerge/model_io.hpp"
#include "mmerge/scfg.hpp"
#include "mmerge/scoring.hpp"
#include "mmerge/search.hpp"

namespace mmerge::testing {

struct TargetRow {
  std::string name;
  std::string grammar;  // SCFG text format, counts ignored
  std::size_t samples;  // distinct training strings
  std::size_t beam;     // 1 = greedy
};

/// Formal-language targets with their distinct-sample counts.
inline const std::vector<TargetRow>& table_rows() {
  static const std::vector<TargetRow> rows = {
      {"parentheses", "start: S\nS -> L R # 1\nS -> L S R # 1\nS -> S S # 1\nL => '(' # 1\nR => ')' # 1\n", 8, 1},
      {"a2n", "start: S\nS -> A A # 1\nS -> S S # 1\nA => 'a' # 1\n", 5, 1},
      {"abn", "start: S\nS -> A B # 1\nS -> S S # 1\nA => 'a' # 1\nB => 'b' # 1\n", 5, 1},
      {"anbn", "start: S\nS -> A B # 1\nS -> A S B # 1\nA => 'a' # 1\nB => 'b' # 1\n", 5, 3},
      {"wcw", "start: S\nS -> C # 1\nS -> A S A # 1\nS -> B S B # 1\nA => 'a' # 1\nB => 'b' # 1\nC => 'c' # 1\n", 7, 3},
      {"addition",
       "start: S\nS => 'a' # 1\nS => 'b' # 1\nS -> L S R # 1\nS -> S P S # 1\nL => '(' # 1\nR => ')' # 1\n"
       "P => '+' # 1\n",
       23, 4},
      {"shape", "start: S\nS -> D Y # 1\nS -> B Y S # 1\nY => 'a' # 1\nY -> C Y # 1\nB => 'b' # 1\nC => 'c' # 1\nD => 'd' # 1\n",
       11, 4},
  };
  return rows;
}

inline const char* kClauseGrammar = R"(start: S
S -> NP VP # 1
VP -> Verb NP # 1
NP -> Art Noun # 1
NP -> Art Noun RC # 1
RC -> Rel VP # 1
Verb => 'saw' # 1
Verb => 'heard' # 1
Noun => 'cat' # 1
Noun => 'dog' # 1
Noun => 'mouse' # 1
Art => 'a' # 1
Art => 'the' # 1
Rel => 'that' # 1
)";

/// Probabilities of all strings of length <= max_len under uniform
/// production probabilities, by exhaustive leftmost derivation.
inline std::map<Sentence, Count> string_probabilities(const Scfg& g, std::size_t max_len) {
  struct Option {
    std::vector<std::string> rhs;  // "#<id>" for nonterminals, terminals otherwise
  };
  std::map<NtId, std::vector<std::vector<std::pair<bool, std::string>>>> options;
  for (const auto& [key, _] : g.internal()) {
    std::vector<std::pair<bool, std::string>> rhs;
    for (NtId x : key.second) rhs.emplace_back(true, std::to_string(x));
    options[key.first].push_back(std::move(rhs));
  }
  for (const auto& [key, _] : g.lexical()) options[key.first].push_back({{false, key.second}});

  std::map<Sentence, Count> probs;
  using Form = std::vector<std::pair<bool, std::string>>;
  std::vector<std::pair<Form, Count>> stack{{Form{{true, std::to_string(kStart)}}, Count(1)}};
  while (!stack.empty()) {
    auto [form, p] = std::move(stack.back());
    stack.pop_back();
    if (form.size() > max_len) continue;
    auto it = std::find_if(form.begin(), form.end(), [](const auto& s) { return s.first; });
    if (it == form.end()) {
      Sentence s;
      for (const auto& sym : form) s.push_back(sym.second);
      probs[s] += p;
      continue;
    }
    const auto& alts = options.at(std::stoi(it->second));
    std::size_t pos = static_cast<std::size_t>(it - form.begin());
    for (const auto& alt : alts) {
      Form next(form.begin(), form.begin() + static_cast<std::ptrdiff_t>(pos));
      next.insert(next.end(), alt.begin(), alt.end());
      next.insert(next.end(), form.begin() + static_cast<std::ptrdiff_t>(pos) + 1, form.end());
      stack.emplace_back(std::move(next), p / static_cast<std::int64_t>(alts.size()));
    }
  }
  return probs;
}

/// The k most probable strings (ties by length, then lexicographically),
/// weighted by probability and scaled to `total`.
inline Corpus top_k_corpus(const Scfg& target, std::size_t k, std::size_t max_len = 12, Count total = 50) {
  auto probs = string_probabilities(target, max_len);
  std::vector<std::pair<Sentence, Count>> items(probs.begin(), probs.end());
  std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    if (a.first.size() != b.first.size()) return a.first.size() < b.first.size();
    return a.first < b.first;
  });
  items.resize(std::min(k, items.size()));
  std::vector<Sample> samples;
  for (auto& [s, p] : items) samples.push_back({s, p});
  return scale_counts(Corpus(samples), total);
}

/// Even palindromes ww^R with |w| <= 3 and no symbol run longer than two,
/// weighted by their probability under S -> aa | bb | aSa | bSb.
inline Corpus palindrome_corpus() {
  std::vector<Sample> samples;
  for (std::size_t half = 1; half <= 3; ++half) {
    for (unsigned bits = 0; bits < (1u << half); ++bits) {
      std::string w;
      for (std::size_t i = 0; i < half; ++i) w += (bits >> (half - 1 - i)) & 1u ? 'b' : 'a';
      std::string p = w + std::string(w.rbegin(), w.rend());
      if (p.find("aaa") != std::string::npos || p.find("bbb") != std::string::npos) continue;
      samples.push_back({tokenize(p, Tokenization::chars), Count(1, std::int64_t{1} << (2 * half))});
    }
  }
  return scale_counts(Corpus(samples), 50);
}

inline std::set<Sentence> even_palindromes(std::size_t max_len) {
  std::set<Sentence> out;
  for (std::size_t half = 1; 2 * half <= max_len; ++half)
    for (unsigned bits = 0; bits < (1u << half); ++bits) {
      Sentence w;
      for (std::size_t i = 0; i < half; ++i) w.push_back((bits >> (half - 1 - i)) & 1u ? "b" : "a");
      Sentence p = w;
      p.insert(p.end(), w.rbegin(), w.rend());
      out.insert(p);
    }
  return out;
}

inline Sentence chars(const std::string& s) { return tokenize(s, Tokenization::chars); }

/// Between `min_samples` and `max_samples` random strings over `alphabet`
/// with lengths 1..max_len and counts 1..3.
template <typename Rng>
Corpus random_corpus(Rng& rng, const std::string& alphabet, std::size_t min_samples, std::size_t max_samples,
                     std::size_t max_len) {
  std::vector<Sample> samples;
  std::size_t n = min_samples + rng() % (max_samples - min_samples + 1);
  for (std::size_t i = 0; i < n; ++i) {
    Sentence s(1 + rng() % max_len);
    for (auto& t : s) t = std::string(1, alphabet[rng() % alphabet.size()]);
    samples.push_back({s, Count(1 + static_cast<std::int64_t>(rng() % 3))});
  }
  return Corpus(samples);
}

/// An incorporated grammar after up to `max_merges` random merges.
template <typename Rng>
Scfg random_grammar(Rng& rng, const std::string& alphabet, std::size_t max_merges) {
  Scfg g = incorporate_scfg(random_corpus(rng, alphabet, 2, 5, 5));
  std::size_t merges = rng() % (max_merges + 1);
  for (std::size_t i = 0; i < merges; ++i) {
    auto pairs = nonterminal_pairs(g);
    if (pairs.empty()) break;
    auto [keep, drop] = pairs[rng() % pairs.size()];
    g = merge_nonterminals(g, keep, drop);
  }
  return g;
}

/// Re-applies one trace operator, resolving the names it records.
inline Hmm replay_op(const Hmm& m, const nlohmann::json& op) {
  auto q = [](const nlohmann::json& s) { return static_cast<StateId>(std::stoi(s.get<std::string>())); };
  return merge_states(m, q(op["args"][0]), q(op["args"][1]));
}

inline Scfg replay_op(const Scfg& m, const nlohmann::json& op) {
  const std::string type = op["type"];
  const auto& args = op["args"];
  if (type == "merge") return merge_nonterminals(m, m.id(args[0]), m.id(args[1]));
  Rhs seq;
  for (const auto& x : args["seq"]) seq.push_back(m.id(x));
  Scfg out = chunk_sequence(m, seq, args["name"]);
  if (type == "chunk_merge") out = merge_nonterminals(out, out.id(args["into"]), out.id(args["name"]));
  return out;
}

/// The model reached by applying the accepted operators of a trace in order.
template <typename Model>
Model replay_accepted(Model m, const std::vector<TraceEntry>& trace) {
  for (const auto& e : trace)
    if (e.accepted) m = replay_op(m, e.op);
  return m;
}

}  // namespace mmerge::testing
