#include "mmerge/scfg.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <random>

namespace mmerge {

Scfg::Scfg(std::string start_name) {
  names_.emplace(kStart, start_name);
  ids_.emplace(std::move(start_name), kStart);
}

const std::string& Scfg::name(NtId id) const {
  auto it = names_.find(id);
  if (it == names_.end()) throw ModelError("unknown nonterminal id " + std::to_string(id));
  return it->second;
}

std::optional<NtId> Scfg::find(const std::string& name) const {
  auto it = ids_.find(name);
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

NtId Scfg::id(const std::string& name) const {
  auto found = find(name);
  if (!found) throw ModelError("unknown nonterminal '" + name + "'");
  return *found;
}

NtId Scfg::add_nonterminal(const std::string& name) {
  if (name.empty()) throw ModelError("empty nonterminal name");
  if (ids_.count(name)) throw ModelError("nonterminal '" + name + "' already exists");
  NtId id = next_id();
  names_.emplace(id, name);
  ids_.emplace(name, id);
  return id;
}

std::string Scfg::fresh_name(const std::string& prefix) const {
  for (int k = 1;; ++k) {
    std::string candidate = prefix + std::to_string(k);
    if (!ids_.count(candidate)) return candidate;
  }
}

void Scfg::add_internal(NtId lhs, Rhs rhs, const Count& count) {
  if (rhs.empty()) throw ModelError("internal production with empty right-hand side");
  if (count <= 0) throw ModelError("production count must be positive");
  if (!has(lhs)) throw ModelError("unknown nonterminal id " + std::to_string(lhs));
  for (NtId x : rhs)
    if (!has(x)) throw ModelError("unknown nonterminal id " + std::to_string(x));
  if (rhs.size() == 1 && rhs[0] == lhs) throw ModelError("unit self-production " + name(lhs) + " -> " + name(lhs));
  internal_[{lhs, std::move(rhs)}] += count;
}

void Scfg::add_lexical(NtId lhs, const Symbol& terminal, const Count& count) {
  if (terminal.empty()) throw ModelError("empty terminal");
  if (count <= 0) throw ModelError("production count must be positive");
  if (!has(lhs)) throw ModelError("unknown nonterminal id " + std::to_string(lhs));
  lexical_[{lhs, terminal}] += count;
  terminals_.insert(terminal);
}

std::optional<NtId> Scfg::preterminal_of(const Symbol& terminal) const {
  for (const auto& [key, _] : lexical_)
    if (key.second == terminal) return key.first;
  return std::nullopt;
}

std::string Scfg::rhs_string(const Rhs& rhs) const {
  std::string out;
  for (std::size_t i = 0; i < rhs.size(); ++i) {
    if (i) out += ' ';
    out += name(rhs[i]);
  }
  return out;
}

void Scfg::validate() const {
  auto fail = [](const std::string& msg) { throw ModelError("invalid SCFG: " + msg); };
  std::set<NtId> has_rules;
  for (const auto& [key, c] : internal_) {
    const auto& [lhs, rhs] = key;
    if (!has(lhs)) fail("unknown left-hand side id " + std::to_string(lhs));
    if (rhs.empty()) fail("empty right-hand side");
    for (NtId x : rhs)
      if (!has(x)) fail("unknown nonterminal id " + std::to_string(x) + " in right-hand side");
    if (rhs.size() == 1 && rhs[0] == lhs) fail("unit self-production for " + name(lhs));
    if (c <= 0) fail("non-positive count");
    has_rules.insert(lhs);
  }
  for (const auto& [key, c] : lexical_) {
    if (!has(key.first)) fail("unknown left-hand side id " + std::to_string(key.first));
    if (c <= 0) fail("non-positive count");
    has_rules.insert(key.first);
  }
  for (const auto& [id, nm] : names_)
    if (id != kStart && !has_rules.count(id)) fail("nonterminal " + nm + " has no productions");
}

namespace {

std::string preterminal_name(const Symbol& terminal, int& anonymous) {
  if (terminal.size() == 1 && std::islower(static_cast<unsigned char>(terminal[0])) && terminal[0] != 's')
    return std::string(1, static_cast<char>(std::toupper(static_cast<unsigned char>(terminal[0]))));
  bool alnum = std::all_of(terminal.begin(), terminal.end(),
                           [](unsigned char ch) { return std::isalnum(ch) || ch == '_'; });
  if (alnum) return "T_" + terminal;
  return "T" + std::to_string(++anonymous);
}

}  // namespace

Scfg incorporate_scfg(const Corpus& corpus) { return incorporate_scfg(Scfg{}, corpus); }

Scfg incorporate_scfg(Scfg g, const Corpus& corpus) {
  if (corpus.empty()) throw ModelError("cannot incorporate an empty corpus");
  std::map<Symbol, NtId> pre;
  for (const auto& [key, _] : g.lexical()) pre.emplace(key.second, key.first);
  int anonymous = 0;
  for (const auto& sample : corpus.samples()) {
    Rhs rhs;
    for (const auto& tok : sample.tokens) {
      auto it = pre.find(tok);
      if (it == pre.end()) {
        std::string nm = preterminal_name(tok, anonymous);
        while (g.find(nm)) nm = "T" + std::to_string(++anonymous);
        it = pre.emplace(tok, g.add_nonterminal(nm)).first;
      }
      rhs.push_back(it->second);
      g.add_lexical(it->second, tok, sample.count);
    }
    g.add_internal(kStart, std::move(rhs), sample.count);
  }
  return g;
}

namespace detail {

void merge_productions(InternalMap& internal, LexicalMap& lexical, NtId keep, NtId drop) {
  auto map_id = [&](NtId x) { return x == drop ? keep : x; };
  InternalMap out;
  for (auto& [key, c] : internal) {
    NtId lhs = map_id(key.first);
    Rhs rhs = key.second;
    for (auto& x : rhs) x = map_id(x);
    if (rhs.size() == 1 && rhs[0] == lhs) continue;
    out[{lhs, std::move(rhs)}] += c;
  }
  internal = std::move(out);
  LexicalMap lex_out;
  for (auto& [key, c] : lexical) lex_out[{map_id(key.first), key.second}] += c;
  lexical = std::move(lex_out);
}

std::size_t replace_occurrences(const Rhs& rhs, const Rhs& seq, NtId name, Rhs& out) {
  out.clear();
  std::size_t replaced = 0;
  std::size_t i = 0;
  while (i < rhs.size()) {
    if (i + seq.size() <= rhs.size() && std::equal(seq.begin(), seq.end(), rhs.begin() + i)) {
      out.push_back(name);
      i += seq.size();
      ++replaced;
    } else {
      out.push_back(rhs[i++]);
    }
  }
  return replaced;
}

Count chunk_productions(InternalMap& internal, const Rhs& seq, NtId name) {
  InternalMap out;
  Count total = 0;
  Rhs rewritten;
  for (auto& [key, c] : internal) {
    std::size_t k = replace_occurrences(key.second, seq, name, rewritten);
    if (k == 0) {
      out[key] += c;
      continue;
    }
    total += c * static_cast<std::int64_t>(k);
    out[{key.first, rewritten}] += c;
  }
  if (total > 0) out[{name, seq}] += total;
  internal = std::move(out);
  return total;
}

}  // namespace detail

Scfg merge_nonterminals(const Scfg& g, NtId keep, NtId drop) {
  if (keep == drop) throw ModelError("cannot merge a nonterminal with itself");
  if (!g.has(keep)) throw ModelError("unknown nonterminal id " + std::to_string(keep));
  if (!g.has(drop)) throw ModelError("unknown nonterminal id " + std::to_string(drop));
  if (drop == kStart) throw ModelError("the start symbol must be the kept nonterminal");
  Scfg out = g;
  detail::merge_productions(out.internal_, out.lexical_, keep, drop);
  out.ids_.erase(out.names_.at(drop));
  out.names_.erase(drop);
  return out;
}

Scfg chunk_sequence(const Scfg& g, const Rhs& seq, const std::string& new_name) {
  if (seq.size() < 2) throw ModelError("chunk sequence must have at least two symbols");
  for (NtId x : seq)
    if (!g.has(x)) throw ModelError("unknown nonterminal id " + std::to_string(x));
  if (g.find(new_name)) throw ModelError("nonterminal '" + new_name + "' already exists");
  Scfg out = g;
  NtId x = out.add_nonterminal(new_name);
  Count total = detail::chunk_productions(out.internal_, seq, x);
  if (total.numerator() == 0) throw ModelError("sequence '" + g.rhs_string(seq) + "' does not occur in any production");
  return out;
}

namespace {

void add_table_ll(std::vector<double>& table, double& ll) {
  double n = 0;
  for (double x : table) n += x;
  for (double x : table)
    if (x > 0) ll += x * std::log(x / n);
  table.clear();
}

}  // namespace

double scfg_viterbi_log_likelihood(const Scfg& g) {
  std::map<NtId, std::vector<double>> tables;
  for (const auto& [key, c] : g.internal()) tables[key.first].push_back(to_double(c));
  for (const auto& [key, c] : g.lexical()) tables[key.first].push_back(to_double(c));
  double ll = 0;
  for (auto& [_, t] : tables) add_table_ll(t, ll);
  return ll;
}

std::vector<ChunkCandidate> chunk_candidates(const Scfg& g, std::size_t max_len, const Count& min_weight) {
  if (max_len < 2) throw ConfigError("maximum chunk length must be at least 2");
  std::map<Rhs, Count> weights;
  for (const auto& [key, c] : g.internal()) {
    const Rhs& rhs = key.second;
    for (std::size_t len = 2; len <= std::min(max_len, rhs.size()); ++len)
      for (std::size_t i = 0; i + len <= rhs.size(); ++i)
        weights[Rhs(rhs.begin() + i, rhs.begin() + i + len)] += c;
  }
  std::vector<ChunkCandidate> out;
  for (auto& [seq, w] : weights)
    if (w >= min_weight) out.push_back({seq, w});
  return out;
}

std::vector<std::pair<NtId, NtId>> nonterminal_pairs(const Scfg& g) {
  std::vector<std::pair<NtId, NtId>> out;
  for (auto i = g.nonterminals().begin(); i != g.nonterminals().end(); ++i)
    for (auto j = std::next(i); j != g.nonterminals().end(); ++j) out.emplace_back(i->first, j->first);
  return out;
}

namespace {

using Code = std::vector<int>;

/// Dense integer encoding of terminals and nonterminals for chart work.
struct Dense {
  std::vector<Symbol> terminals;
  std::map<Symbol, int> terminal_index;
  std::map<NtId, int> nt_index;
  std::vector<std::vector<std::vector<int>>> rules;  // per nonterminal, internal RHSs
  std::vector<std::vector<int>> lexical;             // per nonterminal, terminal codes

  explicit Dense(const Scfg& g) {
    for (const auto& t : g.terminals()) {
      terminal_index.emplace(t, static_cast<int>(terminals.size()));
      terminals.push_back(t);
    }
    for (const auto& [id, _] : g.nonterminals()) nt_index.emplace(id, static_cast<int>(nt_index.size()));
    rules.resize(nt_index.size());
    lexical.resize(nt_index.size());
    for (const auto& [key, _] : g.internal()) {
      std::vector<int> rhs;
      for (NtId x : key.second) rhs.push_back(nt_index.at(x));
      rules[nt_index.at(key.first)].push_back(std::move(rhs));
    }
    for (const auto& [key, _] : g.lexical())
      lexical[nt_index.at(key.first)].push_back(terminal_index.at(key.second));
  }
};

}  // namespace

std::set<Sentence> enumerate_scfg_language(const Scfg& g, std::size_t max_len) {
  Dense d(g);
  const std::size_t n = d.nt_index.size();
  // lang[x][len] holds strings of exactly `len` terminals derivable from x.
  std::vector<std::vector<std::set<Code>>> lang(n, std::vector<std::set<Code>>(max_len + 1));
  for (std::size_t x = 0; x < n; ++x)
    if (max_len >= 1)
      for (int t : d.lexical[x]) lang[x][1].insert(Code{t});

  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t x = 0; x < n; ++x) {
      for (const auto& rhs : d.rules[x]) {
        if (rhs.size() > max_len) continue;
        // partial[len]: concatenations of the first k RHS symbols.
        std::vector<std::set<Code>> partial(max_len + 1);
        partial[0].insert(Code{});
        for (std::size_t k = 0; k < rhs.size(); ++k) {
          std::size_t reserve = rhs.size() - k - 1;
          std::vector<std::set<Code>> next(max_len + 1);
          bool any = false;
          for (std::size_t a = 0; a <= max_len; ++a) {
            if (partial[a].empty()) continue;
            for (std::size_t b = 1; a + b + reserve <= max_len; ++b) {
              for (const auto& left : partial[a])
                for (const auto& right : lang[rhs[k]][b]) {
                  Code s = left;
                  s.insert(s.end(), right.begin(), right.end());
                  next[a + b].insert(std::move(s));
                  any = true;
                }
            }
          }
          partial = std::move(next);
          if (!any) break;
        }
        for (std::size_t len = 1; len <= max_len; ++len)
          for (auto& s : partial[len])
            if (lang[x][len].insert(s).second) changed = true;
      }
    }
  }

  std::set<Sentence> out;
  for (const auto& bucket : lang[d.nt_index.at(kStart)])
    for (const auto& code : bucket) {
      Sentence s;
      for (int t : code) s.push_back(d.terminals[t]);
      out.insert(std::move(s));
    }
  return out;
}

bool scfg_generates(const Scfg& g, const Sentence& sentence) {
  Dense d(g);
  const std::size_t n = sentence.size();
  const std::size_t m = d.nt_index.size();
  if (n == 0) return false;
  std::vector<int> word(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto it = d.terminal_index.find(sentence[i]);
    if (it == d.terminal_index.end()) return false;
    word[i] = it->second;
  }
  // chart[i][len][x]: nonterminal x derives sentence[i, i + len).
  std::vector<std::vector<std::vector<char>>> chart(
      n, std::vector<std::vector<char>>(n + 1, std::vector<char>(m, 0)));
  for (std::size_t len = 1; len <= n; ++len) {
    for (std::size_t i = 0; i + len <= n; ++i) {
      auto& cell = chart[i][len];
      if (len == 1)
        for (std::size_t x = 0; x < m; ++x)
          for (int t : d.lexical[x])
            if (t == word[i]) cell[x] = 1;
      bool changed = true;
      while (changed) {
        changed = false;
        for (std::size_t x = 0; x < m; ++x) {
          if (cell[x]) continue;
          for (const auto& rhs : d.rules[x]) {
            if (rhs.size() > len) continue;
            // Reachable end positions after matching a prefix of rhs.
            std::vector<char> reach(len + 1, 0);
            reach[0] = 1;
            for (std::size_t k = 0; k < rhs.size(); ++k) {
              std::vector<char> next(len + 1, 0);
              for (std::size_t a = 0; a < len; ++a) {
                if (!reach[a]) continue;
                for (std::size_t b = 1; a + b <= len; ++b)
                  if (chart[i + a][b][rhs[k]]) next[a + b] = 1;
              }
              reach = std::move(next);
            }
            if (reach[len]) {
              cell[x] = 1;
              changed = true;
              break;
            }
          }
        }
      }
    }
  }
  return chart[0][n][d.nt_index.at(kStart)] != 0;
}

Corpus sample_strings(const Scfg& g, const SampleOptions& options) {
  if (options.n < 1) throw ConfigError("sample count must be at least 1");
  struct Option {
    const Rhs* rhs = nullptr;
    const Symbol* terminal = nullptr;
    double weight = 1;
  };
  std::map<NtId, std::vector<Option>> choices;
  for (const auto& [key, c] : g.internal())
    choices[key.first].push_back({&key.second, nullptr, options.uniform ? 1.0 : to_double(c)});
  for (const auto& [key, c] : g.lexical())
    choices[key.first].push_back({nullptr, &key.second, options.uniform ? 1.0 : to_double(c)});
  if (!choices.count(kStart)) throw ModelError("start symbol has no productions");

  std::mt19937_64 rng(options.seed);
  auto uniform01 = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  auto pick = [&](const std::vector<Option>& opts) -> const Option& {
    double total = 0;
    for (const auto& o : opts) total += o.weight;
    double u = uniform01() * total;
    for (const auto& o : opts) {
      if (u < o.weight) return o;
      u -= o.weight;
    }
    return opts.back();
  };

  std::vector<Sample> samples;
  std::size_t rejections = 0;
  while (samples.size() < options.n) {
    Sentence out;
    std::vector<NtId> stack{kStart};
    std::size_t expansions = 0;
    bool rejected = false;
    while (!stack.empty()) {
      NtId x = stack.back();
      stack.pop_back();
      if (++expansions > options.max_expansions) {
        rejected = true;
        break;
      }
      auto it = choices.find(x);
      if (it == choices.end()) throw ModelError("nonterminal " + g.name(x) + " has no productions");
      const Option& o = pick(it->second);
      if (o.terminal) {
        out.push_back(*o.terminal);
      } else {
        for (auto r = o.rhs->rbegin(); r != o.rhs->rend(); ++r) stack.push_back(*r);
      }
    }
    if (rejected) {
      if (++rejections >= 1000) throw ModelError("1000 consecutive derivations exceeded the expansion limit");
      continue;
    }
    rejections = 0;
    samples.push_back({std::move(out), Count(1)});
  }
  return Corpus(samples);
}

}  // namespace mmerge
