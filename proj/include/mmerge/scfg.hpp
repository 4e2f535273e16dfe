#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "mmerge/corpus.hpp"

namespace mmerge {

using NtId = std::int32_t;
inline constexpr NtId kStart = 0;

using Rhs = std::vector<NtId>;
using InternalMap = std::map<std::pair<NtId, Rhs>, Count>;
using LexicalMap = std::map<std::pair<NtId, Symbol>, Count>;

/// Stochastic CFG whose production probabilities are implicit in usage
/// counts. Internal productions rewrite to nonterminal sequences; lexical
/// productions rewrite to a single terminal.
class Scfg {
 public:
  /// A grammar holding only the start symbol `start_name`.
  explicit Scfg(std::string start_name = "S");

  const std::map<NtId, std::string>& nonterminals() const { return names_; }
  const std::set<Symbol>& terminals() const { return terminals_; }
  const InternalMap& internal() const { return internal_; }
  const LexicalMap& lexical() const { return lexical_; }

  std::size_t num_nonterminals() const { return names_.size(); }
  bool has(NtId id) const { return names_.count(id) > 0; }
  const std::string& name(NtId id) const;
  std::optional<NtId> find(const std::string& name) const;
  /// Looks up by name, throwing ModelError for unknown names.
  NtId id(const std::string& name) const;

  /// Declares a new nonterminal; throws on a name collision.
  NtId add_nonterminal(const std::string& name);
  NtId next_id() const { return names_.rbegin()->first + 1; }
  /// First name of the form prefix1, prefix2, ... not already in use.
  std::string fresh_name(const std::string& prefix = "X") const;

  void add_internal(NtId lhs, Rhs rhs, const Count& count);
  void add_lexical(NtId lhs, const Symbol& terminal, const Count& count);

  /// The nonterminal owning the lexical production for `terminal`, if any.
  std::optional<NtId> preterminal_of(const Symbol& terminal) const;

  std::string rhs_string(const Rhs& rhs) const;

  /// Throws ModelError describing the first violated structural invariant.
  void validate() const;

  bool operator==(const Scfg&) const = default;

 private:
  std::map<NtId, std::string> names_;
  std::map<std::string, NtId> ids_;
  std::set<Symbol> terminals_;
  InternalMap internal_;
  LexicalMap lexical_;

  friend Scfg merge_nonterminals(const Scfg&, NtId, NtId);
  friend Scfg chunk_sequence(const Scfg&, const Rhs&, const std::string&);
};

/// One preterminal per terminal and one S production per distinct sample.
Scfg incorporate_scfg(const Corpus& corpus);

/// Adds samples to an existing grammar, reusing each terminal's preterminal.
Scfg incorporate_scfg(Scfg grammar, const Corpus& corpus);

/// Rewrites `drop` to `keep` everywhere, consolidating duplicate productions
/// and deleting unit self-productions keep -> keep.
Scfg merge_nonterminals(const Scfg& g, NtId keep, NtId drop);

/// Abbreviates left-to-right non-overlapping occurrences of `seq` by a new
/// nonterminal `new_name` with production new_name -> seq.
Scfg chunk_sequence(const Scfg& g, const Rhs& seq, const std::string& new_name);

double scfg_viterbi_log_likelihood(const Scfg& g);

struct ChunkCandidate {
  Rhs seq;
  Count weight;  // sum of production count x occurrence positions
};

/// Contiguous RHS subsequences of length 2..max_len with weight >= min_weight,
/// ordered by sequence.
std::vector<ChunkCandidate> chunk_candidates(const Scfg& g, std::size_t max_len, const Count& min_weight);

/// Unordered nonterminal pairs (keep, drop) with keep < drop, so S is kept.
std::vector<std::pair<NtId, NtId>> nonterminal_pairs(const Scfg& g);

std::set<Sentence> enumerate_scfg_language(const Scfg& g, std::size_t max_len);

bool scfg_generates(const Scfg& g, const Sentence& sentence);

struct SampleOptions {
  std::size_t n = 100;
  std::uint64_t seed = 1;
  std::size_t max_expansions = 200;
  bool uniform = false;  // ignore counts and pick productions uniformly
};

/// Top-down random derivations; over-long derivations are redrawn.
Corpus sample_strings(const Scfg& g, const SampleOptions& options);

namespace detail {

/// In-place production rewrites shared by the operators and the scorer.
void merge_productions(InternalMap& internal, LexicalMap& lexical, NtId keep, NtId drop);
Count chunk_productions(InternalMap& internal, const Rhs& seq, NtId name);
/// Left-to-right non-overlapping replacement; returns the number replaced.
std::size_t replace_occurrences(const Rhs& rhs, const Rhs& seq, NtId name, Rhs& out);

}  // namespace detail

}  // namespace mmerge
