#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <set>
#include <utility>
#include <vector>

#include "mmerge/corpus.hpp"

namespace mmerge {

using StateId = std::int32_t;

inline constexpr StateId kInitial = 0;
inline constexpr StateId kFinal = std::numeric_limits<StateId>::max();

/// Discrete HMM whose parameters are Viterbi counts. An emission or
/// transition entry exists iff its count is positive, so the count tables are
/// both the sufficient statistics and the model topology.
class Hmm {
 public:
  using EmissionTable = std::map<Symbol, Count>;
  using TransitionTable = std::map<StateId, Count>;

  Hmm() = default;

  const std::map<StateId, EmissionTable>& emissions() const { return emissions_; }
  const std::map<StateId, TransitionTable>& transitions() const { return transitions_; }
  const std::set<Symbol>& alphabet() const { return alphabet_; }

  /// Emitting states in ascending order.
  std::vector<StateId> emitting_states() const;
  bool has_state(StateId q) const;
  /// Number of states including INITIAL and FINAL.
  std::size_t num_states() const { return emissions_.size() + 2; }
  std::size_t num_transition_entries() const;
  std::size_t num_emission_entries() const;
  StateId next_state_id() const;

  /// Predecessors of every state that has at least one incoming transition.
  std::map<StateId, std::set<StateId>> predecessors() const;

  /// Adds `count` to an entry, creating it (and the state) if needed.
  void add_emission(StateId q, const Symbol& sym, const Count& count);
  void add_transition(StateId from, StateId to, const Count& count);
  void add_symbol(const Symbol& sym) { alphabet_.insert(sym); }

  /// Throws ModelError describing the first violated structural invariant.
  void validate() const;

  bool operator==(const Hmm&) const = default;

 private:
  std::map<StateId, EmissionTable> emissions_;
  std::map<StateId, TransitionTable> transitions_;
  std::set<Symbol> alphabet_;

  friend Hmm merge_states(const Hmm&, StateId, StateId);
  friend void merge_states_in_place(Hmm&, StateId, StateId);
};

/// One fresh INITIAL-to-FINAL chain per distinct sample.
Hmm incorporate_hmm(const Corpus& corpus);

/// Adds chains for `corpus` to an existing model, with fresh state ids.
Hmm incorporate_hmm(Hmm model, const Corpus& corpus);

/// Replaces q1 and q2 by one state carrying id q1 whose tables are the sums.
Hmm merge_states(const Hmm& hmm, StateId q1, StateId q2);
void merge_states_in_place(Hmm& hmm, StateId q1, StateId q2);

/// Sum over all multinomials of n_j ln(n_j / n).
double hmm_viterbi_log_likelihood(const Hmm& hmm);

/// Unordered emitting-state pairs (a < b) in lexicographic order. With
/// `prune`, only pairs sharing an emitted symbol or a predecessor.
std::vector<std::pair<StateId, StateId>> hmm_merge_candidates(const Hmm& hmm, bool prune);

/// Every string of length <= max_len with a nonzero-probability path.
std::set<Sentence> enumerate_hmm_language(const Hmm& hmm, std::size_t max_len);

bool hmm_generates(const Hmm& hmm, const Sentence& sentence);

std::string state_name(StateId q);

}  // namespace mmerge
