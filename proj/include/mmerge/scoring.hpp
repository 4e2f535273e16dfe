#pragma once

#include <map>
#include <span>
#include <vector>

#include "mmerge/operators.hpp"

namespace mmerge {

struct Hyperparams {
  double alpha = 1.0;         // symmetric Dirichlet concentration
  double prior_weight = 1.0;  // lambda, multiplies the description length

  void validate() const;
};

struct PosteriorScore {
  double log_structure_prior = 0;
  double log_marginal_likelihood = 0;
  double log_posterior = 0;
  double description_length_bits = 0;
};

PosteriorScore make_score(double dl_bits, double log_marginal, const Hyperparams& hyper);

double hmm_description_length(const Hmm& hmm);
double scfg_description_length(const Scfg& g);

/// Log Dirichlet-multinomial marginal of a count vector with K = counts.size().
double log_dirichlet_multinomial(std::span<const double> counts, double alpha);
double log_dirichlet_multinomial(const std::vector<Count>& counts, double alpha);

PosteriorScore log_posterior(const Hmm& hmm, const Hyperparams& hyper);
PosteriorScore log_posterior(const Scfg& g, const Hyperparams& hyper);

/// Precomputed per-table terms of one HMM for cheap rescoring of merges.
/// rescore() is const and safe to call concurrently.
class HmmScorer {
 public:
  HmmScorer(const Hmm& hmm, const Hyperparams& hyper);

  const PosteriorScore& base() const { return base_; }
  PosteriorScore rescore(const HmmOp& op) const;

 private:
  const Hmm& hmm_;
  Hyperparams hyper_;
  PosteriorScore base_;
  std::size_t transition_entries_ = 0;
  std::size_t emission_entries_ = 0;
  double marginal_ = 0;
  std::map<StateId, double> transition_marginal_;
  std::map<StateId, double> emission_marginal_;
  std::map<StateId, std::set<StateId>> predecessors_;
};

/// Per-left-hand-side terms of one SCFG for cheap rescoring of merges,
/// chunks and chunk-merges. rescore() is const and safe to call concurrently.
class ScfgScorer {
 public:
  ScfgScorer(const Scfg& g, const Hyperparams& hyper);

  const PosteriorScore& base() const { return base_; }
  PosteriorScore rescore(const ScfgOp& op) const;

 private:
  struct Delta {
    double marginal = 0;
    long occurrences = 0;
    long lexical = 0;
  };

  std::set<NtId> users_of(const Rhs& seq) const;
  /// Old terms minus new terms after `rewrite` is applied to the tables of `lhs_set`.
  template <typename Rewrite>
  Delta rewrite_delta(const std::set<NtId>& lhs_set, Rewrite rewrite) const;

  const Scfg& g_;
  Hyperparams hyper_;
  PosteriorScore base_;
  long occurrences_ = 0;
  long lexical_ = 0;
  double marginal_ = 0;
  std::map<NtId, double> lhs_marginal_;
  std::map<NtId, std::set<NtId>> users_;
};

/// Score of `op` applied to `model`, adjusting only the touched terms of `base`.
PosteriorScore rescore_after(const Hmm& model, const HmmOp& op, const PosteriorScore& base, const Hyperparams& hyper);
PosteriorScore rescore_after(const Scfg& model, const ScfgOp& op, const PosteriorScore& base, const Hyperparams& hyper);

}  // namespace mmerge
