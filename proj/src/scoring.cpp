#include "mmerge/scoring.hpp"

#include <algorithm>
#include <cmath>

namespace mmerge {

namespace {

constexpr double kLn2 = 0.69314718055994530942;

double lgam(double x) {
  int sign = 0;
  return lgamma_r(x, &sign);
}

double bits(std::size_t n) { return std::log2(static_cast<double>(std::max<std::size_t>(n, 2))); }

template <typename Table>
double table_marginal(const Table& table, double alpha) {
  std::vector<double> counts;
  counts.reserve(table.size());
  for (const auto& [_, c] : table) counts.push_back(to_double(c));
  return log_dirichlet_multinomial(counts, alpha);
}

}  // namespace

void Hyperparams::validate() const {
  if (!(alpha > 0)) throw ConfigError("alpha must be positive");
  if (!(prior_weight > 0)) throw ConfigError("lambda must be positive");
}

PosteriorScore make_score(double dl_bits, double log_marginal, const Hyperparams& hyper) {
  PosteriorScore s;
  s.description_length_bits = dl_bits;
  s.log_structure_prior = -hyper.prior_weight * dl_bits * kLn2;
  s.log_marginal_likelihood = log_marginal;
  s.log_posterior = s.log_structure_prior + s.log_marginal_likelihood;
  return s;
}

double hmm_description_length(const Hmm& hmm) {
  return static_cast<double>(hmm.num_transition_entries()) * bits(hmm.num_states()) +
         static_cast<double>(hmm.num_emission_entries()) * bits(hmm.alphabet().size());
}

double scfg_description_length(const Scfg& g) {
  std::size_t occurrences = 0;
  for (const auto& [key, _] : g.internal()) occurrences += 1 + key.second.size();
  occurrences += g.lexical().size();
  return static_cast<double>(occurrences) * bits(g.num_nonterminals()) +
         static_cast<double>(g.lexical().size()) * bits(g.terminals().size());
}

double log_dirichlet_multinomial(std::span<const double> counts, double alpha) {
  if (counts.empty()) throw ModelError("Dirichlet-multinomial needs at least one category");
  if (!(alpha > 0)) throw ModelError("alpha must be positive");
  double k = static_cast<double>(counts.size());
  double n = 0;
  double sum = 0;
  for (double c : counts) {
    if (c < 0) throw ModelError("negative count in Dirichlet-multinomial");
    n += c;
    sum += lgam(alpha + c) - lgam(alpha);
  }
  return lgam(k * alpha) - lgam(k * alpha + n) + sum;
}

double log_dirichlet_multinomial(const std::vector<Count>& counts, double alpha) {
  std::vector<double> d;
  d.reserve(counts.size());
  for (const auto& c : counts) d.push_back(to_double(c));
  return log_dirichlet_multinomial(d, alpha);
}

PosteriorScore log_posterior(const Hmm& hmm, const Hyperparams& hyper) {
  double marginal = 0;
  for (const auto& [_, t] : hmm.transitions()) marginal += table_marginal(t, hyper.alpha);
  for (const auto& [_, e] : hmm.emissions()) marginal += table_marginal(e, hyper.alpha);
  return make_score(hmm_description_length(hmm), marginal, hyper);
}

namespace {

/// Count tables of an SCFG pooled per left-hand side.
std::map<NtId, std::vector<Count>> lhs_tables(const InternalMap& internal, const LexicalMap& lexical) {
  std::map<NtId, std::vector<Count>> tables;
  for (const auto& [key, c] : internal) tables[key.first].push_back(c);
  for (const auto& [key, c] : lexical) tables[key.first].push_back(c);
  return tables;
}

}  // namespace

PosteriorScore log_posterior(const Scfg& g, const Hyperparams& hyper) {
  double marginal = 0;
  for (const auto& [_, t] : lhs_tables(g.internal(), g.lexical())) marginal += log_dirichlet_multinomial(t, hyper.alpha);
  return make_score(scfg_description_length(g), marginal, hyper);
}

HmmScorer::HmmScorer(const Hmm& hmm, const Hyperparams& hyper) : hmm_(hmm), hyper_(hyper) {
  for (const auto& [q, t] : hmm.transitions()) {
    double m = table_marginal(t, hyper.alpha);
    transition_marginal_[q] = m;
    marginal_ += m;
    transition_entries_ += t.size();
  }
  for (const auto& [q, e] : hmm.emissions()) {
    double m = table_marginal(e, hyper.alpha);
    emission_marginal_[q] = m;
    marginal_ += m;
    emission_entries_ += e.size();
  }
  predecessors_ = hmm.predecessors();
  base_ = make_score(hmm_description_length(hmm), marginal_, hyper);
}

PosteriorScore HmmScorer::rescore(const HmmOp& op) const {
  const auto [q1, q2] = op;
  if (q1 == q2) throw ModelError("cannot merge a state with itself");
  for (StateId q : {q1, q2})
    if (q == kInitial || q == kFinal || !hmm_.emissions().count(q))
      throw ModelError("state " + state_name(q) + " is not an emitting state of the model");

  std::set<StateId> sources{q1, q2};
  for (StateId q : {q1, q2})
    if (auto it = predecessors_.find(q); it != predecessors_.end()) sources.insert(it->second.begin(), it->second.end());

  auto map_id = [&](StateId q) { return q == q2 ? q1 : q; };
  double marginal = marginal_;
  long transitions = static_cast<long>(transition_entries_);
  long emissions = static_cast<long>(emission_entries_);

  std::map<StateId, Hmm::TransitionTable> rewritten;
  for (StateId s : sources) {
    auto it = hmm_.transitions().find(s);
    if (it == hmm_.transitions().end()) continue;
    marginal -= transition_marginal_.at(s);
    transitions -= static_cast<long>(it->second.size());
    auto& table = rewritten[map_id(s)];
    for (const auto& [to, c] : it->second) table[map_id(to)] += c;
  }
  for (const auto& [_, table] : rewritten) {
    marginal += table_marginal(table, hyper_.alpha);
    transitions += static_cast<long>(table.size());
  }

  Hmm::EmissionTable merged = hmm_.emissions().at(q1);
  for (const auto& [sym, c] : hmm_.emissions().at(q2)) merged[sym] += c;
  marginal -= emission_marginal_.at(q1) + emission_marginal_.at(q2);
  marginal += table_marginal(merged, hyper_.alpha);
  emissions += static_cast<long>(merged.size()) - static_cast<long>(hmm_.emissions().at(q1).size()) -
               static_cast<long>(hmm_.emissions().at(q2).size());

  double dl = static_cast<double>(transitions) * bits(hmm_.num_states() - 1) +
              static_cast<double>(emissions) * bits(hmm_.alphabet().size());
  return make_score(dl, marginal, hyper_);
}

ScfgScorer::ScfgScorer(const Scfg& g, const Hyperparams& hyper) : g_(g), hyper_(hyper) {
  for (const auto& [lhs, t] : lhs_tables(g.internal(), g.lexical())) {
    double m = log_dirichlet_multinomial(t, hyper.alpha);
    lhs_marginal_[lhs] = m;
    marginal_ += m;
  }
  for (const auto& [key, _] : g.internal()) {
    occurrences_ += 1 + static_cast<long>(key.second.size());
    for (NtId x : key.second) users_[x].insert(key.first);
  }
  occurrences_ += static_cast<long>(g.lexical().size());
  lexical_ = static_cast<long>(g.lexical().size());
  base_ = make_score(scfg_description_length(g), marginal_, hyper);
}

std::set<NtId> ScfgScorer::users_of(const Rhs& seq) const {
  std::set<NtId> out;
  auto it = users_.find(seq.front());
  if (it == users_.end()) return out;
  for (NtId lhs : it->second) {
    auto first = g_.internal().lower_bound({lhs, Rhs{}});
    for (auto p = first; p != g_.internal().end() && p->first.first == lhs; ++p) {
      const Rhs& rhs = p->first.second;
      if (std::search(rhs.begin(), rhs.end(), seq.begin(), seq.end()) != rhs.end()) {
        out.insert(lhs);
        break;
      }
    }
  }
  return out;
}

template <typename Rewrite>
ScfgScorer::Delta ScfgScorer::rewrite_delta(const std::set<NtId>& lhs_set, Rewrite rewrite) const {
  Delta d;
  InternalMap internal;
  LexicalMap lexical;
  for (NtId lhs : lhs_set) {
    if (auto it = lhs_marginal_.find(lhs); it != lhs_marginal_.end()) d.marginal -= it->second;
    for (auto p = g_.internal().lower_bound({lhs, Rhs{}}); p != g_.internal().end() && p->first.first == lhs; ++p) {
      internal.insert(*p);
      d.occurrences -= 1 + static_cast<long>(p->first.second.size());
    }
    for (auto p = g_.lexical().lower_bound({lhs, Symbol{}}); p != g_.lexical().end() && p->first.first == lhs; ++p) {
      lexical.insert(*p);
      d.occurrences -= 1;
      d.lexical -= 1;
    }
  }
  rewrite(internal, lexical);
  for (const auto& [_, t] : lhs_tables(internal, lexical)) d.marginal += log_dirichlet_multinomial(t, hyper_.alpha);
  for (const auto& [key, _] : internal) d.occurrences += 1 + static_cast<long>(key.second.size());
  d.occurrences += static_cast<long>(lexical.size());
  d.lexical += static_cast<long>(lexical.size());
  return d;
}

PosteriorScore ScfgScorer::rescore(const ScfgOp& op) const {
  Delta d;
  std::size_t n = g_.num_nonterminals();
  if (const auto* m = std::get_if<MergeNonterminals>(&op)) {
    if (m->keep == m->drop) throw ModelError("cannot merge a nonterminal with itself");
    if (!g_.has(m->keep) || !g_.has(m->drop)) throw ModelError("merge refers to an unknown nonterminal");
    if (m->drop == kStart) throw ModelError("the start symbol must be the kept nonterminal");
    std::set<NtId> lhs_set{m->keep, m->drop};
    if (auto it = users_.find(m->drop); it != users_.end()) lhs_set.insert(it->second.begin(), it->second.end());
    d = rewrite_delta(lhs_set, [&](InternalMap& in, LexicalMap& lex) {
      detail::merge_productions(in, lex, m->keep, m->drop);
    });
    n -= 1;
  } else {
    const Rhs& seq = std::holds_alternative<Chunk>(op) ? std::get<Chunk>(op).seq : std::get<ChunkMerge>(op).seq;
    if (seq.size() < 2) throw ModelError("chunk sequence must have at least two symbols");
    for (NtId x : seq)
      if (!g_.has(x)) throw ModelError("chunk refers to an unknown nonterminal");
    std::set<NtId> lhs_set = users_of(seq);
    if (lhs_set.empty()) throw ModelError("sequence '" + g_.rhs_string(seq) + "' does not occur in any production");
    NtId fresh = g_.next_id();
    if (const auto* cm = std::get_if<ChunkMerge>(&op)) {
      if (!g_.has(cm->into)) throw ModelError("chunk-merge target is unknown");
      lhs_set.insert(cm->into);
      d = rewrite_delta(lhs_set, [&](InternalMap& in, LexicalMap& lex) {
        detail::chunk_productions(in, seq, fresh);
        detail::merge_productions(in, lex, cm->into, fresh);
      });
    } else {
      d = rewrite_delta(lhs_set, [&](InternalMap& in, LexicalMap&) { detail::chunk_productions(in, seq, fresh); });
      n += 1;
    }
  }
  long occurrences = occurrences_ + d.occurrences;
  long lexical = lexical_ + d.lexical;
  double dl = static_cast<double>(occurrences) * bits(n) + static_cast<double>(lexical) * bits(g_.terminals().size());
  return make_score(dl, marginal_ + d.marginal, hyper_);
}

PosteriorScore rescore_after(const Hmm& model, const HmmOp& op, const PosteriorScore& base, const Hyperparams& hyper) {
  HmmScorer scorer(model, hyper);
  PosteriorScore s = scorer.rescore(op);
  return make_score(s.description_length_bits,
                    base.log_marginal_likelihood + (s.log_marginal_likelihood - scorer.base().log_marginal_likelihood),
                    hyper);
}

PosteriorScore rescore_after(const Scfg& model, const ScfgOp& op, const PosteriorScore& base, const Hyperparams& hyper) {
  ScfgScorer scorer(model, hyper);
  PosteriorScore s = scorer.rescore(op);
  return make_score(s.description_length_bits,
                    base.log_marginal_likelihood + (s.log_marginal_likelihood - scorer.base().log_marginal_likelihood),
                    hyper);
}

}  // namespace mmerge
