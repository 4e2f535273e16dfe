#include "mmerge/search.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>
#include <set>

#include "mmerge/canonical.hpp"
#include "mmerge/kernels.hpp"

namespace mmerge {

namespace {

// Scores closer than this are treated as equal, so rounding noise in
// incremental rescoring can never count as an improvement.
constexpr double kImprovement = 1e-12;

bool improves(double candidate, double current) { return candidate > current + kImprovement; }

template <typename Model>
struct Traits;

template <>
struct Traits<Hmm> {
  using Op = HmmOp;
  using Scorer = HmmScorer;
};

template <>
struct Traits<Scfg> {
  using Op = ScfgOp;
  using Scorer = ScfgScorer;
};

template <typename Model>
struct Evaluation {
  std::vector<typename Traits<Model>::Op> ops;
  std::vector<PosteriorScore> scores;

  /// First index attaining the maximum log posterior, or npos when empty.
  std::size_t best() const {
    std::size_t b = std::string::npos;
    for (std::size_t i = 0; i < scores.size(); ++i)
      if (b == std::string::npos || scores[i].log_posterior > scores[b].log_posterior) b = i;
    return b;
  }
};

template <typename Model>
Evaluation<Model> evaluate(const Model& model, const Hyperparams& hyper, const SearchConfig& cfg,
                           SearchResult<Model>& stats) {
  Evaluation<Model> ev;
  ev.ops = search_candidates(model, cfg);
  typename Traits<Model>::Scorer scorer(model, hyper);
  std::span<const typename Traits<Model>::Op> ops(ev.ops);
  ev.scores = cfg.parallel ? score_candidates_parallel(scorer, ops) : score_candidates_serial(scorer, ops);
  stats.candidates_evaluated += ev.ops.size();
  if (cfg.verify_incremental) stats.candidates_verified += verify_candidate_scores(model, ops, ev.scores, hyper);
  return ev;
}

template <typename Model>
SearchResult<Model> greedy_impl(const Model& start, const Hyperparams& hyper, const SearchConfig& cfg) {
  SearchResult<Model> result;
  result.final_model = start;
  result.initial_score = log_posterior(start, hyper);
  PosteriorScore current = result.initial_score;
  Model& model = result.final_model;
  std::size_t steps = 0;

  while (steps < cfg.max_steps) {
    auto ev = evaluate(model, hyper, cfg, result);
    std::size_t b = ev.best();
    if (b == std::string::npos) break;
    if (improves(ev.scores[b].log_posterior, current.log_posterior)) {
      result.trace.push_back({++steps, op_json(model, ev.ops[b]), ev.scores[b], true, 0, false});
      model = apply_op(model, ev.ops[b]);
      current = ev.scores[b];
      continue;
    }

    // No single step improves: follow best-child chains from every candidate.
    std::vector<TraceEntry> best_chain;
    Model best_model = model;
    double best_value = current.log_posterior;
    if (cfg.lookahead >= 2) {
      for (std::size_t i = 0; i < ev.ops.size(); ++i) {
        std::vector<TraceEntry> chain{{0, op_json(model, ev.ops[i]), ev.scores[i], true, 0, true}};
        Model m = apply_op(model, ev.ops[i]);
        for (std::size_t depth = 1; depth < cfg.lookahead; ++depth) {
          auto next = evaluate(m, hyper, cfg, result);
          std::size_t nb = next.best();
          if (nb == std::string::npos) break;
          chain.push_back({0, op_json(m, next.ops[nb]), next.scores[nb], true, 0, true});
          m = apply_op(m, next.ops[nb]);
          if (improves(next.scores[nb].log_posterior, best_value)) {
            best_value = next.scores[nb].log_posterior;
            best_chain = chain;
            best_model = m;
          }
        }
      }
    }
    if (best_chain.empty() || steps + best_chain.size() > cfg.max_steps) {
      result.trace.push_back({steps + 1, op_json(model, ev.ops[b]), ev.scores[b], false, 0, false});
      break;
    }
    best_chain.back().lookahead = false;
    for (auto& e : best_chain) {
      e.step = ++steps;
      result.trace.push_back(std::move(e));
    }
    model = std::move(best_model);
    current = result.trace.back().score;
  }
  result.final_score = current;
  return result;
}

template <typename Model>
SearchResult<Model> beam_impl(const Model& start, const Hyperparams& hyper, const SearchConfig& cfg) {
  struct Member {
    Model model;
    PosteriorScore score;
    std::vector<std::pair<std::size_t, std::size_t>> lineage;  // (step, rank) of each ancestor
  };
  SearchResult<Model> result;
  result.initial_score = log_posterior(start, hyper);
  std::vector<Member> beam{{start, result.initial_score, {}}};
  Member best = beam.front();
  std::set<std::string> seen{canonical_key(start)};
  std::size_t stale = 0;
  std::size_t expansions = 0;

  while (stale < cfg.patience && expansions < cfg.max_steps) {
    ++expansions;
    std::vector<Evaluation<Model>> evals;
    evals.reserve(beam.size());
    for (const auto& member : beam) evals.push_back(evaluate(member.model, hyper, cfg, result));

    struct Child {
      double value;
      std::size_t member;
      std::size_t op;
    };
    std::vector<Child> children;
    for (std::size_t m = 0; m < evals.size(); ++m)
      for (std::size_t i = 0; i < evals[m].ops.size(); ++i)
        children.push_back({evals[m].scores[i].log_posterior, m, i});
    std::stable_sort(children.begin(), children.end(),
                     [](const Child& a, const Child& b) { return a.value > b.value; });

    std::vector<Member> next;
    for (const auto& c : children) {
      if (next.size() >= cfg.beam_width) break;
      const Member& parent = beam[c.member];
      const auto& op = evals[c.member].ops[c.op];
      Model child = apply_op(parent.model, op);
      if (!seen.insert(canonical_key(child)).second) continue;
      std::size_t rank = next.size();
      result.trace.push_back({expansions, op_json(parent.model, op), evals[c.member].scores[c.op], false, rank, false});
      Member m{std::move(child), evals[c.member].scores[c.op], parent.lineage};
      m.lineage.emplace_back(expansions, rank);
      next.push_back(std::move(m));
    }
    if (next.empty()) break;
    beam = std::move(next);
    if (improves(beam.front().score.log_posterior, best.score.log_posterior)) {
      best = beam.front();
      stale = 0;
    } else {
      ++stale;
    }
  }

  std::set<std::pair<std::size_t, std::size_t>> lineage(best.lineage.begin(), best.lineage.end());
  for (auto& e : result.trace) e.accepted = lineage.count({e.step, e.beam_rank}) > 0;
  result.final_model = std::move(best.model);
  result.final_score = best.score;
  return result;
}

template <typename Model>
SearchResult<Model> dispatch(const Model& model, const Hyperparams& hyper, const SearchConfig& cfg) {
  cfg.validate();
  hyper.validate();
  return cfg.strategy == Strategy::beam ? beam_impl(model, hyper, cfg) : greedy_impl(model, hyper, cfg);
}

template <typename Model, typename Incorporate>
SearchResult<Model> online_impl(const Corpus& corpus, const Hyperparams& hyper, const SearchConfig& cfg,
                                Incorporate incorporate) {
  cfg.validate();
  if (!cfg.online_batch) throw ConfigError("on-line induction needs a batch size");
  if (corpus.empty()) throw ModelError("cannot incorporate an empty corpus");
  const std::size_t batch = *cfg.online_batch;
  SearchResult<Model> result;
  std::optional<Model> model;
  std::size_t step_offset = 0;
  for (std::size_t first = 0, index = 1; first < corpus.size(); first += batch, ++index) {
    Corpus part = corpus.slice(first, batch);
    model = incorporate(model, part);
    PosteriorScore incorporated = log_posterior(*model, hyper);
    if (index == 1) result.initial_score = incorporated;
    nlohmann::json op = {{"type", "incorporate"},
                         {"args", {{"batch", index}, {"first", first}, {"samples", part.size()}}}};
    result.trace.push_back({step_offset, op, incorporated, false, 0, false});
    auto part_result = dispatch(*model, hyper, cfg);
    for (auto& e : part_result.trace) {
      e.step += step_offset;
      result.trace.push_back(std::move(e));
    }
    step_offset = result.trace.empty() ? step_offset : std::max(step_offset, result.trace.back().step);
    result.candidates_evaluated += part_result.candidates_evaluated;
    result.candidates_verified += part_result.candidates_verified;
    model = std::move(part_result.final_model);
    result.final_score = part_result.final_score;
  }
  result.final_model = std::move(*model);
  return result;
}

}  // namespace

void SearchConfig::validate() const {
  if (beam_width < 1) throw ConfigError("beam width must be at least 1");
  if (patience < 1) throw ConfigError("patience must be at least 1");
  if (max_steps < 1) throw ConfigError("max steps must be at least 1");
  if (max_chunk_len < 2) throw ConfigError("maximum chunk length must be at least 2");
  if (online_batch && *online_batch == 0) throw ConfigError("on-line batch size must be positive");
}

template <typename Model>
std::size_t SearchResult<Model>::accepted_steps() const {
  return static_cast<std::size_t>(std::count_if(trace.begin(), trace.end(), [](const auto& e) { return e.accepted; }));
}
template struct SearchResult<Hmm>;
template struct SearchResult<Scfg>;

nlohmann::json op_json(const Hmm&, const HmmOp& op) {
  return {{"type", "merge_states"}, {"args", {state_name(op.q1), state_name(op.q2)}}};
}

nlohmann::json op_json(const Scfg& model, const ScfgOp& op) {
  auto names = [&](const Rhs& seq) {
    nlohmann::json a = nlohmann::json::array();
    for (NtId x : seq) a.push_back(model.name(x));
    return a;
  };
  if (const auto* m = std::get_if<MergeNonterminals>(&op))
    return {{"type", "merge"}, {"args", {model.name(m->keep), model.name(m->drop)}}};
  if (const auto* c = std::get_if<Chunk>(&op))
    return {{"type", "chunk"}, {"args", {{"seq", names(c->seq)}, {"name", model.fresh_name()}}}};
  const auto& cm = std::get<ChunkMerge>(op);
  return {{"type", "chunk_merge"},
          {"args", {{"seq", names(cm.seq)}, {"name", model.fresh_name()}, {"into", model.name(cm.into)}}}};
}

std::vector<HmmOp> search_candidates(const Hmm& model, const SearchConfig& cfg) {
  std::vector<HmmOp> out;
  for (auto [a, b] : hmm_merge_candidates(model, cfg.prune_hmm_pairs)) out.push_back({a, b});
  return out;
}

std::vector<ScfgOp> search_candidates(const Scfg& model, const SearchConfig& cfg) {
  std::vector<ScfgOp> out;
  for (auto [keep, drop] : nonterminal_pairs(model)) out.emplace_back(MergeNonterminals{keep, drop});
  // Compound targets are phrase-level nonterminals: those without lexical productions.
  std::vector<NtId> targets;
  if (cfg.compound_chunks) {
    std::set<NtId> lexical;
    for (const auto& [key, _] : model.lexical()) lexical.insert(key.first);
    for (const auto& [id, _] : model.nonterminals())
      if (!lexical.count(id)) targets.push_back(id);
  }
  for (auto& c : chunk_candidates(model, cfg.max_chunk_len, cfg.min_chunk_occurrences)) {
    out.emplace_back(Chunk{c.seq});
    for (NtId into : targets) out.emplace_back(ChunkMerge{c.seq, into});
  }
  return out;
}

SearchResult<Hmm> greedy_search(const Hmm& model, const Hyperparams& hyper, const SearchConfig& cfg) {
  cfg.validate();
  hyper.validate();
  return greedy_impl(model, hyper, cfg);
}

SearchResult<Scfg> greedy_search(const Scfg& model, const Hyperparams& hyper, const SearchConfig& cfg) {
  cfg.validate();
  hyper.validate();
  return greedy_impl(model, hyper, cfg);
}

SearchResult<Hmm> beam_search(const Hmm& model, const Hyperparams& hyper, const SearchConfig& cfg) {
  cfg.validate();
  hyper.validate();
  return beam_impl(model, hyper, cfg);
}

SearchResult<Scfg> beam_search(const Scfg& model, const Hyperparams& hyper, const SearchConfig& cfg) {
  cfg.validate();
  hyper.validate();
  return beam_impl(model, hyper, cfg);
}

SearchResult<Hmm> search(const Hmm& model, const Hyperparams& hyper, const SearchConfig& cfg) {
  return dispatch(model, hyper, cfg);
}

SearchResult<Scfg> search(const Scfg& model, const Hyperparams& hyper, const SearchConfig& cfg) {
  return dispatch(model, hyper, cfg);
}

SearchResult<Hmm> online_induce_hmm(const Corpus& corpus, const Hyperparams& hyper, const SearchConfig& cfg) {
  return online_impl<Hmm>(corpus, hyper, cfg, [](const std::optional<Hmm>& m, const Corpus& part) {
    return m ? incorporate_hmm(*m, part) : incorporate_hmm(part);
  });
}

SearchResult<Scfg> online_induce_scfg(const Corpus& corpus, const Hyperparams& hyper, const SearchConfig& cfg) {
  return online_impl<Scfg>(corpus, hyper, cfg, [](const std::optional<Scfg>& m, const Corpus& part) {
    return m ? incorporate_scfg(*m, part) : incorporate_scfg(part);
  });
}

SearchResult<Hmm> induce_hmm(const Corpus& corpus, const Hyperparams& hyper, const SearchConfig& cfg) {
  if (cfg.online_batch) return online_induce_hmm(corpus, hyper, cfg);
  return dispatch(incorporate_hmm(corpus), hyper, cfg);
}

SearchResult<Scfg> induce_scfg(const Corpus& corpus, const Hyperparams& hyper, const SearchConfig& cfg) {
  if (cfg.online_batch) return online_induce_scfg(corpus, hyper, cfg);
  return dispatch(incorporate_scfg(corpus), hyper, cfg);
}

nlohmann::json trace_entry_json(const TraceEntry& e) {
  nlohmann::json j = {{"step", e.step},
                      {"op", e.op},
                      {"dl_bits", e.score.description_length_bits},
                      {"log_prior", e.score.log_structure_prior},
                      {"log_marginal", e.score.log_marginal_likelihood},
                      {"log_posterior", e.score.log_posterior},
                      {"accepted", e.accepted},
                      {"beam_rank", e.beam_rank}};
  if (e.lookahead) j["lookahead"] = true;
  return j;
}

void write_trace(std::ostream& out, const std::vector<TraceEntry>& trace) {
  for (const auto& e : trace) out << trace_entry_json(e).dump() << '\n';
}

}  // namespace mmerge
