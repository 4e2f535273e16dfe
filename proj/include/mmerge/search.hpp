#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <vector>

#include "json.hpp"
#include "mmerge/scoring.hpp"

namespace mmerge {

enum class Strategy { greedy, beam };

struct SearchConfig {
  Strategy strategy = Strategy::greedy;
  std::size_t beam_width = 1;
  std::size_t lookahead = 2;
  std::size_t patience = 3;
  std::size_t max_steps = 10000;
  std::size_t max_chunk_len = 4;
  Count min_chunk_occurrences = 2;
  bool prune_hmm_pairs = false;
  std::optional<std::size_t> online_batch;
  /// Also propose "chunk, then merge the new nonterminal into an existing one".
  bool compound_chunks = true;
  bool parallel = true;
  /// Check every incremental candidate score against full recomputation.
  bool verify_incremental = false;

  void validate() const;
};

struct TraceEntry {
  std::size_t step = 0;
  nlohmann::json op;
  PosteriorScore score;
  bool accepted = false;
  std::size_t beam_rank = 0;
  bool lookahead = false;  // intermediate link of an accepted lookahead chain
};

template <typename Model>
struct SearchResult {
  Model final_model;
  std::vector<TraceEntry> trace;
  PosteriorScore initial_score;
  PosteriorScore final_score;
  std::size_t candidates_evaluated = 0;
  std::size_t candidates_verified = 0;

  std::size_t accepted_steps() const;
};

enum class ModelKind { hmm, scfg };

nlohmann::json op_json(const Hmm& model, const HmmOp& op);
nlohmann::json op_json(const Scfg& model, const ScfgOp& op);

/// The operator set the searches explore for a model.
std::vector<HmmOp> search_candidates(const Hmm& model, const SearchConfig& cfg);
std::vector<ScfgOp> search_candidates(const Scfg& model, const SearchConfig& cfg);

SearchResult<Hmm> greedy_search(const Hmm& model, const Hyperparams& hyper, const SearchConfig& cfg);
SearchResult<Scfg> greedy_search(const Scfg& model, const Hyperparams& hyper, const SearchConfig& cfg);
SearchResult<Hmm> beam_search(const Hmm& model, const Hyperparams& hyper, const SearchConfig& cfg);
SearchResult<Scfg> beam_search(const Scfg& model, const Hyperparams& hyper, const SearchConfig& cfg);

/// Dispatches on cfg.strategy.
SearchResult<Hmm> search(const Hmm& model, const Hyperparams& hyper, const SearchConfig& cfg);
SearchResult<Scfg> search(const Scfg& model, const Hyperparams& hyper, const SearchConfig& cfg);

/// Incorporates the corpus in batches of cfg.online_batch samples and runs
/// the configured search to quiescence after each batch.
SearchResult<Hmm> online_induce_hmm(const Corpus& corpus, const Hyperparams& hyper, const SearchConfig& cfg);
SearchResult<Scfg> online_induce_scfg(const Corpus& corpus, const Hyperparams& hyper, const SearchConfig& cfg);

/// Incorporation followed by batch or on-line search.
SearchResult<Hmm> induce_hmm(const Corpus& corpus, const Hyperparams& hyper, const SearchConfig& cfg);
SearchResult<Scfg> induce_scfg(const Corpus& corpus, const Hyperparams& hyper, const SearchConfig& cfg);

nlohmann::json trace_entry_json(const TraceEntry& entry);
/// One JSON object per line.
void write_trace(std::ostream& out, const std::vector<TraceEntry>& trace);

}  // namespace mmerge
