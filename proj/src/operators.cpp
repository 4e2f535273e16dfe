#include "mmerge/operators.hpp"

namespace mmerge {

Hmm apply_op(const Hmm& model, const HmmOp& op) { return merge_states(model, op.q1, op.q2); }

Scfg apply_op(const Scfg& model, const ScfgOp& op) {
  if (const auto* m = std::get_if<MergeNonterminals>(&op)) return merge_nonterminals(model, m->keep, m->drop);
  if (const auto* c = std::get_if<Chunk>(&op)) return chunk_sequence(model, c->seq, model.fresh_name());
  const auto& cm = std::get<ChunkMerge>(op);
  Scfg chunked = chunk_sequence(model, cm.seq, model.fresh_name());
  return merge_nonterminals(chunked, cm.into, chunked.next_id() - 1);
}

std::vector<ScfgOp> scfg_candidates(const Scfg& g, std::size_t max_chunk_len, const Count& min_chunk_occurrences) {
  std::vector<ScfgOp> out;
  for (auto [keep, drop] : nonterminal_pairs(g)) out.emplace_back(MergeNonterminals{keep, drop});
  for (auto& c : chunk_candidates(g, max_chunk_len, min_chunk_occurrences)) out.emplace_back(Chunk{std::move(c.seq)});
  return out;
}

std::string op_string(const Hmm&, const HmmOp& op) {
  return "merge " + state_name(op.q1) + " " + state_name(op.q2);
}

std::string op_string(const Scfg& model, const ScfgOp& op) {
  if (const auto* m = std::get_if<MergeNonterminals>(&op)) return "merge " + model.name(m->keep) + " " + model.name(m->drop);
  if (const auto* c = std::get_if<Chunk>(&op)) return "chunk " + model.rhs_string(c->seq) + " -> " + model.fresh_name();
  const auto& cm = std::get<ChunkMerge>(op);
  return "chunk " + model.rhs_string(cm.seq) + " -> " + model.fresh_name() + "; merge " + model.name(cm.into) + " " +
         model.fresh_name();
}

}  // namespace mmerge
