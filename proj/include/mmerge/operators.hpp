#pragma once

#include <string>
#include <variant>
#include <vector>

#include "mmerge/hmm.hpp"
#include "mmerge/scfg.hpp"

namespace mmerge {

struct MergeStates {
  StateId q1;
  StateId q2;
  bool operator==(const MergeStates&) const = default;
};

struct MergeNonterminals {
  NtId keep;
  NtId drop;
  bool operator==(const MergeNonterminals&) const = default;
};

/// Chunk `seq` into a new nonterminal named model.fresh_name().
struct Chunk {
  Rhs seq;
  bool operator==(const Chunk&) const = default;
};

/// Chunk `seq`, then merge the new nonterminal into `into`.
struct ChunkMerge {
  Rhs seq;
  NtId into;
  bool operator==(const ChunkMerge&) const = default;
};

using HmmOp = MergeStates;
using ScfgOp = std::variant<MergeNonterminals, Chunk, ChunkMerge>;

Hmm apply_op(const Hmm& model, const HmmOp& op);
Scfg apply_op(const Scfg& model, const ScfgOp& op);

/// Merge candidates followed by chunk candidates, both in canonical order.
std::vector<ScfgOp> scfg_candidates(const Scfg& g, std::size_t max_chunk_len, const Count& min_chunk_occurrences);

/// Human-readable rendering such as "merge S X1" or "chunk A B -> X1".
std::string op_string(const Hmm& model, const HmmOp& op);
std::string op_string(const Scfg& model, const ScfgOp& op);

}  // namespace mmerge
