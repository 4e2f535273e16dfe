#pragma once

#include <span>
#include <vector>

#include "mmerge/scoring.hpp"

namespace mmerge {

/// Scores every candidate operator against a shared scorer. The serial and
/// OpenMP versions return identical vectors: each entry depends only on its
/// own operator, never on evaluation order.
std::vector<PosteriorScore> score_candidates_serial(const HmmScorer& scorer, std::span<const HmmOp> ops);
std::vector<PosteriorScore> score_candidates_parallel(const HmmScorer& scorer, std::span<const HmmOp> ops);
std::vector<PosteriorScore> score_candidates_serial(const ScfgScorer& scorer, std::span<const ScfgOp> ops);
std::vector<PosteriorScore> score_candidates_parallel(const ScfgScorer& scorer, std::span<const ScfgOp> ops);

/// Applies every operator and compares the full recomputation with `scores`.
/// Throws std::logic_error on a difference above `tolerance`; returns the
/// number of candidates checked.
std::size_t verify_candidate_scores(const Hmm& model, std::span<const HmmOp> ops, std::span<const PosteriorScore> scores,
                                    const Hyperparams& hyper, double tolerance = 1e-9);
std::size_t verify_candidate_scores(const Scfg& model, std::span<const ScfgOp> ops,
                                    std::span<const PosteriorScore> scores, const Hyperparams& hyper,
                                    double tolerance = 1e-9);

/// Number of OpenMP threads the parallel kernels will use.
int kernel_threads();

}  // namespace mmerge
