#include "mmerge/kernels.hpp"

#include <cmath>
#include <exception>
#include <stdexcept>

#include <omp.h>

namespace mmerge {

namespace {

template <typename Scorer, typename Op>
std::vector<PosteriorScore> serial(const Scorer& scorer, std::span<const Op> ops) {
  std::vector<PosteriorScore> out(ops.size());
  for (std::size_t i = 0; i < ops.size(); ++i) out[i] = scorer.rescore(ops[i]);
  return out;
}

template <typename Scorer, typename Op>
std::vector<PosteriorScore> parallel(const Scorer& scorer, std::span<const Op> ops) {
  std::vector<PosteriorScore> out(ops.size());
  std::exception_ptr error;
  const auto n = static_cast<std::ptrdiff_t>(ops.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      out[i] = scorer.rescore(ops[i]);
    } catch (...) {
#pragma omp critical(mmerge_kernel_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return out;
}

template <typename Model, typename Op>
std::size_t verify(const Model& model, std::span<const Op> ops, std::span<const PosteriorScore> scores,
                   const Hyperparams& hyper, double tolerance) {
  if (ops.size() != scores.size()) throw std::logic_error("operator and score lists differ in length");
  std::exception_ptr error;
  const auto n = static_cast<std::ptrdiff_t>(ops.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      PosteriorScore full = log_posterior(apply_op(model, ops[i]), hyper);
      double diff = std::abs(full.log_posterior - scores[i].log_posterior);
      double dl_diff = std::abs(full.description_length_bits - scores[i].description_length_bits);
      if (!(diff <= tolerance) || !(dl_diff <= tolerance))
        throw std::logic_error("incremental score of '" + op_string(model, ops[i]) + "' is " +
                               std::to_string(scores[i].log_posterior) + " but full recomputation gives " +
                               std::to_string(full.log_posterior));
    } catch (...) {
#pragma omp critical(mmerge_verify_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return ops.size();
}

}  // namespace

std::vector<PosteriorScore> score_candidates_serial(const HmmScorer& scorer, std::span<const HmmOp> ops) {
  return serial(scorer, ops);
}
std::vector<PosteriorScore> score_candidates_parallel(const HmmScorer& scorer, std::span<const HmmOp> ops) {
  return parallel(scorer, ops);
}
std::vector<PosteriorScore> score_candidates_serial(const ScfgScorer& scorer, std::span<const ScfgOp> ops) {
  return serial(scorer, ops);
}
std::vector<PosteriorScore> score_candidates_parallel(const ScfgScorer& scorer, std::span<const ScfgOp> ops) {
  return parallel(scorer, ops);
}

std::size_t verify_candidate_scores(const Hmm& model, std::span<const HmmOp> ops, std::span<const PosteriorScore> scores,
                                    const Hyperparams& hyper, double tolerance) {
  return verify(model, ops, scores, hyper, tolerance);
}

std::size_t verify_candidate_scores(const Scfg& model, std::span<const ScfgOp> ops,
                                    std::span<const PosteriorScore> scores, const Hyperparams& hyper,
                                    double tolerance) {
  return verify(model, ops, scores, hyper, tolerance);
}

int kernel_threads() { return omp_get_max_threads(); }

}  // namespace mmerge
