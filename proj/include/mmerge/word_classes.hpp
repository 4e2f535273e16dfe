#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>

#include "mmerge/search.hpp"

namespace mmerge {

/// Word classes as a bigram HMM: one emitting state per class, class bigram
/// counts as transitions and word counts as emissions.
struct ClassModel {
  std::map<StateId, std::set<Symbol>> classes;
  Hmm class_hmm;
};

/// Reads the classes off the emission tables of a class HMM.
ClassModel class_model_from_hmm(Hmm hmm);

/// One class per word type, numbered in order of first appearance.
ClassModel build_class_hmm(const Corpus& corpus);

enum class ClassMode { bayes, ml_target };

ClassMode parse_class_mode(std::string_view name);

struct ClassInduction {
  ClassModel model;
  SearchResult<Hmm> search;
};

/// Bayes mode runs greedy posterior search with its own stopping rule.
/// ml_target mode repeatedly applies the merge with the highest resulting
/// Viterbi log-likelihood until exactly `target_k` classes remain.
ClassInduction induce_classes(const Corpus& corpus, const Hyperparams& hyper, ClassMode mode,
                              std::optional<std::size_t> target_k, const SearchConfig& cfg = {});

/// "class <id>: word word ... # <total count>" per class.
std::string format_classes(const ClassModel& model);

}  // namespace mmerge
