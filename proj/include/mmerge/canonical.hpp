#pragma once

#include <string>

#include "mmerge/hmm.hpp"
#include "mmerge/scfg.hpp"

namespace mmerge {

/// Renaming-invariant fingerprint of a model. States (nonterminals) are
/// renumbered in breadth-first discovery order from INITIAL (S) and entries
/// are sorted. Equal keys imply isomorphic models; the converse holds for
/// all models where discovery order is unambiguous.
std::string canonical_key(const Hmm& hmm, bool with_counts = true);
std::string canonical_key(const Scfg& g, bool with_counts = true);

}  // namespace mmerge
