#include "mmerge/word_classes.hpp"

#include <sstream>

namespace mmerge {

ClassModel class_model_from_hmm(Hmm hmm) {
  ClassModel out;
  for (const auto& [q, table] : hmm.emissions())
    for (const auto& [word, _] : table) out.classes[q].insert(word);
  out.class_hmm = std::move(hmm);
  return out;
}

ClassModel build_class_hmm(const Corpus& corpus) {
  if (corpus.empty()) throw ModelError("cannot build classes from an empty corpus");
  std::map<Symbol, StateId> state_of;
  auto state = [&](const Symbol& w) {
    auto [it, inserted] = state_of.try_emplace(w, static_cast<StateId>(state_of.size() + 1));
    return it->second;
  };
  Hmm hmm;
  for (const auto& sample : corpus.samples()) {
    StateId prev = kInitial;
    for (const auto& w : sample.tokens) {
      StateId q = state(w);
      hmm.add_emission(q, w, sample.count);
      hmm.add_transition(prev, q, sample.count);
      prev = q;
    }
    hmm.add_transition(prev, kFinal, sample.count);
  }
  return class_model_from_hmm(std::move(hmm));
}

ClassMode parse_class_mode(std::string_view name) {
  if (name == "bayes") return ClassMode::bayes;
  if (name == "ml_target" || name == "ml-target") return ClassMode::ml_target;
  throw ConfigError("unknown class mode '" + std::string(name) + "' (expected bayes or ml_target)");
}

ClassInduction induce_classes(const Corpus& corpus, const Hyperparams& hyper, ClassMode mode,
                              std::optional<std::size_t> target_k, const SearchConfig& cfg) {
  ClassModel initial = build_class_hmm(corpus);
  const std::size_t vocabulary = initial.classes.size();

  if (mode == ClassMode::bayes) {
    SearchConfig greedy = cfg;
    greedy.strategy = Strategy::greedy;
    greedy.prune_hmm_pairs = false;
    greedy.online_batch.reset();
    auto result = greedy_search(initial.class_hmm, hyper, greedy);
    ClassModel model = class_model_from_hmm(result.final_model);
    return {std::move(model), std::move(result)};
  }

  if (!target_k) throw ConfigError("ml_target mode needs a target class count");
  if (*target_k < 1) throw ConfigError("target class count must be at least 1");
  if (*target_k > vocabulary)
    throw ConfigError("target class count " + std::to_string(*target_k) + " exceeds the vocabulary size " +
                      std::to_string(vocabulary));

  SearchResult<Hmm> result;
  result.initial_score = log_posterior(initial.class_hmm, hyper);
  Hmm model = std::move(initial.class_hmm);
  std::size_t step = 0;
  while (model.emissions().size() > *target_k) {
    auto pairs = hmm_merge_candidates(model, false);
    std::optional<std::pair<StateId, StateId>> best;
    double best_ll = 0;
    for (auto [a, b] : pairs) {
      double ll = hmm_viterbi_log_likelihood(merge_states(model, a, b));
      ++result.candidates_evaluated;
      if (!best || ll > best_ll) {
        best = std::make_pair(a, b);
        best_ll = ll;
      }
    }
    HmmOp op{best->first, best->second};
    nlohmann::json j = op_json(model, op);
    j["log_likelihood"] = best_ll;
    model = merge_states(model, op.q1, op.q2);
    result.trace.push_back({++step, std::move(j), log_posterior(model, hyper), true, 0, false});
  }
  result.final_score = log_posterior(model, hyper);
  result.final_model = model;
  return {class_model_from_hmm(std::move(model)), std::move(result)};
}

std::string format_classes(const ClassModel& model) {
  std::ostringstream out;
  for (const auto& [q, words] : model.classes) {
    out << "class " << q << ":";
    for (const auto& w : words) out << ' ' << w;
    Count total = 0;
    for (const auto& [_, c] : model.class_hmm.emissions().at(q)) total += c;
    out << " # " << format_count(total) << '\n';
  }
  return out.str();
}

}  // namespace mmerge
