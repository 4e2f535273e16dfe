#include "mmerge/hmm.hpp"

#include <cmath>
#include <deque>

namespace mmerge {

std::string state_name(StateId q) {
  if (q == kInitial) return "^";
  if (q == kFinal) return "$";
  return std::to_string(q);
}

std::vector<StateId> Hmm::emitting_states() const {
  std::vector<StateId> out;
  out.reserve(emissions_.size());
  for (const auto& [q, _] : emissions_) out.push_back(q);
  return out;
}

bool Hmm::has_state(StateId q) const {
  return q == kInitial || q == kFinal || emissions_.count(q) > 0;
}

std::size_t Hmm::num_transition_entries() const {
  std::size_t n = 0;
  for (const auto& [_, t] : transitions_) n += t.size();
  return n;
}

std::size_t Hmm::num_emission_entries() const {
  std::size_t n = 0;
  for (const auto& [_, e] : emissions_) n += e.size();
  return n;
}

StateId Hmm::next_state_id() const {
  return emissions_.empty() ? 1 : emissions_.rbegin()->first + 1;
}

std::map<StateId, std::set<StateId>> Hmm::predecessors() const {
  std::map<StateId, std::set<StateId>> pred;
  for (const auto& [from, table] : transitions_)
    for (const auto& [to, _] : table) pred[to].insert(from);
  return pred;
}

void Hmm::add_emission(StateId q, const Symbol& sym, const Count& count) {
  if (q == kInitial || q == kFinal) throw ModelError("distinguished states do not emit");
  if (count <= 0) throw ModelError("emission count must be positive");
  emissions_[q][sym] += count;
  alphabet_.insert(sym);
}

void Hmm::add_transition(StateId from, StateId to, const Count& count) {
  if (from == kFinal) throw ModelError("FINAL has no outgoing transitions");
  if (to == kInitial) throw ModelError("INITIAL has no incoming transitions");
  if (count <= 0) throw ModelError("transition count must be positive");
  transitions_[from][to] += count;
}

void Hmm::validate() const {
  auto fail = [](const std::string& msg) { throw ModelError("invalid HMM: " + msg); };
  std::map<StateId, Count> in_flow;
  for (const auto& [from, table] : transitions_) {
    if (from == kFinal) fail("FINAL has outgoing transitions");
    if (from != kInitial && !emissions_.count(from)) fail("transition from unknown state " + state_name(from));
    for (const auto& [to, c] : table) {
      if (to == kInitial) fail("transition into INITIAL");
      if (to != kFinal && !emissions_.count(to)) fail("transition into unknown state " + state_name(to));
      if (c <= 0) fail("non-positive transition count");
      in_flow[to] += c;
    }
  }
  for (const auto& [q, table] : emissions_) {
    if (q == kInitial || q == kFinal) fail("distinguished state emits");
    if (table.empty()) fail("state " + state_name(q) + " has no emissions");
    Count emitted = 0, out = 0;
    for (const auto& [_, c] : table) {
      if (c <= 0) fail("non-positive emission count");
      emitted += c;
    }
    if (auto it = transitions_.find(q); it != transitions_.end())
      for (const auto& [_, c] : it->second) out += c;
    if (emitted != out || emitted != in_flow[q])
      fail("flow not conserved at state " + state_name(q));
  }

  // Reachability from INITIAL and co-reachability of FINAL.
  std::set<StateId> seen{kInitial};
  std::deque<StateId> queue{kInitial};
  while (!queue.empty()) {
    StateId q = queue.front();
    queue.pop_front();
    if (auto it = transitions_.find(q); it != transitions_.end())
      for (const auto& [to, _] : it->second)
        if (seen.insert(to).second) queue.push_back(to);
  }
  auto pred = predecessors();
  std::set<StateId> back{kFinal};
  queue.assign(1, kFinal);
  while (!queue.empty()) {
    StateId q = queue.front();
    queue.pop_front();
    for (StateId p : pred[q])
      if (back.insert(p).second) queue.push_back(p);
  }
  for (const auto& [q, _] : emissions_) {
    if (!seen.count(q)) fail("state " + state_name(q) + " unreachable from INITIAL");
    if (!back.count(q)) fail("state " + state_name(q) + " cannot reach FINAL");
  }
}

Hmm incorporate_hmm(const Corpus& corpus) { return incorporate_hmm(Hmm{}, corpus); }

Hmm incorporate_hmm(Hmm model, const Corpus& corpus) {
  if (corpus.empty()) throw ModelError("cannot incorporate an empty corpus");
  StateId next = model.next_state_id();
  for (const auto& sample : corpus.samples()) {
    StateId prev = kInitial;
    for (const auto& tok : sample.tokens) {
      StateId q = next++;
      model.add_emission(q, tok, sample.count);
      model.add_transition(prev, q, sample.count);
      prev = q;
    }
    model.add_transition(prev, kFinal, sample.count);
  }
  return model;
}

void merge_states_in_place(Hmm& hmm, StateId q1, StateId q2) {
  if (q1 == q2) throw ModelError("cannot merge a state with itself");
  for (StateId q : {q1, q2}) {
    if (q == kInitial || q == kFinal) throw ModelError("INITIAL and FINAL cannot be merged");
    if (!hmm.emissions_.count(q)) throw ModelError("unknown state " + state_name(q));
  }

  auto& e1 = hmm.emissions_[q1];
  for (const auto& [sym, c] : hmm.emissions_[q2]) e1[sym] += c;
  hmm.emissions_.erase(q2);

  if (auto it = hmm.transitions_.find(q2); it != hmm.transitions_.end()) {
    Hmm::TransitionTable moved = std::move(it->second);
    hmm.transitions_.erase(it);
    auto& t1 = hmm.transitions_[q1];
    for (const auto& [to, c] : moved) t1[to] += c;
  }
  for (auto& [from, table] : hmm.transitions_) {
    auto it = table.find(q2);
    if (it == table.end()) continue;
    Count c = it->second;
    table.erase(it);
    table[q1] += c;
  }
}

Hmm merge_states(const Hmm& hmm, StateId q1, StateId q2) {
  Hmm out = hmm;
  merge_states_in_place(out, q1, q2);
  return out;
}

namespace {

template <typename Table>
double table_log_likelihood(const Table& table) {
  double n = 0;
  for (const auto& [_, c] : table) n += to_double(c);
  double ll = 0;
  for (const auto& [_, c] : table) {
    double x = to_double(c);
    if (x > 0) ll += x * std::log(x / n);
  }
  return ll;
}

}  // namespace

double hmm_viterbi_log_likelihood(const Hmm& hmm) {
  double ll = 0;
  for (const auto& [_, t] : hmm.transitions()) ll += table_log_likelihood(t);
  for (const auto& [_, e] : hmm.emissions()) ll += table_log_likelihood(e);
  return ll;
}

std::vector<std::pair<StateId, StateId>> hmm_merge_candidates(const Hmm& hmm, bool prune) {
  std::vector<StateId> states = hmm.emitting_states();
  std::map<StateId, std::set<StateId>> pred;
  if (prune) pred = hmm.predecessors();
  auto share = [](const auto& a, const auto& b, auto key) {
    auto i = a.begin();
    auto j = b.begin();
    while (i != a.end() && j != b.end()) {
      if (key(*i) < key(*j)) ++i;
      else if (key(*j) < key(*i)) ++j;
      else return true;
    }
    return false;
  };
  std::vector<std::pair<StateId, StateId>> out;
  for (std::size_t i = 0; i < states.size(); ++i) {
    for (std::size_t j = i + 1; j < states.size(); ++j) {
      StateId a = states[i], b = states[j];
      if (prune) {
        bool symbol = share(hmm.emissions().at(a), hmm.emissions().at(b), [](const auto& kv) { return kv.first; });
        bool parent = share(pred[a], pred[b], [](StateId q) { return q; });
        if (!symbol && !parent) continue;
      }
      out.emplace_back(a, b);
    }
  }
  return out;
}

std::set<Sentence> enumerate_hmm_language(const Hmm& hmm, std::size_t max_len) {
  std::set<Sentence> out;
  // Frontier of (state reached after emitting prefix) grouped by prefix.
  std::map<Sentence, std::set<StateId>> frontier{{Sentence{}, {kInitial}}};
  for (std::size_t len = 0; len <= max_len && !frontier.empty(); ++len) {
    std::map<Sentence, std::set<StateId>> next;
    for (const auto& [prefix, states] : frontier) {
      for (StateId q : states) {
        auto it = hmm.transitions().find(q);
        if (it == hmm.transitions().end()) continue;
        for (const auto& [to, _] : it->second) {
          if (to == kFinal) {
            if (!prefix.empty()) out.insert(prefix);
            continue;
          }
          if (len == max_len) continue;
          for (const auto& [sym, __] : hmm.emissions().at(to)) {
            Sentence ext = prefix;
            ext.push_back(sym);
            next[std::move(ext)].insert(to);
          }
        }
      }
    }
    frontier = std::move(next);
  }
  return out;
}

bool hmm_generates(const Hmm& hmm, const Sentence& sentence) {
  std::set<StateId> current{kInitial};
  for (const auto& tok : sentence) {
    std::set<StateId> next;
    for (StateId q : current) {
      auto it = hmm.transitions().find(q);
      if (it == hmm.transitions().end()) continue;
      for (const auto& [to, _] : it->second) {
        if (to == kFinal) continue;
        const auto& em = hmm.emissions().at(to);
        if (em.count(tok)) next.insert(to);
      }
    }
    current = std::move(next);
    if (current.empty()) return false;
  }
  for (StateId q : current) {
    auto it = hmm.transitions().find(q);
    if (it != hmm.transitions().end() && it->second.count(kFinal)) return true;
  }
  return false;
}

}  // namespace mmerge
