#include "mmerge/canonical.hpp"

#include <algorithm>
#include <deque>
#include <tuple>

namespace mmerge {

namespace {

using Signature = std::vector<std::pair<Symbol, Count>>;

struct SymbolKey {
  int named;  // 0 when already numbered
  int index;
  Signature signature;
  auto operator<=>(const SymbolKey&) const = default;
};

std::string join(std::vector<std::string> lines) {
  std::sort(lines.begin(), lines.end());
  std::string out;
  for (auto& l : lines) {
    out += l;
    out += '\n';
  }
  return out;
}

}  // namespace

std::string canonical_key(const Hmm& hmm, bool with_counts) {
  std::map<StateId, Signature> sig;
  for (const auto& [q, table] : hmm.emissions())
    for (const auto& [sym, c] : table) sig[q].emplace_back(sym, with_counts ? c : Count(0));

  std::map<StateId, int> order{{kInitial, 0}, {kFinal, -1}};
  auto key_of = [&](StateId q) {
    auto it = order.find(q);
    if (it != order.end()) return SymbolKey{0, it->second, {}};
    return SymbolKey{1, 0, sig[q]};
  };
  std::deque<StateId> queue{kInitial};
  while (!queue.empty()) {
    StateId q = queue.front();
    queue.pop_front();
    auto it = hmm.transitions().find(q);
    if (it == hmm.transitions().end()) continue;
    std::vector<std::tuple<SymbolKey, Count, StateId>> succ;
    for (const auto& [to, c] : it->second) succ.emplace_back(key_of(to), with_counts ? c : Count(0), to);
    std::sort(succ.begin(), succ.end());
    for (const auto& [_, __, to] : succ)
      if (order.emplace(to, static_cast<int>(order.size()) - 1).second) queue.push_back(to);
  }
  for (const auto& [q, _] : hmm.emissions())
    if (!order.count(q)) order.emplace(q, static_cast<int>(order.size()) - 1);

  auto fmt = [&](const Count& c) { return with_counts ? " " + format_count(c) : std::string(); };
  std::vector<std::string> lines;
  for (const auto& [from, table] : hmm.transitions())
    for (const auto& [to, c] : table)
      lines.push_back("t " + std::to_string(order.at(from)) + " " + std::to_string(order.at(to)) + fmt(c));
  for (const auto& [q, table] : hmm.emissions())
    for (const auto& [sym, c] : table) lines.push_back("e " + std::to_string(order.at(q)) + " " + sym + fmt(c));
  return join(std::move(lines));
}

std::string canonical_key(const Scfg& g, bool with_counts) {
  std::map<NtId, Signature> sig;
  for (const auto& [key, c] : g.lexical()) sig[key.first].emplace_back(key.second, with_counts ? c : Count(0));

  std::map<NtId, int> order{{kStart, 0}};
  auto key_of = [&](NtId x) {
    auto it = order.find(x);
    if (it != order.end()) return SymbolKey{0, it->second, {}};
    return SymbolKey{1, 0, sig[x]};
  };
  std::deque<NtId> queue{kStart};
  while (!queue.empty()) {
    NtId x = queue.front();
    queue.pop_front();
    std::vector<std::tuple<std::size_t, std::vector<SymbolKey>, Count, const Rhs*>> prods;
    for (auto p = g.internal().lower_bound({x, Rhs{}}); p != g.internal().end() && p->first.first == x; ++p) {
      std::vector<SymbolKey> keys;
      for (NtId s : p->first.second) keys.push_back(key_of(s));
      prods.emplace_back(p->first.second.size(), std::move(keys), with_counts ? p->second : Count(0), &p->first.second);
    }
    std::sort(prods.begin(), prods.end(), [](const auto& a, const auto& b) {
      return std::tie(std::get<0>(a), std::get<1>(a), std::get<2>(a)) <
             std::tie(std::get<0>(b), std::get<1>(b), std::get<2>(b));
    });
    for (const auto& prod : prods)
      for (NtId s : *std::get<3>(prod))
        if (order.emplace(s, static_cast<int>(order.size())).second) queue.push_back(s);
  }
  for (const auto& [x, _] : g.nonterminals())
    if (!order.count(x)) order.emplace(x, static_cast<int>(order.size()));

  auto fmt = [&](const Count& c) { return with_counts ? " # " + format_count(c) : std::string(); };
  std::vector<std::string> lines;
  for (const auto& [key, c] : g.internal()) {
    std::string line = std::to_string(order.at(key.first)) + " ->";
    for (NtId s : key.second) line += " " + std::to_string(order.at(s));
    lines.push_back(line + fmt(c));
  }
  for (const auto& [key, c] : g.lexical())
    lines.push_back(std::to_string(order.at(key.first)) + " => '" + key.second + "'" + fmt(c));
  return join(std::move(lines));
}

}  // namespace mmerge
