#include <random>

#include "doctest.h"
#include "mmerge/search.hpp"
#include "support.hpp"

using namespace mmerge;
using namespace mmerge::testing;

TEST_CASE("HMM merges never raise likelihood or description length and keep the count mass") {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 300; ++trial) {
    Hmm h = incorporate_hmm(random_corpus(rng, "abc", 1, 5, 5));
    auto pairs = hmm_merge_candidates(h, false);
    if (pairs.empty()) continue;
    auto [a, b] = pairs[rng() % pairs.size()];
    Hmm m = merge_states(h, a, b);
    m.validate();
    CHECK(hmm_viterbi_log_likelihood(m) <= hmm_viterbi_log_likelihood(h) + 1e-9);
    CHECK(hmm_description_length(m) <= hmm_description_length(h) + 1e-9);
    auto mass = [](const Hmm& x) {
      Count total = 0;
      for (const auto& [q, table] : x.transitions())
        for (const auto& [_, c] : table) total += c;
      return total;
    };
    CHECK(mass(m) == mass(h));
  }
}

TEST_CASE("SCFG merges without unit deletion never raise likelihood and keep grammars valid") {
  std::mt19937_64 rng(202);
  for (int trial = 0; trial < 300; ++trial) {
    Scfg g = random_grammar(rng, "abc", 2);
    auto pairs = nonterminal_pairs(g);
    if (pairs.empty()) continue;
    auto [keep, drop] = pairs[rng() % pairs.size()];
    Scfg m = merge_nonterminals(g, keep, drop);
    m.validate();
    bool deletes_unit = false;
    for (const auto& [key, _] : g.internal())
      deletes_unit = deletes_unit || (key.second.size() == 1 && (key.first == keep || key.first == drop) &&
                                      (key.second[0] == keep || key.second[0] == drop));
    if (!deletes_unit) CHECK(scfg_viterbi_log_likelihood(m) <= scfg_viterbi_log_likelihood(g) + 1e-9);
  }
}

TEST_CASE("deleting a unit self-production can raise likelihood") {
  Scfg g = parse_scfg(
      "start: S\nS -> S S # 1\nS -> S C # 1\nS -> C # 3\nS => 'a' # 1\nS => 'b' # 5\nC => 'c' # 4\n");
  Scfg m = merge_nonterminals(g, kStart, g.id("C"));
  CHECK(serialize_scfg(m) == "start: S\nS -> S S # 2\nS => 'a' # 1\nS => 'b' # 5\nS => 'c' # 4\n");
  CHECK(scfg_viterbi_log_likelihood(m) > scfg_viterbi_log_likelihood(g));
}

TEST_CASE("chunking preserves the language and the top-level mass") {
  std::mt19937_64 rng(303);
  int checked = 0;
  while (checked < 60) {
    Scfg g = random_grammar(rng, "ab", 3);
    auto chunks = chunk_candidates(g, 3, Count(0));
    if (chunks.empty()) continue;
    Rhs seq = chunks[rng() % chunks.size()].seq;
    Scfg c = chunk_sequence(g, seq, g.fresh_name());
    c.validate();
    CHECK(enumerate_scfg_language(c, 10) == enumerate_scfg_language(g, 10));
    auto start_mass = [](const Scfg& x) {
      Count total = 0;
      for (const auto& [key, n] : x.internal())
        if (key.first == kStart) total += n;
      for (const auto& [key, n] : x.lexical())
        if (key.first == kStart) total += n;
      return total;
    };
    CHECK(start_mass(c) == start_mass(g));
    ++checked;
  }
}

TEST_CASE("incremental scores of random candidates match full recomputation") {
  std::mt19937_64 rng(404);
  Hyperparams hyper{0.5, 1.0};
  SearchConfig cfg;
  for (int trial = 0; trial < 40; ++trial) {
    Scfg g = random_grammar(rng, "abc", 2);
    PosteriorScore base = log_posterior(g, hyper);
    for (const auto& op : search_candidates(g, cfg))
      CHECK(rescore_after(g, op, base, hyper).log_posterior ==
            doctest::Approx(log_posterior(apply_op(g, op), hyper).log_posterior).epsilon(1e-9));
    Hmm h = incorporate_hmm(random_corpus(rng, "abc", 1, 4, 4));
    PosteriorScore hb = log_posterior(h, hyper);
    for (const auto& op : search_candidates(h, cfg))
      CHECK(rescore_after(h, op, hb, hyper).log_posterior ==
            doctest::Approx(log_posterior(apply_op(h, op), hyper).log_posterior).epsilon(1e-9));
  }
}

TEST_CASE("searches verified against full recomputation") {
  SearchConfig cfg;
  cfg.verify_incremental = true;
  auto r = induce_scfg(parse_corpus("ab\naabb\naaabbb\n", Tokenization::chars), {}, cfg);
  CHECK(r.candidates_verified > 0);
  CHECK(r.candidates_verified == r.candidates_evaluated);
}
