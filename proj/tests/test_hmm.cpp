#include "doctest.h"
#include "mmerge/hmm.hpp"
#include "support.hpp"

using namespace mmerge;
using mmerge::testing::chars;

namespace {

Hmm abab_chain() { return incorporate_hmm(parse_corpus("ab\nabab\n", Tokenization::chars)); }

Hmm abab_loop() {
  Hmm h = abab_chain();
  for (auto [a, b] : std::vector<std::pair<StateId, StateId>>{{1, 3}, {2, 4}, {2, 6}, {1, 5}}) h = merge_states(h, a, b);
  return h;
}

std::set<Sentence> ab_plus(std::size_t max_n) {
  std::set<Sentence> out;
  Sentence s;
  for (std::size_t n = 1; n <= max_n; ++n) {
    s.push_back("a");
    s.push_back("b");
    out.insert(s);
  }
  return out;
}

}  // namespace

TEST_CASE("incorporation builds one chain per distinct sample") {
  Hmm h = abab_chain();
  CHECK(h.emitting_states().size() == 6);
  CHECK(h.transitions().at(kInitial).size() == 2);
  CHECK(h.transitions().at(kInitial).at(1) == Count(1));
  CHECK(h.transitions().at(kInitial).at(3) == Count(1));
  CHECK(h.transitions().at(2).at(kFinal) == Count(1));
  CHECK(h.transitions().at(6).at(kFinal) == Count(1));
  h.validate();

  Hmm single = incorporate_hmm(parse_corpus("a\n", Tokenization::chars));
  CHECK(single.emitting_states() == std::vector<StateId>{1});
  CHECK(single.transitions().at(kInitial).at(1) == Count(1));
  CHECK(single.transitions().at(1).at(kFinal) == Count(1));

  Hmm triple = incorporate_hmm(parse_corpus("3\tab\n", Tokenization::chars));
  CHECK(triple.emitting_states().size() == 2);
  CHECK(triple.emissions().at(1).at("a") == Count(3));
  CHECK(triple.transitions().at(1).at(2) == Count(3));

  CHECK_THROWS_AS(incorporate_hmm(Corpus{}), ModelError);
}

TEST_CASE("merge_states sums tables and redirects transitions") {
  Hmm h = abab_loop();
  h.validate();
  CHECK(h.emitting_states() == std::vector<StateId>{1, 2});
  CHECK(h.emissions().at(1).at("a") == Count(3));
  CHECK(h.emissions().at(2).at("b") == Count(3));
  CHECK(h.transitions().at(kInitial).at(1) == Count(2));
  CHECK(h.transitions().at(1).at(2) == Count(3));
  CHECK(h.transitions().at(2).at(kFinal) == Count(2));
  CHECK(h.transitions().at(2).at(1) == Count(1));
  CHECK(enumerate_hmm_language(h, 10) == ab_plus(5));

  Hmm chain = incorporate_hmm(parse_corpus("ab\n", Tokenization::chars));
  Hmm loop = merge_states(chain, 1, 2);
  CHECK(loop.transitions().at(1).at(1) == Count(1));
  CHECK(loop.emissions().at(1).size() == 2);
  CHECK(loop.emissions().at(1).at("a") == Count(1));
  CHECK(loop.emissions().at(1).at("b") == Count(1));
  loop.validate();
}

TEST_CASE("merge_states rejects invalid pairs") {
  Hmm h = abab_chain();
  CHECK_THROWS_AS(merge_states(h, 1, 1), ModelError);
  CHECK_THROWS_AS(merge_states(h, kInitial, 1), ModelError);
  CHECK_THROWS_AS(merge_states(h, 1, kFinal), ModelError);
  CHECK_THROWS_AS(merge_states(h, 1, 99), ModelError);
}

TEST_CASE("merge_states is commutative up to the surviving id") {
  Hmm h = abab_chain();
  Hmm a = merge_states(h, 2, 5);
  Hmm b = merge_states(h, 5, 2);
  CHECK(a.emissions().at(2) == b.emissions().at(5));
  CHECK(hmm_viterbi_log_likelihood(a) == doctest::Approx(hmm_viterbi_log_likelihood(b)).epsilon(1e-15));
  CHECK(a.num_transition_entries() == b.num_transition_entries());
}

TEST_CASE("Viterbi log-likelihood of the ab, abab models") {
  CHECK(hmm_viterbi_log_likelihood(abab_chain()) == doctest::Approx(std::log(0.25)).epsilon(1e-12));
  CHECK(hmm_viterbi_log_likelihood(abab_loop()) ==
        doctest::Approx(2 * std::log(2.0 / 3) + std::log(1.0 / 3)).epsilon(1e-12));
  CHECK(hmm_viterbi_log_likelihood(incorporate_hmm(parse_corpus("abc\n", Tokenization::chars))) == 0.0);
}

TEST_CASE("Viterbi log-likelihood equals the product of path branch probabilities") {
  // Each sample has one path in an incorporated model, so the Viterbi
  // likelihood is the relative-frequency product over the samples.
  Corpus c = parse_corpus("2\tab\n1\tabab\n3\tb\n", Tokenization::chars);
  double expected = 2 * std::log(2.0 / 6) + 1 * std::log(1.0 / 6) + 3 * std::log(3.0 / 6);
  CHECK(hmm_viterbi_log_likelihood(incorporate_hmm(c)) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("merge candidates") {
  Hmm h = abab_chain();
  CHECK(hmm_merge_candidates(h, false).size() == 15);
  auto pruned = hmm_merge_candidates(h, true);
  auto has = [&](StateId a, StateId b) {
    return std::find(pruned.begin(), pruned.end(), std::make_pair(a, b)) != pruned.end();
  };
  CHECK(has(1, 3));
  CHECK(has(2, 4));
  CHECK_FALSE(has(1, 2));
  CHECK(std::is_sorted(pruned.begin(), pruned.end()));
  CHECK(hmm_merge_candidates(incorporate_hmm(parse_corpus("a\n", Tokenization::chars)), false).empty());
}

TEST_CASE("language enumeration") {
  CHECK(enumerate_hmm_language(abab_chain(), 10) == std::set<Sentence>{chars("ab"), chars("abab")});
  CHECK(enumerate_hmm_language(abab_loop(), 1).empty());
  CHECK(enumerate_hmm_language(abab_loop(), 4) == ab_plus(2));
  CHECK(hmm_generates(abab_loop(), chars("ababab")));
  CHECK_FALSE(hmm_generates(abab_loop(), chars("aba")));
  CHECK_FALSE(hmm_generates(abab_chain(), chars("ababab")));
}

TEST_CASE("incorporated model enumerates exactly its corpus") {
  Corpus c = parse_corpus("abc\n2\tcab\nbb\nc\n", Tokenization::chars);
  std::set<Sentence> support;
  for (const auto& s : c.samples()) support.insert(s.tokens);
  CHECK(enumerate_hmm_language(incorporate_hmm(c), c.max_length()) == support);
}

TEST_CASE("validate detects broken flow") {
  Hmm h;
  h.add_emission(1, "a", 1);
  h.add_transition(kInitial, 1, 1);
  h.add_transition(1, kFinal, 2);
  CHECK_THROWS_AS(h.validate(), ModelError);
  CHECK_THROWS_AS(h.add_transition(kFinal, 1, 1), ModelError);
  CHECK_THROWS_AS(h.add_emission(kInitial, "a", 1), ModelError);
}

TEST_CASE("on-line incorporation appends fresh chains") {
  Hmm h = incorporate_hmm(parse_corpus("ab\n", Tokenization::chars));
  Hmm more = incorporate_hmm(h, parse_corpus("abab\n", Tokenization::chars));
  CHECK(more == abab_chain());
}
