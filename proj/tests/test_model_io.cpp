#include "doctest.h"
#include "mmerge/model_io.hpp"
#include "mmerge/scoring.hpp"
#include "support.hpp"

using namespace mmerge;

namespace {

Hmm abab_loop() {
  Hmm h = incorporate_hmm(parse_corpus("ab\nabab\n", Tokenization::chars));
  for (auto [a, b] : std::vector<std::pair<StateId, StateId>>{{1, 3}, {2, 4}, {2, 6}, {1, 5}}) h = merge_states(h, a, b);
  return h;
}

std::size_t count_prefix(const std::string& text, const std::string& prefix) {
  std::istringstream in(text);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) n += line.rfind(prefix, 0) == 0;
  return n;
}

int error_line(std::string_view text) {
  try {
    parse_model(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return -1;
}

}  // namespace

TEST_CASE("HMM text format") {
  Hmm h = abab_loop();
  std::string text = serialize_hmm(h);
  CHECK(count_prefix(text, "state ") == 2);
  CHECK(count_prefix(text, "trans ") == 4);
  CHECK(text.find("trans ^ -> 1 : 2") != std::string::npos);
  CHECK(text.find("trans 2 -> $ : 2") != std::string::npos);
  CHECK(parse_hmm(text) == h);
  CHECK(std::get<Hmm>(parse_model(text)) == h);
}

TEST_CASE("SCFG text format") {
  std::string text = "start: S\nS -> A B # 3\nS -> A S B # 3\nA => 'a' # 6\nB => 'b' # 6\n";
  Scfg g = parse_scfg(text);
  std::string out = serialize_scfg(g);
  CHECK(count_prefix(out, "start:") == 1);
  CHECK(std::count(out.begin(), out.end(), '\n') == 5);
  CHECK(parse_scfg(out) == g);
  CHECK(serialize_model(parse_model(out)) == out);
}

TEST_CASE("rational counts and quoted terminals round-trip") {
  Scfg g;
  NtId q = g.add_nonterminal("Q");
  g.add_internal(kStart, {q, q}, Count(7, 3));
  g.add_lexical(q, "'", Count(1, 2));
  g.add_lexical(q, "\\", Count(3, 2));
  g.add_lexical(q, "a b", 1);
  std::string text = serialize_scfg(g);
  CHECK(parse_scfg(text) == g);
  CHECK(text.find("7/3") != std::string::npos);
}

TEST_CASE("RHS occurrences declare nonterminals") {
  Scfg g = parse_scfg("start: S\nS -> X Y # 1\nX => 'a' # 1\nY => 'b' # 1\n");
  CHECK(g.num_nonterminals() == 3);
  CHECK(g.find("Y").has_value());
}

TEST_CASE("parse errors carry positions") {
  CHECK(error_line("start: S\nS -> A # 0\nA => 'a' # 1\n") == 2);
  CHECK(error_line("start: S\nS -> A # 1\nA => 'a' # -2\n") == 3);
  CHECK(error_line("start: S\nS -> A # 1\nA => a # 1\n") == 3);
  CHECK(error_line("start: S\nS -> S # 1\n") == 2);
  CHECK(error_line("start: S\nS -> A\n") == 2);
  CHECK(error_line("hmm alphabet: a\nstate 1 emit c:1\n") == 2);
  CHECK(error_line("hmm alphabet: a\nstate ^ emit a:1\n") == 2);
  CHECK(error_line("hmm alphabet: a\nbogus\n") == 2);
  CHECK(error_line("model\n") == 1);
  CHECK(error_line("") == 0);
  try {
    parse_model("start: S\nS -> A # x\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
    CHECK(e.column() > 1);
  }
}

TEST_CASE("structurally invalid models are rejected") {
  CHECK_THROWS_AS(parse_model("hmm alphabet: a\nstate 1 emit a:1\ntrans ^ -> 1 : 1\ntrans 1 -> $ : 2\n"), ModelError);
  CHECK_THROWS_AS(parse_model("start: S\nS -> A # 1\n"), ModelError);
}

TEST_CASE("induced models round-trip with identical scores") {
  Hyperparams hyper{0.5, 1.5};
  for (const auto& row : testing::table_rows()) {
    Scfg target = parse_scfg(row.grammar);
    auto r = induce_scfg(testing::top_k_corpus(target, row.samples), hyper, {});
    Scfg back = parse_scfg(serialize_scfg(r.final_model));
    CHECK(log_posterior(back, hyper).log_posterior ==
          doctest::Approx(log_posterior(r.final_model, hyper).log_posterior).epsilon(1e-12));
  }
  auto h = induce_hmm(parse_corpus("ab\nabab\nba\n", Tokenization::chars), hyper, {});
  CHECK(parse_hmm(serialize_hmm(h.final_model)) == h.final_model);
}

TEST_CASE("file helpers") {
  CHECK_THROWS_AS(load_model_file("/nonexistent/model.txt"), Error);
  CHECK_THROWS_AS(read_text_file("/nonexistent/corpus.txt"), Error);
}
