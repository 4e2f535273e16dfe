#include "doctest.h"
#include "mmerge/corpus.hpp"

using namespace mmerge;

TEST_CASE("parse_count accepts integers, fractions and decimals") {
  CHECK(parse_count("7") == Count(7));
  CHECK(parse_count("5/2") == Count(5, 2));
  CHECK(parse_count("2.5") == Count(5, 2));
  CHECK(parse_count("-0.25") == Count(-1, 4));
  CHECK(parse_count("10/4") == Count(5, 2));
  CHECK_THROWS_AS(parse_count("abc"), std::invalid_argument);
  CHECK_THROWS_AS(parse_count("1/0"), std::invalid_argument);
  CHECK_THROWS_AS(parse_count(""), std::invalid_argument);
  CHECK(format_count(Count(6)) == "6");
  CHECK(format_count(Count(675, 23)) == "675/23");
}

TEST_CASE("load_corpus reads one sample per line in character mode") {
  Corpus c = parse_corpus("ab\nabab", Tokenization::chars);
  REQUIRE(c.size() == 2);
  CHECK(c.samples()[0].tokens == Sentence{"a", "b"});
  CHECK(c.samples()[1].tokens == Sentence{"a", "b", "a", "b"});
  CHECK(c.samples()[0].count == Count(1));
  CHECK(c.alphabet() == std::set<Symbol>{"a", "b"});
}

TEST_CASE("identical samples are consolidated in first-appearance order") {
  Corpus c = parse_corpus("3\ta b\n1\tb\n2\ta b\n", Tokenization::words);
  REQUIRE(c.size() == 2);
  CHECK(c.samples()[0].tokens == Sentence{"a", "b"});
  CHECK(c.samples()[0].count == Count(5));
  CHECK(c.samples()[1].tokens == Sentence{"b"});
}

TEST_CASE("comments, blank lines and word tokenization") {
  Corpus c = parse_corpus("# header\n\n1/2\tthe dog  saw a cat\n  \n", Tokenization::words);
  REQUIRE(c.size() == 1);
  CHECK(c.samples()[0].tokens == Sentence{"the", "dog", "saw", "a", "cat"});
  CHECK(c.samples()[0].count == Count(1, 2));
  CHECK(c.max_length() == 5);
}

TEST_CASE("character mode splits UTF-8 code points and ignores spaces") {
  Sentence s = tokenize("a\xc3\xa9 b", Tokenization::chars);
  CHECK(s == Sentence{"a", "\xc3\xa9", "b"});
}

TEST_CASE("corpus format errors carry line numbers") {
  CHECK_THROWS_AS(parse_corpus("", Tokenization::chars), ParseError);
  CHECK_THROWS_AS(parse_corpus("# only a comment\n", Tokenization::chars), ParseError);
  try {
    parse_corpus("ab\nx\tab\n", Tokenization::chars);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  try {
    parse_corpus("ab\n\n0\tab\n", Tokenization::chars);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
  CHECK_THROWS_AS(parse_corpus("-2\tab\n", Tokenization::chars), ParseError);
  CHECK_THROWS_AS(parse_corpus("3\t   \n", Tokenization::chars), ParseError);
}

TEST_CASE("scale_counts hits the requested total exactly") {
  Corpus uniform = parse_corpus("a\nb\nc\nd\ne\n", Tokenization::chars);
  Corpus scaled = scale_counts(uniform, 50);
  for (const auto& s : scaled.samples()) CHECK(s.count == Count(10));

  Corpus pair = parse_corpus("2\ta\n3\tb\n", Tokenization::chars);
  CHECK(scale_counts(pair, 5) == pair);

  Corpus odd = parse_corpus("1\ta\n1/3\tb\n7/11\tc\n", Tokenization::chars);
  Corpus s = scale_counts(odd, 50);
  CHECK(s.total() == Count(50));
  for (std::size_t i = 0; i < odd.size(); ++i)
    for (std::size_t j = 0; j < odd.size(); ++j)
      CHECK(s.samples()[i].count / s.samples()[j].count == odd.samples()[i].count / odd.samples()[j].count);

  CHECK_THROWS_AS(scale_counts(odd, 0), ModelError);
  CHECK_THROWS_AS(scale_counts(Corpus{}, 1), ModelError);
}

TEST_CASE("serialize then reload is the identity") {
  for (auto mode : {Tokenization::chars, Tokenization::words}) {
    Corpus c = parse_corpus("3\tab ba\n1/7\tb\n2\tab ba\n", mode);
    CHECK(parse_corpus(serialize_corpus(c, mode), mode) == c);
  }
}

TEST_CASE("tokenization names") {
  CHECK(parse_tokenization("chars") == Tokenization::chars);
  CHECK(parse_tokenization("words") == Tokenization::words);
  CHECK_THROWS_AS(parse_tokenization("bytes"), ConfigError);
}
