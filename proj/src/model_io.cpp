#include "mmerge/model_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace mmerge {

namespace {

struct Token {
  std::string_view text;
  int column;  // 1-based
};

std::vector<Token> split(std::string_view line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    if (j > i) out.push_back({line.substr(i, j - i), static_cast<int>(i) + 1});
    i = j;
  }
  return out;
}

/// Iterates over lines, skipping blanks and '#' comments, tracking numbers.
class Lines {
 public:
  explicit Lines(std::string_view text) : text_(text) {}

  bool next(std::string_view& line) {
    while (!text_.empty()) {
      auto nl = text_.find('\n');
      line = text_.substr(0, nl);
      text_ = nl == std::string_view::npos ? std::string_view{} : text_.substr(nl + 1);
      ++number_;
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      auto first = line.find_first_not_of(" \t");
      if (first == std::string_view::npos || line[first] == '#') continue;
      return true;
    }
    return false;
  }
  int number() const { return number_; }

 private:
  std::string_view text_;
  int number_ = 0;
};

Count positive_count(std::string_view text, int line, int column) {
  Count c;
  try {
    c = parse_count(text);
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what(), line, column);
  }
  if (c <= 0) throw ParseError("count must be positive, got '" + std::string(text) + "'", line, column);
  return c;
}

StateId parse_state(std::string_view text, int line, int column) {
  if (text == "^") return kInitial;
  if (text == "$") return kFinal;
  StateId q = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), q);
  if (ec != std::errc{} || ptr != text.data() + text.size() || q <= 0 || q == kFinal)
    throw ParseError("invalid state '" + std::string(text) + "'", line, column);
  return q;
}

std::string quote(const std::string& terminal) {
  std::string out = "'";
  for (char ch : terminal) {
    if (ch == '\'' || ch == '\\') out += '\\';
    out += ch;
  }
  return out + "'";
}

}  // namespace

std::string serialize_hmm(const Hmm& hmm) {
  std::ostringstream out;
  out << "hmm alphabet:";
  for (const auto& sym : hmm.alphabet()) out << ' ' << sym;
  out << '\n';
  for (const auto& [q, table] : hmm.emissions()) {
    out << "state " << q << " emit";
    for (const auto& [sym, c] : table) out << ' ' << sym << ':' << format_count(c);
    out << '\n';
  }
  for (const auto& [from, table] : hmm.transitions())
    for (const auto& [to, c] : table)
      out << "trans " << state_name(from) << " -> " << state_name(to) << " : " << format_count(c) << '\n';
  return out.str();
}

Hmm parse_hmm(std::string_view text) {
  Lines lines(text);
  std::string_view line;
  if (!lines.next(line)) throw ParseError("empty model file", 0);
  auto header = split(line);
  if (header.size() < 2 || header[0].text != "hmm" || header[1].text != "alphabet:")
    throw ParseError("expected 'hmm alphabet:' header", lines.number(), 1);
  Hmm hmm;
  for (std::size_t i = 2; i < header.size(); ++i) hmm.add_symbol(std::string(header[i].text));

  while (lines.next(line)) {
    int n = lines.number();
    auto tok = split(line);
    if (tok[0].text == "state") {
      if (tok.size() < 4 || tok[2].text != "emit")
        throw ParseError("expected 'state <id> emit <symbol>:<count> ...'", n, tok[0].column);
      StateId q = parse_state(tok[1].text, n, tok[1].column);
      if (q == kInitial || q == kFinal) throw ParseError("INITIAL and FINAL cannot emit", n, tok[1].column);
      for (std::size_t i = 3; i < tok.size(); ++i) {
        auto colon = tok[i].text.rfind(':');
        if (colon == std::string_view::npos || colon == 0)
          throw ParseError("expected <symbol>:<count>", n, tok[i].column);
        std::string sym(tok[i].text.substr(0, colon));
        if (!hmm.alphabet().count(sym))
          throw ParseError("symbol '" + sym + "' is not in the alphabet", n, tok[i].column);
        hmm.add_emission(q, sym, positive_count(tok[i].text.substr(colon + 1), n, tok[i].column + static_cast<int>(colon) + 1));
      }
    } else if (tok[0].text == "trans") {
      if (tok.size() != 6 || tok[2].text != "->" || tok[4].text != ":")
        throw ParseError("expected 'trans <from> -> <to> : <count>'", n, tok[0].column);
      StateId from = parse_state(tok[1].text, n, tok[1].column);
      StateId to = parse_state(tok[3].text, n, tok[3].column);
      if (from == kFinal) throw ParseError("FINAL has no outgoing transitions", n, tok[1].column);
      if (to == kInitial) throw ParseError("INITIAL has no incoming transitions", n, tok[3].column);
      hmm.add_transition(from, to, positive_count(tok[5].text, n, tok[5].column));
    } else {
      throw ParseError("unknown line type '" + std::string(tok[0].text) + "'", n, tok[0].column);
    }
  }
  hmm.validate();
  return hmm;
}

std::string serialize_scfg(const Scfg& g) {
  std::ostringstream out;
  out << "start: " << g.name(kStart) << '\n';
  for (const auto& [key, c] : g.internal())
    out << g.name(key.first) << " -> " << g.rhs_string(key.second) << " # " << format_count(c) << '\n';
  for (const auto& [key, c] : g.lexical())
    out << g.name(key.first) << " => " << quote(key.second) << " # " << format_count(c) << '\n';
  return out.str();
}

Scfg parse_scfg(std::string_view text) {
  Lines lines(text);
  std::string_view line;
  if (!lines.next(line)) throw ParseError("empty model file", 0);
  auto header = split(line);
  if (header.size() != 2 || header[0].text != "start:")
    throw ParseError("expected 'start: <symbol>' header", lines.number(), 1);
  Scfg g{std::string(header[1].text)};
  auto declare = [&g](std::string_view name) {
    std::string s(name);
    if (auto id = g.find(s)) return *id;
    return g.add_nonterminal(s);
  };

  while (lines.next(line)) {
    int n = lines.number();
    auto hash = line.rfind(" # ");
    if (hash == std::string_view::npos) throw ParseError("missing ' # <count>'", n, static_cast<int>(line.size()) + 1);
    auto count_tok = split(line.substr(hash + 3));
    if (count_tok.size() != 1) throw ParseError("expected a single count after '#'", n, static_cast<int>(hash) + 3);
    Count count = positive_count(count_tok[0].text, n, static_cast<int>(hash) + 2 + count_tok[0].column);
    auto tok = split(line.substr(0, hash));
    if (tok.size() < 3 || (tok[1].text != "->" && tok[1].text != "=>"))
      throw ParseError("expected '<lhs> -> <rhs>' or '<lhs> => '<terminal>''", n, tok.empty() ? 1 : tok[0].column);
    NtId lhs = declare(tok[0].text);
    if (tok[1].text == "->") {
      Rhs rhs;
      for (std::size_t i = 2; i < tok.size(); ++i) rhs.push_back(declare(tok[i].text));
      if (rhs.size() == 1 && rhs[0] == lhs)
        throw ParseError("unit self-production " + std::string(tok[0].text), n, tok[2].column);
      g.add_internal(lhs, std::move(rhs), count);
    } else {
      std::size_t start = static_cast<std::size_t>(tok[2].column) - 1;
      std::string_view rest = line.substr(start, hash - start);
      while (!rest.empty() && (rest.back() == ' ' || rest.back() == '\t')) rest.remove_suffix(1);
      if (rest.size() < 3 || rest.front() != '\'' || rest.back() != '\'')
        throw ParseError("terminal must be quoted as 'x'", n, tok[2].column);
      std::string terminal;
      for (std::size_t i = 1; i + 1 < rest.size(); ++i) {
        if (rest[i] == '\\' && i + 2 < rest.size()) ++i;
        else if (rest[i] == '\'') throw ParseError("unescaped quote in terminal", n, tok[2].column + static_cast<int>(i));
        terminal += rest[i];
      }
      g.add_lexical(lhs, terminal, count);
    }
  }
  g.validate();
  return g;
}

Model parse_model(std::string_view text) {
  Lines lines(text);
  std::string_view line;
  if (!lines.next(line)) throw ParseError("empty model file", 0);
  auto tok = split(line);
  if (tok[0].text == "hmm") return parse_hmm(text);
  if (tok[0].text == "start:") return parse_scfg(text);
  throw ParseError("unrecognized model format (expected 'hmm alphabet:' or 'start:')", lines.number(), tok[0].column);
}

std::string serialize_model(const Model& model) {
  return std::visit(
      [](const auto& m) {
        if constexpr (std::is_same_v<std::decay_t<decltype(m)>, Hmm>) return serialize_hmm(m);
        else return serialize_scfg(m);
      },
      model);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

Model load_model_file(const std::string& path) { return parse_model(read_text_file(path)); }

void save_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << text;
  if (!out) throw Error("failed writing '" + path + "'");
}

}  // namespace mmerge
