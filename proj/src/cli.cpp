#include "mmerge/cli.hpp"

#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "mmerge/model_io.hpp"
#include "mmerge/search.hpp"
#include "mmerge/word_classes.hpp"

namespace mmerge {

namespace {

struct Options {
  std::string corpus;
  std::string tokenize = "chars";
  double alpha = 1.0;
  double lambda = 1.0;
  std::size_t beam = 1;
  std::size_t lookahead = 2;
  std::size_t patience = 3;
  std::size_t max_chunk_len = 4;
  std::string min_chunk_occ = "2";
  std::string scale_total;
  std::size_t online_batch = 0;
  bool online_set = false;
  std::uint64_t seed = 1;
  std::size_t max_steps = 10000;
  std::string out;
  std::string trace;
  std::string model;
  std::size_t max_len = 10;
  std::size_t n = 100;
  bool uniform = false;
  std::size_t max_expansions = 200;
  std::string mode = "bayes";
  std::size_t classes = 0;
  bool prune = false;
  bool json = false;
  bool no_compound = false;
  bool serial = false;
};

Count parse_count_flag(const std::string& text, const std::string& flag) {
  try {
    return parse_count(text);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(flag + ": " + e.what());
  }
}

Corpus read_corpus(const Options& o) {
  Corpus corpus = load_corpus_file(o.corpus, parse_tokenization(o.tokenize));
  if (!o.scale_total.empty()) {
    Count total = parse_count_flag(o.scale_total, "--scale-total");
    if (total <= 0) throw ConfigError("--scale-total must be positive");
    corpus = scale_counts(corpus, total);
  }
  return corpus;
}

Hyperparams hyperparams(const Options& o) {
  Hyperparams h{o.alpha, o.lambda};
  h.validate();
  return h;
}

SearchConfig search_config(const Options& o) {
  SearchConfig cfg;
  cfg.beam_width = o.beam;
  cfg.strategy = o.beam > 1 ? Strategy::beam : Strategy::greedy;
  cfg.lookahead = o.lookahead;
  cfg.patience = o.patience;
  cfg.max_steps = o.max_steps;
  cfg.max_chunk_len = o.max_chunk_len;
  cfg.min_chunk_occurrences = parse_count_flag(o.min_chunk_occ, "--min-chunk-occ");
  cfg.prune_hmm_pairs = o.prune;
  if (o.online_set) cfg.online_batch = o.online_batch;
  cfg.compound_chunks = !o.no_compound;
  cfg.parallel = !o.serial;
  cfg.validate();
  return cfg;
}

void emit(const Options& o, const std::string& text, std::ostream& out) {
  if (o.out.empty()) out << text;
  else save_text_file(o.out, text);
}

template <typename Model>
void finish_induction(const Options& o, const SearchResult<Model>& result, const std::string& model_text,
                      std::ostream& out) {
  emit(o, model_text, out);
  if (!o.trace.empty()) {
    std::ostringstream t;
    write_trace(t, result.trace);
    save_text_file(o.trace, t.str());
  }
  if (!o.out.empty())
    out << "accepted steps: " << result.accepted_steps() << "\n"
        << std::setprecision(10) << "initial log_posterior: " << result.initial_score.log_posterior << "\n"
        << "final log_posterior: " << result.final_score.log_posterior << "\n";
}

nlohmann::json score_json(const PosteriorScore& s, const Hyperparams& h) {
  return {{"dl_bits", s.description_length_bits},
          {"log_prior", s.log_structure_prior},
          {"log_marginal", s.log_marginal_likelihood},
          {"log_posterior", s.log_posterior},
          {"alpha", h.alpha},
          {"lambda", h.prior_weight}};
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Bayesian model merging for HMM and SCFG induction"};
  app.name("mmerge");
  app.require_subcommand(1, 1);

  auto add_scoring = [&](CLI::App* c) {
    c->add_option("--alpha", o.alpha, "Symmetric Dirichlet concentration")->capture_default_str();
    c->add_option("--lambda", o.lambda, "Weight of the description-length prior")->capture_default_str();
  };
  auto add_corpus = [&](CLI::App* c, bool required) {
    auto* opt = c->add_option("--corpus", o.corpus, "Corpus file");
    if (required) opt->required();
    c->add_option("--tokenize", o.tokenize, "Tokenization: chars or words")
        ->check(CLI::IsMember({"chars", "words"}))
        ->capture_default_str();
    c->add_option("--scale-total", o.scale_total, "Rescale counts to this total");
  };
  auto add_search = [&](CLI::App* c) {
    c->add_option("--beam", o.beam, "Beam width (1 = greedy)")->capture_default_str();
    c->add_option("--lookahead", o.lookahead, "Greedy lookahead depth")->capture_default_str();
    c->add_option("--patience", o.patience, "Beam expansions without improvement before stopping")
        ->capture_default_str();
    c->add_option("--max-steps", o.max_steps, "Maximum search steps")->capture_default_str();
    c->add_option("--online-batch", o.online_batch, "Incorporate and search in batches of this size")
        ->each([&](const std::string&) { o.online_set = true; });
    c->add_option("--out", o.out, "Output model file (default stdout)");
    c->add_option("--trace", o.trace, "JSONL trace file");
    c->add_flag("--serial", o.serial, "Score candidates on one thread");
    add_scoring(c);
  };

  auto* induce_hmm_cmd = app.add_subcommand("induce-hmm", "Induce an HMM by state merging");
  add_corpus(induce_hmm_cmd, true);
  add_search(induce_hmm_cmd);
  induce_hmm_cmd->add_flag("--prune", o.prune, "Only merge states sharing a symbol or a predecessor");

  auto* induce_scfg_cmd = app.add_subcommand("induce-scfg", "Induce an SCFG by merging and chunking");
  add_corpus(induce_scfg_cmd, true);
  add_search(induce_scfg_cmd);
  induce_scfg_cmd->add_option("--max-chunk-len", o.max_chunk_len, "Longest chunked sequence")->capture_default_str();
  induce_scfg_cmd->add_option("--min-chunk-occ", o.min_chunk_occ, "Minimum weighted chunk occurrences")
      ->capture_default_str();
  induce_scfg_cmd->add_flag("--no-compound", o.no_compound, "Do not propose chunk-then-merge operators");

  auto* classes_cmd = app.add_subcommand("induce-classes", "Induce word classes as a bigram class HMM");
  add_corpus(classes_cmd, true);
  add_scoring(classes_cmd);
  classes_cmd->add_option("--mode", o.mode, "bayes or ml_target")
      ->check(CLI::IsMember({"bayes", "ml_target"}))
      ->capture_default_str();
  classes_cmd->add_option("--classes", o.classes, "Target class count for ml_target mode");
  classes_cmd->add_option("--lookahead", o.lookahead, "Greedy lookahead depth")->capture_default_str();
  classes_cmd->add_option("--out", o.out, "Class listing file (default stdout)");
  classes_cmd->add_option("--trace", o.trace, "JSONL trace file");

  auto* score_cmd = app.add_subcommand("score", "Print the posterior score of a model");
  score_cmd->add_option("--model", o.model, "Model file")->required();
  add_corpus(score_cmd, false);
  add_scoring(score_cmd);
  score_cmd->add_flag("--json", o.json, "JSON report");

  auto* enumerate_cmd = app.add_subcommand("enumerate", "Print the strings a model generates up to a length");
  enumerate_cmd->add_option("--model", o.model, "Model file")->required();
  enumerate_cmd->add_option("--max-len", o.max_len, "Length bound")->capture_default_str();
  enumerate_cmd->add_option("--tokenize", o.tokenize, "Output joining: chars or words")
      ->check(CLI::IsMember({"chars", "words"}))
      ->capture_default_str();

  auto* sample_cmd = app.add_subcommand("sample", "Draw a corpus from an SCFG");
  sample_cmd->add_option("--model", o.model, "SCFG file")->required();
  sample_cmd->add_option("--n", o.n, "Number of strings")->capture_default_str();
  sample_cmd->add_option("--seed", o.seed, "Random seed")->capture_default_str();
  sample_cmd->add_option("--max-expansions", o.max_expansions, "Reject longer derivations")->capture_default_str();
  sample_cmd->add_flag("--uniform", o.uniform, "Uniform production probabilities");
  sample_cmd->add_option("--tokenize", o.tokenize, "Output joining: chars or words")
      ->check(CLI::IsMember({"chars", "words"}))
      ->capture_default_str();
  sample_cmd->add_option("--out", o.out, "Output corpus file (default stdout)");

  auto* convert_cmd = app.add_subcommand("convert", "Parse, validate and re-serialize a model file");
  convert_cmd->add_option("--model", o.model, "Model file")->required();
  convert_cmd->add_option("--out", o.out, "Output file (default stdout)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 1;
  }

  try {
    if (induce_hmm_cmd->parsed()) {
      Corpus corpus = read_corpus(o);
      auto result = induce_hmm(corpus, hyperparams(o), search_config(o));
      finish_induction(o, result, serialize_hmm(result.final_model), out);
    } else if (induce_scfg_cmd->parsed()) {
      Corpus corpus = read_corpus(o);
      auto result = induce_scfg(corpus, hyperparams(o), search_config(o));
      finish_induction(o, result, serialize_scfg(result.final_model), out);
    } else if (classes_cmd->parsed()) {
      Corpus corpus = read_corpus(o);
      SearchConfig cfg;
      cfg.lookahead = o.lookahead;
      std::optional<std::size_t> k;
      if (o.mode == "ml_target") {
        if (classes_cmd->count("--classes") == 0) throw ConfigError("--classes is required in ml_target mode");
        k = o.classes;
      }
      auto result = induce_classes(corpus, hyperparams(o), parse_class_mode(o.mode), k, cfg);
      emit(o, format_classes(result.model), out);
      if (!o.trace.empty()) {
        std::ostringstream t;
        write_trace(t, result.search.trace);
        save_text_file(o.trace, t.str());
      }
    } else if (score_cmd->parsed()) {
      Hyperparams h = hyperparams(o);
      Model model = load_model_file(o.model);
      PosteriorScore s = std::visit([&](const auto& m) { return log_posterior(m, h); }, model);
      nlohmann::json report = score_json(s, h);
      if (!o.corpus.empty()) {
        Corpus corpus = read_corpus(o);
        std::size_t covered = 0;
        for (const auto& sample : corpus.samples()) {
          bool ok = std::visit(
              [&](const auto& m) {
                if constexpr (std::is_same_v<std::decay_t<decltype(m)>, Hmm>) return hmm_generates(m, sample.tokens);
                else return scfg_generates(m, sample.tokens);
              },
              model);
          covered += ok ? 1 : 0;
        }
        report["samples"] = corpus.size();
        report["covered"] = covered;
      }
      if (o.json) {
        out << report.dump(2) << '\n';
      } else {
        out << std::setprecision(10);
        for (const char* key : {"dl_bits", "log_prior", "log_marginal", "log_posterior", "alpha", "lambda", "samples",
                                "covered"})
          if (report.contains(key)) out << key << ": " << report[key].dump() << '\n';
      }
    } else if (enumerate_cmd->parsed()) {
      if (o.max_len < 1) throw ConfigError("--max-len must be at least 1");
      Model model = load_model_file(o.model);
      std::set<Sentence> lang = std::visit(
          [&](const auto& m) {
            if constexpr (std::is_same_v<std::decay_t<decltype(m)>, Hmm>) return enumerate_hmm_language(m, o.max_len);
            else return enumerate_scfg_language(m, o.max_len);
          },
          model);
      std::vector<Sentence> sorted(lang.begin(), lang.end());
      std::stable_sort(sorted.begin(), sorted.end(),
                       [](const Sentence& a, const Sentence& b) { return a.size() < b.size(); });
      Tokenization mode = parse_tokenization(o.tokenize);
      for (const auto& s : sorted) out << join_tokens(s, mode) << '\n';
    } else if (sample_cmd->parsed()) {
      Model model = load_model_file(o.model);
      const auto* g = std::get_if<Scfg>(&model);
      if (!g) throw ModelError("sample needs an SCFG model");
      Corpus corpus = sample_strings(*g, {o.n, o.seed, o.max_expansions, o.uniform});
      emit(o, serialize_corpus(corpus, parse_tokenization(o.tokenize)), out);
    } else if (convert_cmd->parsed()) {
      emit(o, serialize_model(load_model_file(o.model)), out);
    }
  } catch (const ConfigError& e) {
    err << "mmerge: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "mmerge: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

}  // namespace mmerge
