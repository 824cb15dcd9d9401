// Command-line front end. Exit codes: 0 success, 1 configuration or input
// error, 2 some sentences failed, 3 a scorer produced nothing.

#include <CLI11.hpp>
#include <csignal>
#include <cstdio>
#include <filesystem>
#include <iostream>

#include "synstate/error.hpp"
#include "synstate/ngram.hpp"
#include "synstate/pipeline.hpp"
#include "synstate/protocol.hpp"
#include "synstate/toy_grammars.hpp"
#include "synstate/treebank.hpp"

using namespace synstate;

namespace {

constexpr int kConfigError = 1;

std::atomic<TcpScorerServer*> g_server{nullptr};

void on_signal(int) {
  if (TcpScorerServer* s = g_server.load()) s->stop();
}

void add_run_options(CLI::App* cmd, RunConfig& c, std::string& out) {
  cmd->add_option("--experiment", c.experiments, "built-in suite name or item file (repeatable)")->required();
  cmd->add_option("--scorer", c.scorers,
                  "[name=]grammar:<path|toy> | beam:<path|toy> | ngram:<path> | extern:<tcp://host:port|exec:cmd>")
      ->required();
  cmd->add_option("--action-beam", c.beam.action_beam, "action beam size")->capture_default_str();
  cmd->add_option("--word-beam", c.beam.word_beam, "word beam size")->capture_default_str();
  cmd->add_option("--max-actions-per-word", c.beam.max_actions_per_word, "action cap between words")
      ->capture_default_str();
  cmd->add_option("--clamp-bits", c.clamp_bits, "stand-in for infinite region surprisal")->capture_default_str();
  cmd->add_option("--seed", c.seed, "permutation sampler seed")->capture_default_str();
  cmd->add_option("--permutations", c.n_perm, "permutation draws (exhaustive when 2^n fits)")->capture_default_str();
  cmd->add_option("--alpha", c.alpha, "significance level of the summary table")->capture_default_str();
  cmd->add_option("--out", out, "output directory")->required();
  cmd->add_option("--workers", c.workers, "scoring threads or scorer connections")->capture_default_str();
  auto* t = cmd->add_option("--timeout-ms", "per-request timeout for external scorers");
  t->default_val(30000)->each([&c](const std::string& v) { c.timeout = std::chrono::milliseconds(std::stoll(v)); });
}

int status_code(RunStatus s) { return static_cast<int>(s); }

void print_summary(const RunResults& r) {
  auto cell = [](const std::optional<bool>& b) { return b ? (*b ? "yes" : "no") : "not-run"; };
  std::printf("%-32s %-14s %-8s %-8s\n", "scorer", "phenomenon", "basic", "fine");
  for (const SummaryCell& c : summary_table(r, r.alpha))
    std::printf("%-32s %-14s %-8s %-8s\n", c.scorer.c_str(), c.phenomenon.c_str(), cell(c.basic), cell(c.fine));
}

std::vector<std::vector<std::string>> read_corpus(const std::string& path) {
  std::vector<std::vector<std::string>> corpus;
  std::istringstream in(read_file(path));
  std::string line;
  while (std::getline(in, line)) {
    auto toks = tokenize(line);
    if (!toks.empty()) corpus.push_back(std::move(toks));
  }
  return corpus;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Targeted syntactic-state evaluation of incremental language models"};
  app.require_subcommand(1);

  // suites
  auto* suites = app.add_subcommand("suites", "list or export the built-in suites and toy grammars");
  std::string export_dir;
  suites->add_option("--export", export_dir, "write <suite>.items and <grammar>.pcfg files here");

  // score
  RunConfig score_cfg;
  std::string score_out;
  auto* score = app.add_subcommand("score", "score suites and write surprisals.tsv and failures.tsv");
  add_run_options(score, score_cfg, score_out);

  // analyze
  RunConfig analyze_cfg;
  std::string analyze_in, analyze_out;
  auto* analyze_cmd = app.add_subcommand("analyze", "effects, plot data and summary from an existing surprisals.tsv");
  analyze_cmd->add_option("--in", analyze_in, "directory holding surprisals.tsv")->required();
  analyze_cmd->add_option("--experiment", analyze_cfg.experiments, "suite name or item file (repeatable)")->required();
  analyze_cmd->add_option("--out", analyze_out, "output directory")->required();
  analyze_cmd->add_option("--clamp-bits", analyze_cfg.clamp_bits)->capture_default_str();
  analyze_cmd->add_option("--seed", analyze_cfg.seed)->capture_default_str();
  analyze_cmd->add_option("--permutations", analyze_cfg.n_perm)->capture_default_str();
  analyze_cmd->add_option("--alpha", analyze_cfg.alpha)->capture_default_str();

  // report
  RunConfig report_cfg;
  std::string report_out;
  auto* report = app.add_subcommand("report", "full run: score, analyze, write every results file, print the summary");
  add_run_options(report, report_cfg, report_out);

  // serve
  std::string serve_scorer, serve_experiment, serve_host = "127.0.0.1";
  int serve_port = 5757;
  bool serve_stdio = false;
  BeamParams serve_beam;
  auto* serve = app.add_subcommand("serve", "serve a built-in scorer over the line protocol");
  serve->add_option("--scorer", serve_scorer, "grammar:<path> | beam:<path> | ngram:<path> | *:toy")->required();
  serve->add_option("--experiment", serve_experiment, "suite whose toy grammar a ':toy' scorer uses");
  serve->add_flag("--stdio", serve_stdio, "serve standard input and output instead of TCP");
  serve->add_option("--host", serve_host, "IPv4 listen address")->capture_default_str();
  serve->add_option("--port", serve_port, "TCP port (0 picks one)")->capture_default_str();
  serve->add_option("--action-beam", serve_beam.action_beam)->capture_default_str();
  serve->add_option("--word-beam", serve_beam.word_beam)->capture_default_str();
  serve->add_option("--max-actions-per-word", serve_beam.max_actions_per_word)->capture_default_str();

  // validate
  std::vector<std::string> validate_files;
  bool validate_grammar = false;
  auto* validate = app.add_subcommand("validate", "check item files (or grammars with --grammar)");
  validate->add_option("files", validate_files, "files to check")->required();
  validate->add_flag("--grammar", validate_grammar, "files are grammars");

  // train
  auto* train = app.add_subcommand("train", "estimate a scorer model");
  train->require_subcommand(1);
  std::string corpus, ngram_out;
  int order = 3;
  double discount = 0.75, unk_floor = 1.0;
  auto* train_ngram_cmd = train->add_subcommand("ngram", "n-gram model from a text corpus (one sentence per line)");
  train_ngram_cmd->add_option("--corpus", corpus)->required();
  train_ngram_cmd->add_option("--order", order)->capture_default_str();
  train_ngram_cmd->add_option("--discount", discount)->capture_default_str();
  train_ngram_cmd->add_option("--unk-floor", unk_floor)->capture_default_str();
  train_ngram_cmd->add_option("--out", ngram_out)->required();
  std::string treebank, pcfg_out, unk_policy = "signature";
  int unk_threshold = 1;
  auto* train_pcfg_cmd = train->add_subcommand("pcfg", "relative-frequency grammar from bracketed trees");
  train_pcfg_cmd->add_option("--treebank", treebank)->required();
  train_pcfg_cmd->add_option("--unk-threshold", unk_threshold, "words seen fewer times become unknown")
      ->capture_default_str();
  train_pcfg_cmd->add_option("--unk", unk_policy, "none | single | signature")->capture_default_str();
  train_pcfg_cmd->add_option("--out", pcfg_out)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*suites) {
      if (export_dir.empty()) {
        for (const Experiment& e : builtin_suites()) {
          std::size_t n = 0;
          for (const Item& i : e.items) n += i.sentences.size();
          std::printf("%-26s %3zu items %4zu sentences  toy grammar: %s\n", e.name.c_str(), e.items.size(), n,
                      toy_grammar_for_suite(e.name).c_str());
        }
        return 0;
      }
      std::filesystem::create_directories(export_dir);
      for (const Experiment& e : builtin_suites())
        write_file_atomic(std::filesystem::path(export_dir) / (e.name + ".items"), serialize_item_file(e));
      for (const std::string& g : toy_grammar_names())
        write_file_atomic(std::filesystem::path(export_dir) / (g + ".pcfg"), write_grammar(toy_grammar(g)));
      return 0;
    }

    if (*score || *report) {
      RunConfig& cfg = *score ? score_cfg : report_cfg;
      cfg.out = *score ? score_out : report_out;
      if (auto problems = validate_config(cfg); !problems.empty()) {
        for (const std::string& p : problems) std::fprintf(stderr, "error: %s\n", p.c_str());
        return kConfigError;
      }
      RunResults results;
      RunStatus status;
      if (*score) {
        status = score_and_analyze(cfg, results);
        write_scores(results.table, cfg.out);
      } else {
        status = run_pipeline(cfg, &results);
        print_summary(results);
      }
      std::fprintf(stderr, "%zu sentences scored, %zu failed\n",
                   static_cast<std::size_t>(std::count_if(results.table.rows.begin(), results.table.rows.end(),
                                                          [](const SurprisalRow& r) { return r.eos; })),
                   results.table.failures.size());
      return status_code(status);
    }

    if (*analyze_cmd) {
      RunResults r;
      r.table = parse_surprisal_table(read_file(std::filesystem::path(analyze_in) / "surprisals.tsv"));
      for (const std::string& e : analyze_cfg.experiments) r.experiments.push_back(load_experiment(e));
      for (const SurprisalRow& row : r.table.rows)
        if (std::find(r.scorer_names.begin(), r.scorer_names.end(), row.scorer) == r.scorer_names.end())
          r.scorer_names.push_back(row.scorer);
      r.alpha = analyze_cfg.alpha;
      EffectOptions opt{analyze_cfg.clamp_bits, analyze_cfg.n_perm, analyze_cfg.seed};
      analyze(r, opt);
      write_results(r, analyze_out);
      print_summary(r);
      return 0;
    }

    if (*serve) {
      RunConfig cfg;
      cfg.beam = serve_beam;
      ScorerSpec spec = parse_scorer_spec(serve_scorer);
      if (spec.is_toy() && serve_experiment.empty()) throw ConfigError("a ':toy' scorer needs --experiment");
      auto scorer = make_builtin_scorer(spec, cfg, serve_experiment);
      if (serve_stdio) {
        serve_stream(*scorer, std::cin, std::cout);
        return 0;
      }
      if (serve_port < 0 || serve_port > 65535) throw ConfigError("port out of range");
      TcpScorerServer server(*scorer, serve_host, static_cast<std::uint16_t>(serve_port));
      g_server = &server;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      std::fprintf(stderr, "serving %s on %s:%u\n", spec.name.c_str(), serve_host.c_str(), server.port());
      server.run();
      g_server = nullptr;
      return 0;
    }

    if (*validate) {
      int bad = 0;
      for (const std::string& f : validate_files) {
        try {
          if (validate_grammar) {
            Pcfg g = parse_grammar(read_file(f));
            auto violations = g.properness_violations();
            for (const std::string& v : violations) std::printf("%s: nonterminal %s has no rules\n", f.c_str(), v.c_str());
            if (!violations.empty()) {
              ++bad;
              continue;
            }
          } else {
            parse_item_file(read_file(f));
          }
          std::printf("%s: ok\n", f.c_str());
        } catch (const Error& e) {
          std::printf("%s: %s\n", f.c_str(), e.what());
          ++bad;
        }
      }
      return bad ? kConfigError : 0;
    }

    if (*train_ngram_cmd) {
      NGramModel m = NGramModel::train(read_corpus(corpus), order, discount, unk_floor);
      write_file_atomic(ngram_out, m.save());
      return 0;
    }

    if (*train_pcfg_cmd) {
      Pcfg g = estimate_pcfg(parse_treebank(read_file(treebank)), unk_threshold, parse_unk_policy(unk_policy));
      write_file_atomic(pcfg_out, write_grammar(g));
      return 0;
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kConfigError;
  } catch (const std::filesystem::filesystem_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kConfigError;
  }
  return 0;
}
