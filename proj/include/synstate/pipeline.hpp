#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "synstate/beam_search.hpp"
#include "synstate/effects.hpp"
#include "synstate/experiment.hpp"
#include "synstate/scorer.hpp"
#include "synstate/table.hpp"

namespace synstate {

// "[name=]kind:argument" with kind one of
//   grammar:<path>|toy   exact Earley surprisal
//   beam:<path>|toy      beam-search estimate with the PCFG action scorer
//   ngram:<path>         saved n-gram model
//   extern:<endpoint>    tcp://host:port or exec:<command>
// "toy" picks, per experiment, the built-in toy grammar covering it.
struct ScorerSpec {
  enum class Kind { Grammar, Beam, Ngram, Extern } kind = Kind::Grammar;
  std::string name;
  std::string argument;

  bool is_toy() const { return (kind == Kind::Grammar || kind == Kind::Beam) && argument == "toy"; }
};

ScorerSpec parse_scorer_spec(std::string_view text);  // throws ConfigError

struct RunConfig {
  std::vector<std::string> experiments;  // built-in suite names or item-file paths
  std::vector<std::string> scorers;      // scorer specs
  BeamParams beam;
  double clamp_bits = 50.0;
  std::uint64_t seed = 0;
  std::size_t n_perm = 10000;
  double alpha = 0.05;
  std::filesystem::path out;
  unsigned workers = 1;
  std::chrono::milliseconds timeout{30000};  // per external request
};

// One line per broken rule; empty when the configuration is usable.
std::vector<std::string> validate_config(const RunConfig& c);

// Built-in suite name or item-file path; throws ConfigError, ParseError or
// ValidationError.
Experiment load_experiment(const std::string& name_or_path);

struct ScoredEffect {
  std::string scorer;
  std::string experiment;
  EffectEstimate estimate;
};

struct RunResults {
  std::vector<std::string> scorer_names;
  std::vector<Experiment> experiments;
  SurprisalTable table;
  std::vector<RegionSurprisal> regions;
  std::vector<ScoredEffect> effects;
  double alpha = 0.05;
  double clamp_bits = 50.0;
  std::vector<std::size_t> cap_hits;  // per scorer, parallel to scorer_names
};

enum class RunStatus { Ok = 0, PartialFailure = 2, TotalFailure = 3 };

// Scores every sentence with every scorer and estimates the built-in
// effects. Sentence-level problems are recorded as failures; the status is
// TotalFailure when some scorer produced no sentence at all. Throws
// ConfigError for an unusable configuration.
RunStatus score_and_analyze(const RunConfig& config, RunResults& results);

// Region sums and built-in effects for every scorer and experiment in
// r.table; replaces r.regions and r.effects.
void analyze(RunResults& r, const EffectOptions& options);

// Inverse of the surprisals.tsv writer; throws ParseError.
SurprisalTable parse_surprisal_table(std::string_view tsv);

// The full run: score_and_analyze, then every results file under
// config.out.
RunStatus run_pipeline(const RunConfig& config, RunResults* results = nullptr);

// Tab-separated results files, written atomically. write_scores writes
// only surprisals.tsv and failures.tsv.
void write_scores(const SurprisalTable& table, const std::filesystem::path& dir);
void write_results(const RunResults& r, const std::filesystem::path& dir);
// plot_bars.tsv, plot_heatmap.tsv and plot_conditions.tsv.
void emit_plot_data(const RunResults& r, const std::filesystem::path& dir);

struct SummaryCell {
  std::string scorer;
  std::string phenomenon;  // subordination, npz, mvrr
  std::optional<bool> basic;  // nullopt: suite not run
  std::optional<bool> fine;
};

// Per scorer and phenomenon: basic effect (right sign and p < alpha) and
// fine-grained effect (no-matrix penalty, transitivity interaction,
// ambiguity interaction), each with the same gate.
std::vector<SummaryCell> summary_table(const RunResults& r, double alpha);

// Results-file helpers shared with the command-line tool.
std::string format_number(double v);  // 9 significant digits, inf, nan
void write_file_atomic(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);  // throws ConfigError

// Scorer for one experiment; "toy" specs resolve against the experiment.
std::unique_ptr<Scorer> make_builtin_scorer(const ScorerSpec& spec, const RunConfig& config,
                                            const std::string& experiment);

}  // namespace synstate
