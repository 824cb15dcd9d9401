#include "synstate/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "synstate/error.hpp"
#include "synstate/logmath.hpp"
#include "synstate/protocol.hpp"
#include "synstate/toy_grammars.hpp"

namespace synstate {

namespace {

std::string join(const std::vector<std::string>& parts, char sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

std::string condition_text(const Condition& c) { return join(c.levels, ','); }

std::string stem_of(const std::string& path) {
  std::string stem = std::filesystem::path(path).stem().string();
  return stem.empty() ? path : stem;
}

// Tab-separated table builder. Fields must not contain tabs or newlines.
class Tsv {
 public:
  explicit Tsv(std::initializer_list<std::string_view> header) {
    bool first = true;
    for (std::string_view h : header) {
      if (!first) out_ += '\t';
      out_ += h;
      first = false;
    }
    out_ += '\n';
  }
  Tsv& row() {
    fresh_ = true;
    return *this;
  }
  Tsv& operator<<(std::string_view field) {
    if (!fresh_) out_ += '\t';
    fresh_ = false;
    for (char ch : field) out_ += ch == '\t' || ch == '\n' ? ' ' : ch;
    return *this;
  }
  Tsv& operator<<(double v) { return *this << format_number(v); }
  Tsv& operator<<(std::size_t v) { return *this << std::to_string(v); }
  Tsv& operator<<(int v) { return *this << std::to_string(v); }
  void end() { out_ += '\n'; }
  const std::string& str() const { return out_; }

 private:
  std::string out_;
  bool fresh_ = true;
};

struct SentenceRef {
  const Item* item;
  const Condition* condition;
  const RegionedSentence* sentence;
};

std::vector<SentenceRef> sentences_of(const Experiment& e) {
  std::vector<SentenceRef> out;
  for (const Item& item : e.items)
    for (const auto& [c, s] : item.sentences) out.push_back({&item, &c, &s});
  return out;
}

std::vector<ScoreOutcome> score_builtin(const Scorer& scorer, const std::vector<SentenceRef>& refs, unsigned workers) {
  std::vector<ScoreOutcome> out(refs.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < refs.size(); i = next++) {
      try {
        out[i].value = scorer.score(refs[i].sentence->tokens);
      } catch (const Error& e) {
        out[i].failure = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < std::min<std::size_t>(workers, refs.size()); ++w) pool.emplace_back(work);
  work();
  for (std::thread& t : pool) t.join();
  return out;
}

// One connection per worker, each scoring a contiguous share in order.
std::vector<ScoreOutcome> score_external(const Endpoint& endpoint, const std::vector<SentenceRef>& refs,
                                         unsigned workers, std::chrono::milliseconds timeout) {
  std::vector<ScoreOutcome> out(refs.size());
  const std::size_t n_chunks = std::max<std::size_t>(1, std::min<std::size_t>(workers, refs.size()));
  auto run_chunk = [&](std::size_t k) {
    std::size_t begin = refs.size() * k / n_chunks, end = refs.size() * (k + 1) / n_chunks;
    std::vector<std::vector<std::string>> batch;
    for (std::size_t i = begin; i < end; ++i) batch.push_back(refs[i].sentence->tokens);
    try {
      auto got = score_batch(endpoint, batch, BatchOptions{timeout, true});
      std::move(got.begin(), got.end(), out.begin() + static_cast<std::ptrdiff_t>(begin));
    } catch (const Error& e) {
      for (std::size_t i = begin; i < end; ++i) out[i].failure = e.what();
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t k = 1; k < n_chunks; ++k) pool.emplace_back(run_chunk, k);
  run_chunk(0);
  for (std::thread& t : pool) t.join();
  return out;
}

const EffectEstimate* find_effect(const RunResults& r, const std::string& scorer, const std::string& experiment,
                                  const std::string& name, const std::string& slice) {
  for (const ScoredEffect& e : r.effects)
    if (e.scorer == scorer && e.experiment == experiment && e.estimate.name == name && e.estimate.slice == slice)
      return &e.estimate;
  return nullptr;
}

LevelAssignment parse_slice(const std::string& slice) {
  LevelAssignment out;
  std::stringstream ss(slice);
  std::string part;
  while (std::getline(ss, part, ','))
    if (auto eq = part.find('='); eq != std::string::npos) out[part.substr(0, eq)] = part.substr(eq + 1);
  return out;
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";  // also folds negative zero
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw ConfigError("cannot write " + tmp.string());
    f << content;
    f.flush();
    if (!f) throw ConfigError("cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot read " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

ScorerSpec parse_scorer_spec(std::string_view text) {
  ScorerSpec s;
  std::string_view rest = text;
  auto colon = rest.find(':');
  if (auto eq = rest.find('='); eq != std::string_view::npos && eq < colon) {
    s.name = std::string(rest.substr(0, eq));
    rest.remove_prefix(eq + 1);
    colon = rest.find(':');
    if (s.name.empty()) throw ConfigError("empty scorer name in '" + std::string(text) + "'");
  }
  if (colon == std::string_view::npos || colon + 1 == rest.size())
    throw ConfigError("scorer spec must look like kind:argument, got '" + std::string(text) + "'");
  std::string_view kind = rest.substr(0, colon);
  s.argument = std::string(rest.substr(colon + 1));
  std::string default_name;
  if (kind == "grammar") {
    s.kind = ScorerSpec::Kind::Grammar;
    default_name = "earley:" + stem_of(s.argument);
  } else if (kind == "beam") {
    s.kind = ScorerSpec::Kind::Beam;
    default_name = "beam:" + stem_of(s.argument);
  } else if (kind == "ngram") {
    s.kind = ScorerSpec::Kind::Ngram;
    default_name = "ngram:" + stem_of(s.argument);
  } else if (kind == "extern") {
    s.kind = ScorerSpec::Kind::Extern;
    parse_endpoint(s.argument);
    default_name = "extern:" + s.argument;
  } else {
    throw ConfigError("unknown scorer kind '" + std::string(kind) + "' (grammar, beam, ngram, extern)");
  }
  if (s.name.empty()) s.name = default_name;
  return s;
}

std::vector<std::string> validate_config(const RunConfig& c) {
  std::vector<std::string> problems;
  if (c.scorers.empty()) problems.push_back("at least one scorer is required");
  if (c.experiments.empty()) problems.push_back("at least one experiment is required");
  std::vector<std::string> names;
  for (const std::string& s : c.scorers) {
    try {
      names.push_back(parse_scorer_spec(s).name);
    } catch (const ConfigError& e) {
      problems.push_back(e.what());
    }
  }
  std::sort(names.begin(), names.end());
  if (std::adjacent_find(names.begin(), names.end()) != names.end())
    problems.push_back("scorer names must be distinct (use name=kind:argument)");
  if (c.beam.action_beam == 0 || c.beam.word_beam == 0 || c.beam.max_actions_per_word == 0)
    problems.push_back("beam sizes and the action cap must be positive");
  if (!(c.clamp_bits > 0.0) || std::isinf(c.clamp_bits)) problems.push_back("clamp ceiling must be positive and finite");
  if (!(c.alpha > 0.0 && c.alpha <= 1.0)) problems.push_back("alpha must lie in (0, 1]");
  if (c.n_perm == 0) problems.push_back("permutation count must be positive");
  if (c.workers == 0) problems.push_back("worker count must be positive");
  if (c.timeout.count() <= 0) problems.push_back("timeout must be positive");
  if (c.out.empty()) problems.push_back("an output directory is required");
  return problems;
}

Experiment load_experiment(const std::string& name_or_path) {
  for (const Experiment& e : builtin_suites())
    if (e.name == name_or_path) return e;
  if (!std::filesystem::exists(name_or_path))
    throw ConfigError("'" + name_or_path + "' is neither a built-in suite nor a file");
  return parse_item_file(read_file(name_or_path));
}

std::unique_ptr<Scorer> make_builtin_scorer(const ScorerSpec& spec, const RunConfig& config,
                                            const std::string& experiment) {
  switch (spec.kind) {
    case ScorerSpec::Kind::Grammar:
    case ScorerSpec::Kind::Beam: {
      auto g = std::make_shared<Pcfg>(spec.is_toy() ? toy_grammar(toy_grammar_for_suite(experiment))
                                                    : parse_grammar(read_file(spec.argument)));
      if (spec.kind == ScorerSpec::Kind::Grammar) return make_earley_scorer(std::move(g), spec.name);
      return make_beam_scorer(std::move(g), config.beam, spec.name);
    }
    case ScorerSpec::Kind::Ngram:
      return make_ngram_scorer(std::make_shared<NGramModel>(NGramModel::load(read_file(spec.argument))), spec.name);
    case ScorerSpec::Kind::Extern:
      break;
  }
  throw ConfigError("external scorers have no in-process implementation");
}

RunStatus score_and_analyze(const RunConfig& config, RunResults& results) {
  if (auto problems = validate_config(config); !problems.empty()) throw ConfigError(problems.front());
  results = RunResults{};
  results.alpha = config.alpha;
  results.clamp_bits = config.clamp_bits;
  for (const std::string& e : config.experiments) results.experiments.push_back(load_experiment(e));

  std::vector<ScorerSpec> specs;
  for (const std::string& s : config.scorers) specs.push_back(parse_scorer_spec(s));

  EffectOptions eopt;
  eopt.clamp_bits = config.clamp_bits;
  eopt.n_perm = config.n_perm;
  eopt.seed = config.seed;

  RunStatus status = RunStatus::Ok;
  for (const ScorerSpec& spec : specs) {
    results.scorer_names.push_back(spec.name);
    std::unique_ptr<Scorer> shared;  // file-backed scorers serve every experiment
    std::size_t ok = 0, failed = 0, cap_hits = 0;
    for (const Experiment& e : results.experiments) {
      auto refs = sentences_of(e);
      std::vector<ScoreOutcome> outcomes;
      if (spec.kind == ScorerSpec::Kind::Extern) {
        outcomes = score_external(parse_endpoint(spec.argument), refs, config.workers, config.timeout);
      } else if (spec.is_toy()) {
        auto scorer = make_builtin_scorer(spec, config, e.name);
        outcomes = score_builtin(*scorer, refs, config.workers);
        cap_hits += scorer->cap_hits();
      } else {
        if (!shared) shared = make_builtin_scorer(spec, config, e.name);
        outcomes = score_builtin(*shared, refs, config.workers);
      }
      for (std::size_t i = 0; i < refs.size(); ++i) {
        const SentenceRef& r = refs[i];
        if (outcomes[i].ok()) {
          try {
            results.table.add_sentence(spec.name, e.name, r.item->id, *r.condition, *r.sentence, *outcomes[i].value);
            ++ok;
            continue;
          } catch (const ValidationError& err) {
            outcomes[i].failure = err.what();
          }
        }
        results.table.add_failure({spec.name, e.name, r.item->id, *r.condition, outcomes[i].failure});
        ++failed;
      }
    }
    if (shared) cap_hits += shared->cap_hits();
    results.cap_hits.push_back(cap_hits);
    if (ok == 0)
      status = RunStatus::TotalFailure;
    else if (failed > 0 && status == RunStatus::Ok)
      status = RunStatus::PartialFailure;
  }
  analyze(results, eopt);
  return status;
}

void analyze(RunResults& r, const EffectOptions& options) {
  r.regions.clear();
  r.effects.clear();
  r.clamp_bits = options.clamp_bits;
  for (const std::string& scorer : r.scorer_names)
    for (const Experiment& e : r.experiments) {
      auto regions = aggregate_regions(r.table, e, scorer, true);
      for (EffectEstimate& est : builtin_effects(regions, e, options)) r.effects.push_back({scorer, e.name, std::move(est)});
      std::move(regions.begin(), regions.end(), std::back_inserter(r.regions));
    }
}

SurprisalTable parse_surprisal_table(std::string_view tsv) {
  SurprisalTable t;
  std::size_t line_no = 0, pos = 0;
  while (pos < tsv.size()) {
    std::size_t nl = tsv.find('\n', pos);
    if (nl == std::string_view::npos) nl = tsv.size();
    std::string line(tsv.substr(pos, nl - pos));
    pos = nl + 1;
    if (++line_no == 1 || line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, '\t')) f.push_back(field);
    if (line.back() == '\t') f.emplace_back();
    if (f.size() != 9) throw ParseError("expected 9 fields, found " + std::to_string(f.size()), line_no, 1);
    SurprisalRow row;
    row.scorer = f[0];
    row.experiment = f[1];
    try {
      row.item = std::stoi(f[2]);
      row.token_index = std::stoul(f[4]);
      row.bits = f[7] == "inf" ? kInfinity : std::stod(f[7]);
    } catch (const std::exception&) {
      throw ParseError("bad number", line_no, 1);
    }
    std::stringstream cs(f[3]);
    while (std::getline(cs, field, ',')) row.condition.levels.push_back(field);
    row.token = f[5];
    row.region = f[6];
    if (f[8] != "0" && f[8] != "1") throw ParseError("eos flag must be 0 or 1", line_no, 1);
    row.eos = f[8] == "1";
    t.rows.push_back(std::move(row));
  }
  return t;
}

void write_scores(const SurprisalTable& table, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);

  Tsv tokens({"scorer", "experiment", "item", "condition", "token_index", "token", "region", "bits", "eos"});
  for (const SurprisalRow& row : table.rows) {
    tokens.row() << row.scorer << row.experiment << row.item << condition_text(row.condition) << row.token_index
                 << row.token << row.region << row.bits << (row.eos ? "1" : "0");
    tokens.end();
  }
  write_file_atomic(dir / "surprisals.tsv", tokens.str());

  Tsv failures({"scorer", "experiment", "item", "condition", "reason"});
  for (const SentenceFailure& f : table.failures) {
    failures.row() << f.scorer << f.experiment << f.item << condition_text(f.condition) << f.reason;
    failures.end();
  }
  write_file_atomic(dir / "failures.tsv", failures.str());
}

void write_results(const RunResults& r, const std::filesystem::path& dir) {
  write_scores(r.table, dir);

  Tsv regions({"scorer", "experiment", "item", "condition", "region", "bits"});
  for (const RegionSurprisal& x : r.regions) {
    regions.row() << x.scorer << x.experiment << x.item << condition_text(x.condition) << x.region << x.bits;
    regions.end();
  }
  write_file_atomic(dir / "regions.tsv", regions.str());

  Tsv effects({"scorer", "experiment", "effect", "slice", "mean", "ci_low", "ci_high", "p_perm", "n_items",
               "n_clamped"});
  Tsv items({"scorer", "experiment", "effect", "slice", "item", "value", "clamped"});
  for (const ScoredEffect& se : r.effects) {
    const EffectEstimate& e = se.estimate;
    effects.row() << se.scorer << se.experiment << e.name << e.slice << e.mean << e.ci_low << e.ci_high << e.p_perm
                  << e.n_items << e.n_clamped;
    effects.end();
    for (const ItemEffect& i : e.items) {
      items.row() << se.scorer << se.experiment << e.name << e.slice << i.item << i.value << (i.clamped ? "1" : "0");
      items.end();
    }
  }
  write_file_atomic(dir / "effects.tsv", effects.str());
  write_file_atomic(dir / "item_effects.tsv", items.str());

  Tsv summary({"scorer", "phenomenon", "basic", "fine"});
  auto cell = [](const std::optional<bool>& b) { return b ? (*b ? "yes" : "no") : "not-run"; };
  for (const SummaryCell& c : summary_table(r, r.alpha)) {
    summary.row() << c.scorer << c.phenomenon << cell(c.basic) << cell(c.fine);
    summary.end();
  }
  write_file_atomic(dir / "summary.tsv", summary.str());

  emit_plot_data(r, dir);
}

void emit_plot_data(const RunResults& r, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);

  // effect bars with intervals; modifier-grid slices go to the heatmap
  Tsv bars({"scorer", "experiment", "effect", "slice", "mean", "ci_low", "ci_high"});
  Tsv heat({"scorer", "experiment", "effect", "row_mod", "col_mod", "bits"});
  for (const ScoredEffect& se : r.effects) {
    const EffectEstimate& e = se.estimate;
    LevelAssignment slice = parse_slice(e.slice);
    if (slice.contains("subjmod") && slice.contains("objmod")) {
      if (e.name == "interaction") {
        heat.row() << se.scorer << se.experiment << e.name << slice.at("subjmod") << slice.at("objmod") << e.mean;
        heat.end();
      }
      continue;
    }
    bars.row() << se.scorer << se.experiment << e.name << e.slice << e.mean << e.ci_low << e.ci_high;
    bars.end();
  }
  write_file_atomic(dir / "plot_bars.tsv", bars.str());
  write_file_atomic(dir / "plot_heatmap.tsv", heat.str());

  // condition means per region with within-item intervals
  Tsv conds({"scorer", "experiment", "region", "condition", "mean", "ci_low", "ci_high", "n_items"});
  for (const std::string& scorer : r.scorer_names)
    for (const Experiment& e : r.experiments) {
      std::map<std::tuple<int, Condition, std::string>, double> bits;
      for (const RegionSurprisal& x : r.regions)
        if (x.scorer == scorer && x.experiment == e.name)
          bits[{x.item, x.condition, x.region}] = std::isinf(x.bits) ? r.clamp_bits : x.bits;
      for (const std::string& region : e.region_names) {
        std::vector<Condition> conditions;
        for (const Condition& c : e.conditions()) {
          bool everywhere = !e.items.empty();
          for (const Item& item : e.items) {
            auto s = item.sentences.find(c);
            everywhere = everywhere && s != item.sentences.end() && s->second.regions.contains(region);
          }
          if (everywhere) conditions.push_back(c);
        }
        if (conditions.empty()) continue;
        std::vector<std::vector<double>> values;
        for (const Item& item : e.items) {
          std::vector<double> row;
          for (const Condition& c : conditions)
            if (auto it = bits.find({item.id, c, region}); it != bits.end()) row.push_back(it->second);
          if (row.size() == conditions.size()) values.push_back(std::move(row));
        }
        if (values.size() < 2) continue;
        auto ci = within_item_ci(values);
        for (std::size_t k = 0; k < conditions.size(); ++k) {
          conds.row() << scorer << e.name << region << condition_text(conditions[k]) << ci[k].mean << ci[k].ci_low
                      << ci[k].ci_high << values.size();
          conds.end();
        }
      }
    }
  write_file_atomic(dir / "plot_conditions.tsv", conds.str());
}

std::vector<SummaryCell> summary_table(const RunResults& r, double alpha) {
  struct Phenomenon {
    const char* name;
    const char* experiment;
    const char* basic;
    const char* basic_slice;
    bool basic_negative;
    const char* fine;
  };
  static const Phenomenon kPhenomena[] = {
      {"subordination", "subordination", "licensing", "", true, "penalty"},
      {"npz", "npz-transitivity", "garden_path", "transitivity=transitive", false, "transitivity_interaction"},
      {"mvrr", "mvrr", "garden_path", "ambiguity=ambig", false, "ambiguity_interaction"},
  };
  auto gate = [&](const EffectEstimate* e, bool negative) -> std::optional<bool> {
    if (!e) return std::nullopt;
    bool sign = negative ? e->mean < 0.0 : e->mean > 0.0;
    // alpha >= 1 disables the significance gate, p = 1 included
    return sign && (e->p_perm < alpha || alpha >= 1.0);
  };
  std::vector<SummaryCell> out;
  for (const std::string& scorer : r.scorer_names)
    for (const Phenomenon& p : kPhenomena) {
      SummaryCell c{scorer, p.name, std::nullopt, std::nullopt};
      bool ran = std::any_of(r.experiments.begin(), r.experiments.end(),
                             [&](const Experiment& e) { return e.name == p.experiment; });
      if (ran) {
        // a suite that ran but lost the effect to failures counts as absent evidence
        c.basic = gate(find_effect(r, scorer, p.experiment, p.basic, p.basic_slice), p.basic_negative).value_or(false);
        c.fine = gate(find_effect(r, scorer, p.experiment, p.fine, ""), false).value_or(false);
      }
      out.push_back(std::move(c));
    }
  return out;
}

RunStatus run_pipeline(const RunConfig& config, RunResults* results) {
  RunResults local;
  RunResults& r = results ? *results : local;
  RunStatus status = score_and_analyze(config, r);
  write_results(r, config.out);

  Tsv run({"key", "value"});
  auto kv = [&](std::string_view k, const std::string& v) {
    run.row() << k << v;
    run.end();
  };
  kv("experiments", join(config.experiments, ','));
  for (const std::string& s : config.scorers) kv("scorer", s);
  kv("action_beam", std::to_string(config.beam.action_beam));
  kv("word_beam", std::to_string(config.beam.word_beam));
  kv("max_actions_per_word", std::to_string(config.beam.max_actions_per_word));
  kv("clamp_bits", format_number(config.clamp_bits));
  kv("seed", std::to_string(config.seed));
  kv("n_perm", std::to_string(config.n_perm));
  kv("alpha", format_number(config.alpha));
  for (std::size_t i = 0; i < r.scorer_names.size() && i < r.cap_hits.size(); ++i)
    kv("cap_hit_sentences:" + r.scorer_names[i], std::to_string(r.cap_hits[i]));
  kv("status", std::to_string(static_cast<int>(status)));
  write_file_atomic(config.out / "run.tsv", run.str());
  return status;
}

}  // namespace synstate
