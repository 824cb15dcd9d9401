#pragma once

#include <atomic>
#include <memory>
#include <optional>
#include <span>
#include <string>

#include "synstate/beam_search.hpp"
#include "synstate/earley.hpp"
#include "synstate/ngram.hpp"
#include "synstate/pcfg.hpp"
#include "synstate/surprisal.hpp"

namespace synstate {

// An incremental language model seen as a surprisal function. score() is
// const and must be safe to call from several threads at once; it throws
// synstate::Error when a sentence cannot be scored at all.
class Scorer {
 public:
  virtual ~Scorer() = default;
  virtual const std::string& name() const = 0;
  virtual SentenceSurprisal score(std::span<const std::string> tokens) const = 0;
  // Sentences whose search stopped at the per-word action cap so far.
  virtual std::size_t cap_hits() const { return 0; }
};

// Outcome of scoring one sentence where failures are recorded, not thrown.
struct ScoreOutcome {
  std::optional<SentenceSurprisal> value;
  std::string failure;

  bool ok() const { return value.has_value(); }
};

// Exact surprisal from the chart parser. Tokens pass map_unknowns first.
std::unique_ptr<Scorer> make_earley_scorer(std::shared_ptr<const Pcfg> g, std::string name);

// Beam-search estimate with the PCFG action scorer.
std::unique_ptr<Scorer> make_beam_scorer(std::shared_ptr<const Pcfg> g, BeamParams params, std::string name);

std::unique_ptr<Scorer> make_ngram_scorer(std::shared_ptr<const NGramModel> m, std::string name);

}  // namespace synstate
