#pragma once

#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "synstate/pcfg.hpp"
#include "synstate/surprisal.hpp"

namespace synstate {

enum class ActionKind : std::uint8_t { Open, Gen, Close };

// OPEN carries a rule or nonterminal id, GEN a terminal id; CLOSE ignores id.
struct ParserAction {
  ActionKind kind;
  std::int32_t id = 0;

  friend auto operator<=>(const ParserAction&, const ParserAction&) = default;
};

struct ParserConfig {
  std::vector<std::int32_t> stack;  // top at back
  std::size_t words_generated = 0;
  std::size_t actions_since_word = 0;

  friend bool operator==(const ParserConfig&, const ParserConfig&) = default;
};

struct ScoredAction {
  ParserAction action;
  double log_prob;
};

// Generative transition model. Implementations must be stateless given a
// configuration so that one instance can serve concurrent searches. The
// probabilities of legal_actions sum to 1 for every incomplete config.
class ActionScorer {
 public:
  virtual ~ActionScorer() = default;

  virtual ParserConfig initial() const = 0;
  virtual std::vector<ScoredAction> legal_actions(const ParserConfig& c) const = 0;
  virtual ParserConfig apply(const ParserConfig& c, const ParserAction& a) const = 0;
  virtual bool is_complete(const ParserConfig& c) const = 0;
  // GEN id of a word; nullopt when the model cannot generate it.
  virtual std::optional<std::int32_t> terminal_id(std::string_view word) const = 0;
  // A terminal the config is already committed to generating next, if the
  // model knows one. Lets the search drop configs that cannot produce the
  // current word. The default knows nothing.
  virtual std::optional<std::int32_t> pending_terminal(const ParserConfig&) const { return std::nullopt; }
};

// Leftmost-derivation encoding of a PCFG: the stack is the pending frontier.
// A nonterminal on top licenses OPEN(rule) for each of its rules at the rule
// probability; a terminal on top licenses GEN(terminal) with probability 1.
std::unique_ptr<ActionScorer> pcfg_action_scorer(const Pcfg& g);

struct BeamEntry {
  ParserConfig config;
  double logscore = 0.0;
  std::vector<ParserAction> history;
};

// Strict total order used for pruning: higher score first, ties broken by
// the lexicographically smaller action history.
bool beam_before(const BeamEntry& a, const BeamEntry& b);

struct BeamParams {
  std::size_t action_beam = 100;
  std::size_t word_beam = 10;
  std::size_t max_actions_per_word = 40;
};

struct BeamResult {
  std::vector<double> log_prefix_bounds;  // log P_min(w_1..w_i), one per word
  double log_complete = 0.0;               // log of completed mass after the last word
  SentenceSurprisal surprisal;
  std::optional<std::size_t> failed_at;  // first word whose word beam stayed empty
  std::size_t cap_hits = 0;              // searches stopped by max_actions_per_word
};

// Throws ConfigError unless action_beam >= word_beam >= 1 and the cap >= 1.
BeamResult word_sync_beam_search(const ActionScorer& scorer, std::span<const std::string> sentence,
                                 const BeamParams& params = {});

}  // namespace synstate
