#include "synstate/beam_search.hpp"

#include <algorithm>
#include <cmath>

#include "synstate/error.hpp"
#include "synstate/logmath.hpp"

namespace synstate {

namespace {

class PcfgActionScorer final : public ActionScorer {
 public:
  explicit PcfgActionScorer(const Pcfg& g) : g_(&g) {
    log_probs_.reserve(g.rules().size());
    for (const Rule& r : g.rules()) log_probs_.push_back(std::log(r.prob));
  }

  ParserConfig initial() const override { return ParserConfig{{g_->start()}, 0, 0}; }

  std::vector<ScoredAction> legal_actions(const ParserConfig& c) const override {
    std::vector<ScoredAction> out;
    if (c.stack.empty()) return out;
    SymbolId top = c.stack.back();
    if (g_->is_terminal(top)) {
      out.push_back({{ActionKind::Gen, top}, 0.0});
      return out;
    }
    for (std::size_t r : g_->rules_for(top)) out.push_back({{ActionKind::Open, static_cast<std::int32_t>(r)}, log_probs_[r]});
    return out;
  }

  ParserConfig apply(const ParserConfig& c, const ParserAction& a) const override {
    ParserConfig next = c;
    next.stack.pop_back();
    if (a.kind == ActionKind::Gen) {
      ++next.words_generated;
      next.actions_since_word = 0;
      return next;
    }
    const auto& rhs = g_->rules()[static_cast<std::size_t>(a.id)].rhs;
    next.stack.insert(next.stack.end(), rhs.rbegin(), rhs.rend());
    ++next.actions_since_word;
    return next;
  }

  bool is_complete(const ParserConfig& c) const override { return c.stack.empty(); }

  std::optional<std::int32_t> terminal_id(std::string_view word) const override {
    return g_->find(word, SymbolKind::Terminal);
  }

  std::optional<std::int32_t> pending_terminal(const ParserConfig& c) const override {
    if (!c.stack.empty() && g_->is_terminal(c.stack.back())) return c.stack.back();
    return std::nullopt;
  }

 private:
  const Pcfg* g_;
  std::vector<double> log_probs_;
};

// Expands every entry by one action. `word` restricts GEN to that terminal
// and drops configs committed to another one; nullopt forbids GEN.
std::vector<BeamEntry> successors(const ActionScorer& scorer, const std::vector<BeamEntry>& fringe,
                                  std::optional<std::int32_t> word) {
  std::vector<BeamEntry> out;
  for (const BeamEntry& e : fringe)
    for (const ScoredAction& sa : scorer.legal_actions(e.config)) {
      if (sa.action.kind == ActionKind::Gen && (!word || sa.action.id != *word)) continue;
      ParserConfig next = scorer.apply(e.config, sa.action);
      if (sa.action.kind != ActionKind::Gen && word) {
        auto pending = scorer.pending_terminal(next);
        if (pending && *pending != *word) continue;
      }
      BeamEntry s{std::move(next), e.logscore + sa.log_prob, e.history};
      s.history.push_back(sa.action);
      out.push_back(std::move(s));
    }
  return out;
}

void prune(std::vector<BeamEntry>& entries, std::size_t k) {
  if (entries.size() > k) {
    std::partial_sort(entries.begin(), entries.begin() + static_cast<std::ptrdiff_t>(k), entries.end(), beam_before);
    entries.resize(k);
  } else {
    std::sort(entries.begin(), entries.end(), beam_before);
  }
}

double total_score(const std::vector<BeamEntry>& entries) {
  double acc = kLogZero;
  for (const BeamEntry& e : entries) acc = log_add(acc, e.logscore);
  return acc;
}

}  // namespace

std::unique_ptr<ActionScorer> pcfg_action_scorer(const Pcfg& g) { return std::make_unique<PcfgActionScorer>(g); }

bool beam_before(const BeamEntry& a, const BeamEntry& b) {
  if (a.logscore != b.logscore) return a.logscore > b.logscore;
  return a.history < b.history;
}

BeamResult word_sync_beam_search(const ActionScorer& scorer, std::span<const std::string> sentence,
                                 const BeamParams& params) {
  if (params.word_beam < 1 || params.action_beam < params.word_beam)
    throw ConfigError("beam sizes must satisfy action_beam >= word_beam >= 1");
  if (params.max_actions_per_word < 1) throw ConfigError("max_actions_per_word must be at least 1");

  BeamResult result;
  std::vector<BeamEntry> beam{BeamEntry{scorer.initial(), 0.0, {}}};
  double previous = 0.0;

  for (std::size_t i = 0; i < sentence.size(); ++i) {
    auto word = scorer.terminal_id(sentence[i]);
    std::vector<BeamEntry> word_beam;
    if (word) {
      std::vector<BeamEntry> fringe = std::move(beam);
      std::size_t steps = 0;
      while (!fringe.empty() && word_beam.size() < params.word_beam) {
        if (steps == params.max_actions_per_word) {
          ++result.cap_hits;
          break;
        }
        ++steps;
        std::vector<BeamEntry> next = successors(scorer, fringe, word);
        prune(next, params.action_beam);
        fringe.clear();
        for (BeamEntry& e : next)
          (e.history.back().kind == ActionKind::Gen ? word_beam : fringe).push_back(std::move(e));
      }
      prune(word_beam, params.word_beam);
    }
    if (word_beam.empty()) {
      result.failed_at = i;
      result.log_prefix_bounds.resize(sentence.size(), kLogZero);
      result.surprisal.bits.resize(sentence.size(), kInfinity);
      result.log_complete = kLogZero;
      result.surprisal.eos = kInfinity;
      return result;
    }
    double bound = total_score(word_beam);
    result.log_prefix_bounds.push_back(bound);
    result.surprisal.bits.push_back(surprisal_bits(bound, previous));
    previous = bound;
    beam = std::move(word_beam);
  }

  // Completion: follow non-GEN actions from the survivors.
  std::vector<BeamEntry> complete;
  std::vector<BeamEntry> fringe;
  for (BeamEntry& e : beam) (scorer.is_complete(e.config) ? complete : fringe).push_back(std::move(e));
  for (std::size_t step = 0; !fringe.empty(); ++step) {
    if (step == params.max_actions_per_word) {
      ++result.cap_hits;
      break;
    }
    std::vector<BeamEntry> next = successors(scorer, fringe, std::nullopt);
    prune(next, params.action_beam);
    fringe.clear();
    for (BeamEntry& e : next) (scorer.is_complete(e.config) ? complete : fringe).push_back(std::move(e));
  }
  result.log_complete = total_score(complete);
  result.surprisal.eos = surprisal_bits(result.log_complete, previous);
  return result;
}

}  // namespace synstate
