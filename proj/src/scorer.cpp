#include "synstate/scorer.hpp"

#include "synstate/error.hpp"

namespace synstate {

namespace {

class EarleyScorer final : public Scorer {
 public:
  EarleyScorer(std::shared_ptr<const Pcfg> g, std::string name)
      : g_(std::move(g)), parser_(*g_), name_(std::move(name)) {}

  const std::string& name() const override { return name_; }

  SentenceSurprisal score(std::span<const std::string> tokens) const override {
    return parser_.word_surprisals(map_unknowns(*g_, tokens));
  }

 private:
  std::shared_ptr<const Pcfg> g_;
  EarleyParser parser_;
  std::string name_;
};

class BeamScorer final : public Scorer {
 public:
  BeamScorer(std::shared_ptr<const Pcfg> g, BeamParams params, std::string name)
      : g_(std::move(g)), actions_(pcfg_action_scorer(*g_)), params_(params), name_(std::move(name)) {}

  const std::string& name() const override { return name_; }

  SentenceSurprisal score(std::span<const std::string> tokens) const override {
    BeamResult r = word_sync_beam_search(*actions_, map_unknowns(*g_, tokens), params_);
    if (r.cap_hits > 0) cap_hits_.fetch_add(1, std::memory_order_relaxed);
    return std::move(r.surprisal);
  }

  std::size_t cap_hits() const override { return cap_hits_.load(std::memory_order_relaxed); }

 private:
  std::shared_ptr<const Pcfg> g_;
  std::unique_ptr<ActionScorer> actions_;
  BeamParams params_;
  std::string name_;
  mutable std::atomic<std::size_t> cap_hits_{0};
};

class NgramScorer final : public Scorer {
 public:
  NgramScorer(std::shared_ptr<const NGramModel> m, std::string name) : m_(std::move(m)), name_(std::move(name)) {}

  const std::string& name() const override { return name_; }
  SentenceSurprisal score(std::span<const std::string> tokens) const override { return m_->surprisals(tokens); }

 private:
  std::shared_ptr<const NGramModel> m_;
  std::string name_;
};

}  // namespace

std::unique_ptr<Scorer> make_earley_scorer(std::shared_ptr<const Pcfg> g, std::string name) {
  return std::make_unique<EarleyScorer>(std::move(g), std::move(name));
}

std::unique_ptr<Scorer> make_beam_scorer(std::shared_ptr<const Pcfg> g, BeamParams params, std::string name) {
  // validate once up front rather than on every sentence
  if (params.word_beam < 1 || params.action_beam < params.word_beam || params.max_actions_per_word < 1)
    throw ConfigError("beam sizes must satisfy action_beam >= word_beam >= 1 and max_actions_per_word >= 1");
  return std::make_unique<BeamScorer>(std::move(g), params, std::move(name));
}

std::unique_ptr<Scorer> make_ngram_scorer(std::shared_ptr<const NGramModel> m, std::string name) {
  return std::make_unique<NgramScorer>(std::move(m), std::move(name));
}

}  // namespace synstate
