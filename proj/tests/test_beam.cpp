#include <cmath>
#include <random>

#include "doctest.h"
#include "support/derivation_oracle.hpp"
#include "synstate/beam_search.hpp"
#include "synstate/earley.hpp"
#include "synstate/error.hpp"
#include "synstate/logmath.hpp"

using namespace synstate;

namespace {

using Toks = std::vector<std::string>;

const char* kDeterministic = "start: S\nS -> a b # 1.0\n";
const char* kFork = "start: S\nS -> a a # 0.5\nS -> a b # 0.5\n";

BeamParams beams(std::size_t ka, std::size_t kw, std::size_t cap = 40) { return BeamParams{ka, kw, cap}; }

}  // namespace

TEST_CASE("default beam sizes") {
  BeamParams p;
  CHECK(p.action_beam == 100);
  CHECK(p.word_beam == 10);
  CHECK(p.max_actions_per_word == 40);
}

TEST_CASE("pcfg action scorer") {
  Pcfg det = parse_grammar(kDeterministic);
  auto s = pcfg_action_scorer(det);
  auto acts = s->legal_actions(s->initial());
  REQUIRE(acts.size() == 1);
  CHECK(acts[0].action.kind == ActionKind::Open);
  CHECK(acts[0].log_prob == 0.0);

  Pcfg fork = parse_grammar(kFork);
  auto f = pcfg_action_scorer(fork);
  acts = f->legal_actions(f->initial());
  REQUIRE(acts.size() == 2);
  for (const auto& a : acts) CHECK(std::exp(a.log_prob) == doctest::Approx(0.5));

  ParserConfig c = f->apply(f->initial(), acts[0].action);
  CHECK(c.actions_since_word == 1);
  auto gen = f->legal_actions(c);
  REQUIRE(gen.size() == 1);
  CHECK(gen[0].action == ParserAction{ActionKind::Gen, *fork.find("a", SymbolKind::Terminal)});
  CHECK(gen[0].log_prob == 0.0);
  ParserConfig after = f->apply(c, gen[0].action);
  CHECK(after.words_generated == 1);
  CHECK(after.actions_since_word == 0);
}

TEST_CASE("action distributions are normalized") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    Pcfg g = oracle::random_grammar(rng, oracle::GrammarShape::Any);
    auto s = pcfg_action_scorer(g);
    std::vector<ParserConfig> todo{s->initial()};
    for (int depth = 0; depth < 4 && !todo.empty(); ++depth) {
      std::vector<ParserConfig> next;
      for (const auto& c : todo) {
        auto acts = s->legal_actions(c);
        if (acts.empty()) {
          CHECK(s->is_complete(c));
          continue;
        }
        double total = 0.0;
        for (const auto& a : acts) {
          total += std::exp(a.log_prob);
          next.push_back(s->apply(c, a.action));
        }
        CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
      }
      todo = std::move(next);
    }
  }
}

TEST_CASE("beam surprisals on small grammars") {
  Pcfg det = parse_grammar(kDeterministic);
  BeamResult d = word_sync_beam_search(*pcfg_action_scorer(det), Toks{"a", "b"}, beams(100, 10));
  CHECK(d.surprisal.bits == std::vector<double>{0.0, 0.0});
  CHECK(d.surprisal.eos == 0.0);

  Pcfg fork = parse_grammar(kFork);
  BeamResult f = word_sync_beam_search(*pcfg_action_scorer(fork), Toks{"a", "b"}, beams(100, 10));
  SentenceSurprisal exact = word_surprisals(fork, Toks{"a", "b"});
  REQUIRE(f.surprisal.bits.size() == 2);
  CHECK(f.surprisal.bits[0] == doctest::Approx(exact.bits[0]));
  CHECK(f.surprisal.bits[1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(f.surprisal.eos == doctest::Approx(0.0));

  BeamResult narrow = word_sync_beam_search(*pcfg_action_scorer(fork), Toks{"a", "b"}, beams(100, 1));
  CHECK(std::exp(narrow.log_prefix_bounds[0]) == doctest::Approx(0.5));
}

TEST_CASE("bad parameters and unparseable prefixes") {
  Pcfg fork = parse_grammar(kFork);
  auto s = pcfg_action_scorer(fork);
  CHECK_THROWS_AS(word_sync_beam_search(*s, Toks{"a"}, beams(5, 10)), ConfigError);
  CHECK_THROWS_AS(word_sync_beam_search(*s, Toks{"a"}, beams(5, 0)), ConfigError);
  CHECK_THROWS_AS(word_sync_beam_search(*s, Toks{"a"}, beams(5, 5, 0)), ConfigError);

  BeamResult r = word_sync_beam_search(*s, Toks{"a", "c", "a"});
  REQUIRE(r.failed_at.has_value());
  CHECK(*r.failed_at == 1);
  CHECK(r.surprisal.bits[0] == 0.0);
  CHECK(std::isinf(r.surprisal.bits[1]));
  CHECK(std::isinf(r.surprisal.bits[2]));
  CHECK(std::isinf(r.surprisal.eos));
}

TEST_CASE("action cap is reported") {
  Pcfg deep = parse_grammar("start: S\nS -> A # 1\nA -> B # 1\nB -> C # 1\nC -> a # 1\n");
  BeamResult capped = word_sync_beam_search(*pcfg_action_scorer(deep), Toks{"a"}, beams(10, 1, 3));
  CHECK(capped.cap_hits == 1);
  CHECK(capped.failed_at == std::optional<std::size_t>{0});
  BeamResult ok = word_sync_beam_search(*pcfg_action_scorer(deep), Toks{"a"}, beams(10, 1, 5));
  CHECK(ok.cap_hits == 0);
  CHECK(ok.surprisal.bits[0] == 0.0);
}

TEST_CASE("lower bound on random grammars") {
  std::mt19937_64 rng(314);
  const std::vector<BeamParams> settings = {beams(1, 1), beams(2, 1), beams(3, 2), beams(10, 3), beams(100, 10),
                                            beams(5, 5, 4)};
  for (int trial = 0; trial < 60; ++trial) {
    Pcfg g = oracle::random_grammar(rng, static_cast<oracle::GrammarShape>(trial % 3));
    EarleyParser exact(g);
    auto scorer = pcfg_action_scorer(g);
    for (const Toks& s : oracle::all_strings({"a", "b", "c"}, 3)) {
      PrefixChart c = exact.parse(s);
      for (const BeamParams& p : settings) {
        BeamResult r = word_sync_beam_search(*scorer, s, p);
        for (std::size_t i = 0; i < s.size(); ++i) CHECK(r.log_prefix_bounds[i] <= c.log_prefix[i + 1] + 1e-12);
        CHECK(r.log_complete <= c.log_complete + 1e-12);
      }
    }
  }
}

TEST_CASE("saturated beams reproduce exact surprisals") {
  std::mt19937_64 rng(2718);
  const BeamParams wide = beams(100000, 100000, 1000);
  int compared = 0;
  for (int trial = 0; trial < 40; ++trial) {
    Pcfg g = oracle::random_finite_grammar(rng);
    EarleyParser exact(g);
    auto scorer = pcfg_action_scorer(g);
    for (const Toks& s : oracle::all_strings({"a", "b", "c"}, 4)) {
      SentenceSurprisal e = exact.word_surprisals(s);
      BeamResult r = word_sync_beam_search(*scorer, s, wide);
      for (std::size_t i = 0; i < s.size(); ++i) {
        if (std::isinf(e.bits[i])) {
          CHECK(std::isinf(r.surprisal.bits[i]));
        } else {
          CHECK(std::abs(r.surprisal.bits[i] - e.bits[i]) <= 1e-6);
          ++compared;
        }
      }
      if (std::isinf(e.eos))
        CHECK(std::isinf(r.surprisal.eos));
      else
        CHECK(std::abs(r.surprisal.eos - e.eos) <= 1e-6);
    }
  }
  CHECK(compared > 500);
}

TEST_CASE("determinism with tied scores") {
  Pcfg ties = parse_grammar(
      "start: S\nS -> A A # 0.25\nS -> A B # 0.25\nS -> B A # 0.25\nS -> B B # 0.25\nA -> a # 0.5\nA -> b # 0.5\nB "
      "-> a # 0.5\nB -> b # 0.5\n");
  auto s = pcfg_action_scorer(ties);
  BeamResult first = word_sync_beam_search(*s, Toks{"a", "b"}, beams(3, 2));
  for (int k = 0; k < 5; ++k) {
    BeamResult again = word_sync_beam_search(*s, Toks{"a", "b"}, beams(3, 2));
    CHECK(again.log_prefix_bounds == first.log_prefix_bounds);
    CHECK(again.surprisal == first.surprisal);
  }
  BeamEntry x{{}, -1.0, {{ActionKind::Open, 0}}};
  BeamEntry y{{}, -1.0, {{ActionKind::Open, 1}}};
  CHECK(beam_before(x, y));
  CHECK_FALSE(beam_before(y, x));
  CHECK_FALSE(beam_before(x, x));
}

TEST_CASE("widening the word beam never lowers the first-word bound") {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 40; ++trial) {
    Pcfg g = oracle::random_grammar(rng, static_cast<oracle::GrammarShape>(trial % 3));
    auto scorer = pcfg_action_scorer(g);
    for (const char* w : {"a", "b", "c"})
      for (std::size_t ka : {3, 8, 20}) {
        double last = kLogZero;
        for (std::size_t kw = 1; kw <= 3; ++kw) {
          double bound = word_sync_beam_search(*scorer, Toks{w}, beams(ka, kw)).log_prefix_bounds[0];
          CHECK(bound >= last);
          last = bound;
        }
      }
  }
}

TEST_CASE("widening the action beam can lower a bound") {
  // With K_a = 2 the word beam fills from the cheap early GEN of the 0.4
  // branch; with K_a = 1 only the 0.6 branch survives and is generated later.
  Pcfg g = parse_grammar("start: S\nS -> X # 0.6\nS -> a # 0.4\nX -> a # 1\n");
  auto s = pcfg_action_scorer(g);
  double narrow = word_sync_beam_search(*s, Toks{"a"}, beams(1, 1)).log_prefix_bounds[0];
  double wide = word_sync_beam_search(*s, Toks{"a"}, beams(2, 1)).log_prefix_bounds[0];
  CHECK(std::exp(narrow) == doctest::Approx(0.6));
  CHECK(std::exp(wide) == doctest::Approx(0.4));
}
