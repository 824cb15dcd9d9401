#include <cmath>
#include <random>

#include "doctest.h"
#include "support/derivation_oracle.hpp"
#include "synstate/earley.hpp"
#include "synstate/error.hpp"
#include "synstate/logmath.hpp"

using namespace synstate;

namespace {

using Toks = std::vector<std::string>;

const char* kDeterministic = "start: S\nS -> a b # 1.0\n";
const char* kFork = "start: S\nS -> a a # 0.5\nS -> a b # 0.5\n";
const char* kLeftRec = "start: S\nS -> S a # 0.5\nS -> a # 0.5\n";

}  // namespace

TEST_CASE("closures") {
  SUBCASE("no left recursion and no unit rules give identities") {
    Pcfg g = parse_grammar("start: S\nS -> A b # 1\nA -> a # 1\n");
    ClosureMatrices c = build_closures(g);
    CHECK(c.unit.isIdentity());
    // A is a left corner of S, so R_L is identity plus that one entry
    Pcfg flat = parse_grammar(kFork);
    ClosureMatrices f = build_closures(flat);
    CHECK(f.left_corner.isIdentity());
    CHECK(f.unit.isIdentity());
    CHECK(c.left_corner(g.nt_index(*g.find("S", SymbolKind::Nonterminal)),
                        g.nt_index(*g.find("A", SymbolKind::Nonterminal))) == 1.0);
  }
  SUBCASE("geometric left recursion") {
    ClosureMatrices c = build_closures(parse_grammar(kLeftRec));
    CHECK(c.left_corner(0, 0) == doctest::Approx(2.0).epsilon(1e-14));
  }
  SUBCASE("unit cycle of probability one") {
    Pcfg g = parse_grammar("start: S\nS -> A # 1\nA -> S # 1\n");
    CHECK_THROWS_AS(build_closures(g), InconsistentGrammarError);
  }
}

TEST_CASE("prefix probabilities") {
  CHECK(prefix_probability(parse_grammar(kDeterministic), Toks{"a"}) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(prefix_probability(parse_grammar(kFork), Toks{"a", "b"}) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(prefix_probability(parse_grammar(kLeftRec), Toks{"a", "a"}) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(prefix_probability(parse_grammar(kFork), Toks{"b"}) == 0.0);
  CHECK(prefix_probability(parse_grammar(kFork), Toks{"zzz"}) == 0.0);
  CHECK(prefix_probability(parse_grammar(kFork), Toks{}) == 1.0);
}

TEST_CASE("word surprisals") {
  SentenceSurprisal d = word_surprisals(parse_grammar(kDeterministic), Toks{"a", "b"});
  CHECK(d.bits == std::vector<double>{0.0, 0.0});
  CHECK(d.eos == 0.0);

  SentenceSurprisal f = word_surprisals(parse_grammar(kFork), Toks{"a", "b"});
  REQUIRE(f.bits.size() == 2);
  CHECK(f.bits[0] == doctest::Approx(0.0));
  CHECK(f.bits[1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(f.eos == doctest::Approx(0.0));

  SentenceSurprisal l = word_surprisals(parse_grammar(kLeftRec), Toks{"a", "a"});
  CHECK(l.bits[0] == doctest::Approx(0.0));
  CHECK(l.bits[1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(l.eos == doctest::Approx(1.0).epsilon(1e-12));

  SentenceSurprisal bad = word_surprisals(parse_grammar(kFork), Toks{"a", "c", "a"});
  CHECK(bad.bits[0] == 0.0);
  CHECK(std::isinf(bad.bits[1]));
  CHECK(std::isinf(bad.bits[2]));
  CHECK(std::isinf(bad.eos));

  // "a" alone is a prefix but not a sentence of the fork grammar
  CHECK(std::isinf(word_surprisals(parse_grammar(kFork), Toks{"a"}).eos));
}

TEST_CASE("chart invariants") {
  Pcfg g = parse_grammar(
      "start: S\nS -> NP VP # 1\nNP -> NP PP # 0.2\nNP -> d n # 0.8\nPP -> p NP # 1\nVP -> v NP # 0.6\nVP -> VP PP # "
      "0.1\nVP -> v # 0.3\n");
  EarleyParser parser(g);
  PrefixChart c = parser.parse(Toks{"d", "n", "v", "d", "n", "p", "d", "n"});
  CHECK(c.log_prefix[0] == 0.0);
  for (std::size_t i = 1; i < c.log_prefix.size(); ++i) CHECK(c.log_prefix[i] <= c.log_prefix[i - 1] + 1e-12);
  for (const auto& col : c.columns)
    for (const EarleyState& s : col) {
      if (s.origin == 0) CHECK(s.forward >= s.inner - 1e-12);
      CHECK(s.dot <= (s.rule == g.rules().size() ? 1u : g.rules()[s.rule].rhs.size()));
    }
}

TEST_CASE("oracle equivalence on random grammars") {
  std::mt19937_64 rng(20240611);
  int left_recursive = 0, unit = 0, nonzero_complete = 0;
  for (int trial = 0; trial < 60; ++trial) {
    auto shape = static_cast<oracle::GrammarShape>(trial % 3);
    Pcfg g = oracle::random_grammar(rng, shape);
    left_recursive += oracle::has_left_recursion(g);
    unit += oracle::has_unit_rule(g);
    EarleyParser parser(g);
    for (const Toks& s : oracle::all_strings({"a", "b", "c"}, 4)) {
      oracle::Enumeration ref = oracle::enumerate(g, s);
      REQUIRE(ref.pruned < 1e-12);
      PrefixChart c = parser.parse(s);
      INFO(write_grammar(g), " on ", s.size(), " tokens");
      CHECK(std::abs(std::exp(c.log_prefix.back()) - ref.prefix) <= 1e-9);
      CHECK(std::abs(std::exp(c.log_complete) - ref.complete) <= 1e-9);
      nonzero_complete += ref.complete > 1e-6;
    }
  }
  CHECK(nonzero_complete >= 150);
  CHECK(left_recursive >= 5);
  CHECK(unit >= 5);
}

TEST_CASE("chain-rule identity") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 30; ++trial) {
    Pcfg g = oracle::random_grammar(rng, static_cast<oracle::GrammarShape>(trial % 3));
    EarleyParser parser(g);
    for (const Toks& s : oracle::all_strings({"a", "b", "c"}, 4)) {
      PrefixChart c = parser.parse(s);
      if (c.log_complete == kLogZero) continue;
      SentenceSurprisal r = surprisals_from_prefixes(c.log_prefix, c.log_complete);
      double total = r.eos;
      for (double b : r.bits) total += b;
      CHECK(std::abs(total - nats_to_bits(c.log_complete)) <= 1e-9);
    }
  }
}

TEST_CASE("finite-language grammar: complete probabilities sum to one") {
  Pcfg g = parse_grammar(
      "start: S\nS -> A B # 0.6\nS -> c # 0.4\nA -> a # 0.5\nA -> a a # 0.5\nB -> b # 0.3\nB -> C # 0.7\nC -> b c # 1\n");
  EarleyParser parser(g);
  double total = 0.0;
  for (const Toks& s : oracle::all_strings({"a", "b", "c"}, 4)) total += std::exp(parser.parse(s).log_complete);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}
