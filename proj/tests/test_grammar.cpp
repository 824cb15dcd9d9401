#include <map>
#include <random>

#include "doctest.h"
#include "synstate/error.hpp"
#include "synstate/pcfg.hpp"
#include "synstate/treebank.hpp"

using namespace synstate;

namespace {

double rule_prob(const Pcfg& g, const std::string& lhs, const std::vector<std::string>& rhs) {
  for (const Rule& r : g.rules()) {
    if (g.symbol(r.lhs).label != lhs || r.rhs.size() != rhs.size()) continue;
    bool same = true;
    for (std::size_t i = 0; i < rhs.size(); ++i) same = same && g.symbol(r.rhs[i]).label == rhs[i];
    if (same) return r.prob;
  }
  return 0.0;
}

void check_normalized(const Pcfg& g) {
  std::map<SymbolId, double> total;
  for (const Rule& r : g.rules()) total[r.lhs] += r.prob;
  for (const auto& [lhs, sum] : total) CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
}

}  // namespace

TEST_CASE("grammar file parsing") {
  Pcfg g = parse_grammar(
      "; toy\n"
      "start: S\n"
      "S -> NP VP # 1.0\n"
      "NP -> the dog # 0.75\n"
      "NP -> # # 0.25\n"
      "VP -> barked # 1\n");
  CHECK(g.symbol(g.start()).label == "S");
  CHECK(g.rules().size() == 4);
  CHECK(g.in_lexicon("#"));  // the probability follows the last '#'
  CHECK(g.in_lexicon("dog"));
  CHECK_FALSE(g.in_lexicon("NP"));
  CHECK(rule_prob(g, "NP", {"the", "dog"}) == 0.75);
  CHECK(g.properness_violations().empty());
  CHECK(parse_grammar(write_grammar(g)).rules().size() == 4);
  CHECK(write_grammar(parse_grammar(write_grammar(g))) == write_grammar(g));
}

TEST_CASE("grammar file errors") {
  CHECK_THROWS_AS(parse_grammar("start: S\nS -> a # 0.5\n"), ValidationError);
  CHECK_THROWS_AS(parse_grammar("start: S\nS -> # 1.0\n"), ParseError);
  CHECK_THROWS_AS(parse_grammar("S -> a # 1.0\n"), ParseError);
  CHECK_THROWS_AS(parse_grammar("start: S\nS -> a # zero\n"), ParseError);
  CHECK_THROWS_AS(parse_grammar("start: S\nS -> a\n"), ParseError);
  try {
    parse_grammar("start: S\nS -> a # 1.0\nS b # 1\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
}

TEST_CASE("properness check finds rule-less nonterminals") {
  PcfgBuilder b;
  b.set_start("S").add_rule("S", std::vector<PcfgBuilder::RhsItem>{{"X", SymbolKind::Nonterminal}}, 1.0);
  Pcfg g = b.build();
  REQUIRE(g.properness_violations().size() == 1);
  CHECK(g.properness_violations()[0].find("'X'") != std::string::npos);
}

TEST_CASE("unknown-word signatures") {
  CHECK(unk_signature("Xylotomy") == "UNK-CAP");
  CHECK(unk_signature("walked") == "UNK-ed");
  CHECK(unk_signature("Running") == "UNK-CAP-ing");
  CHECK(unk_signature("dogs") == "UNK-s");
  CHECK(unk_signature("quickly") == "UNK-ly");
  CHECK(unk_signature("1984") == "UNK-NUM");
  CHECK(unk_signature("zymurgy") == "UNK");
}

TEST_CASE("map_unknowns") {
  Pcfg sig = parse_grammar("start: S\nunk: signature\nS -> the UNK-CAP # 0.5\nS -> the UNK # 0.5\n");
  std::vector<std::string> known = {"the", "UNK"};
  CHECK(map_unknowns(sig, known) == known);
  std::vector<std::string> toks = {"the", "Xylotomy", "zymurgy", "walked"};
  auto mapped = map_unknowns(sig, toks);
  CHECK(mapped == std::vector<std::string>{"the", "UNK-CAP", "UNK", "UNK"});
  CHECK(map_unknowns(sig, mapped) == mapped);

  Pcfg single = parse_grammar("start: S\nunk: single\nS -> the UNK # 1\n");
  CHECK(map_unknowns(single, toks) == std::vector<std::string>{"the", "UNK", "UNK", "UNK"});

  Pcfg none = parse_grammar("start: S\nS -> the dog # 1\n");
  try {
    map_unknowns(none, toks);
    FAIL("expected OutOfVocabularyError");
  } catch (const OutOfVocabularyError& e) {
    CHECK(e.token() == "Xylotomy");
  }
}

TEST_CASE("map_unknowns is idempotent on random tokens") {
  Pcfg g = parse_grammar(
      "start: S\nunk: signature\nS -> a UNK-ed # 0.3\nS -> UNK-CAP-s # 0.3\nS -> UNK # 0.2\nS -> UNK-NUM # 0.2\n");
  std::mt19937_64 rng(7);
  const std::string chars = "aZe1dgsinly";
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<std::string> toks;
    for (int k = 0; k < 4; ++k) {
      std::string t;
      for (int c = 0; c < 1 + static_cast<int>(rng() % 6); ++c) t += chars[rng() % chars.size()];
      toks.push_back(t);
    }
    auto once = map_unknowns(g, toks);
    CHECK(map_unknowns(g, once) == once);
  }
}

TEST_CASE("bracketed trees") {
  TreebankTree t = parse_bracketed_tree("  (S (NP the dog) (VP barked)) \n");
  CHECK(t.label == "S");
  REQUIRE(t.children.size() == 2);
  CHECK(t.children[0].label == "NP");
  CHECK(t.children[0].children.size() == 2);
  CHECK(t.children[0].children[1].label == "dog");
  CHECK(t.children[0].children[1].is_leaf());
  CHECK(to_string(t) == "(S (NP the dog) (VP barked))");

  TreebankTree x = parse_bracketed_tree("(X a)");
  CHECK(x.label == "X");
  REQUIRE(x.children.size() == 1);
  CHECK(x.children[0].label == "a");

  CHECK_THROWS_AS(parse_bracketed_tree("(S (NP the"), ParseError);
  CHECK_THROWS_AS(parse_bracketed_tree("(S (NP the dog)))"), ParseError);
  CHECK_THROWS_AS(parse_bracketed_tree("(S ())"), ParseError);
  try {
    parse_bracketed_tree("(S\n  (NP the dog)\n  (VP ) )");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
  CHECK(parse_treebank("(A a)\n(B b) (C c)").size() == 3);
}

TEST_CASE("relative-frequency estimation") {
  SUBCASE("single observation") {
    Pcfg g = estimate_pcfg({parse_bracketed_tree("(S (A a) (B b))")}, 1);
    CHECK(g.symbol(g.start()).label == "S");
    CHECK(g.rules().size() == 3);
    CHECK(rule_prob(g, "S", {"A", "B"}) == 1.0);
    CHECK(rule_prob(g, "A", {"a"}) == 1.0);
    CHECK(rule_prob(g, "B", {"b"}) == 1.0);
  }
  SUBCASE("count ratios") {
    Pcfg g = estimate_pcfg(parse_treebank("(S (A a)) (S (A a)) (S (A b))"), 1);
    CHECK(rule_prob(g, "A", {"a"}) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(rule_prob(g, "A", {"b"}) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  }
  SUBCASE("rare words become their signature") {
    Pcfg g = estimate_pcfg(parse_treebank("(S (N zymurgy) (V ran)) (S (N dogs) (V ran)) (S (N dogs) (V ran))"), 2);
    CHECK_FALSE(g.in_lexicon("zymurgy"));
    CHECK(g.in_lexicon("UNK"));
    CHECK(rule_prob(g, "N", {"UNK"}) == doctest::Approx(1.0 / 3.0));
    CHECK(g.unk_policy() == UnkPolicy::SignatureUnk);
  }
  SUBCASE("empty elements, unlabeled outer brackets and mixed roots") {
    Pcfg g = estimate_pcfg(parse_treebank("( (S (NP (-NONE- *T*)) (VP ran)) ) (FRAG (X x))"), 1);
    CHECK(g.symbol(g.start()).label == "TOP");
    CHECK(rule_prob(g, "TOP", {"S"}) == 0.5);
    CHECK(rule_prob(g, "S", {"VP"}) == 1.0);
    CHECK_FALSE(g.find("NP", SymbolKind::Nonterminal).has_value());
  }
  CHECK_THROWS_AS(estimate_pcfg({}, 1), ValidationError);
}

namespace {

// Expands a random derivation into a tree.
TreebankTree sample_tree(const Pcfg& g, SymbolId x, std::mt19937_64& rng, int depth) {
  TreebankTree t{g.symbol(x).label, {}};
  auto rules = g.rules_for(x);
  std::size_t pick = rules[0];
  if (depth < 6) pick = rules[rng() % rules.size()];
  for (SymbolId s : g.rules()[pick].rhs)
    t.children.push_back(g.is_terminal(s) ? TreebankTree{g.symbol(s).label, {}} : sample_tree(g, s, rng, depth + 1));
  return t;
}

// Internal nodes of a tree, preorder.
void internal_nodes(TreebankTree& t, std::vector<TreebankTree*>& out) {
  if (t.is_leaf()) return;
  out.push_back(&t);
  for (TreebankTree& c : t.children) internal_nodes(c, out);
}

}  // namespace

TEST_CASE("estimation is normalized and fixed under rule-multiset-preserving regeneration") {
  Pcfg source = parse_grammar(
      "start: S\nS -> NP VP # 0.7\nS -> VP # 0.3\nNP -> d n # 0.6\nNP -> NP pp # 0.4\nVP -> v NP # 0.5\nVP -> v # 0.5\n");
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<TreebankTree> trees;
    for (int k = 0; k < 15; ++k) trees.push_back(sample_tree(source, source.start(), rng, 0));
    Pcfg g = estimate_pcfg(trees, 1);
    check_normalized(g);
    // Exchanging same-label subtrees across trees yields a different treebank
    // with exactly the same rule multiset.
    for (int swap = 0; swap < 30; ++swap) {
      std::size_t a = rng() % trees.size(), b = rng() % trees.size();
      if (a == b) continue;
      std::vector<TreebankTree*> na, nb;
      internal_nodes(trees[a], na);
      internal_nodes(trees[b], nb);
      TreebankTree* x = na[rng() % na.size()];
      std::vector<TreebankTree*> same;
      for (TreebankTree* y : nb)
        if (y->label == x->label) same.push_back(y);
      if (same.empty()) continue;
      std::swap(*x, *same[rng() % same.size()]);
    }
    Pcfg again = estimate_pcfg(trees, 1);
    CHECK(write_grammar(again) == write_grammar(g));
  }
}
