#include <algorithm>
#include <set>

#include "doctest.h"
#include "synstate/error.hpp"
#include "synstate/experiment.hpp"

using namespace synstate;

namespace {

const char* kSubordinationItem = R"(experiment: subordination
factors: subordinator=sub|nosub continuation=matrix|nomatrix
regions: subclause,matrix,end

item 1
[sub,matrix] {subclause: As the doctor studied the textbook} , {matrix: the nurse walked into the office} {end: .}
[sub,nomatrix] {subclause: As the doctor studied the textbook} {end: .}
[nosub,matrix] {subclause: The doctor studied the textbook} , {matrix: the nurse walked into the office} {end: .}
[nosub,nomatrix] {subclause: The doctor studied the textbook} {end: .}
)";

std::string header_only() {
  return "experiment: tiny\nfactors: f=x|y\nregions: r,end\n";
}

}  // namespace

TEST_CASE("item file with one subordination item") {
  Experiment e = parse_item_file(kSubordinationItem);
  CHECK(e.name == "subordination");
  REQUIRE(e.items.size() == 1);
  CHECK(e.items[0].sentences.size() == 4);
  const RegionedSentence& s = e.items[0].sentences.at(Condition{{"sub", "matrix"}});
  CHECK(s.text() == "As the doctor studied the textbook , the nurse walked into the office .");
  CHECK(s.regions.at("matrix") == TokenRange{7, 13});
  CHECK(s.regions.at("end") == TokenRange{13, 14});
  CHECK(s.region_of(6) == std::nullopt);
}

TEST_CASE("valid header with no items") {
  Experiment e = parse_item_file(header_only());
  CHECK(e.items.empty());
  CHECK(validate_experiment(e).empty());
}

TEST_CASE("item file errors") {
  SUBCASE("non-contiguous region") {
    std::string text = header_only() + "item 1\n[x] {r: a} b {r: c} {end: .}\n[y] {r: a} {end: .}\n";
    CHECK_THROWS_AS(parse_item_file(text), ParseError);
  }
  SUBCASE("overlapping regions") {
    std::string text = header_only() + "item 1\n[x] {r: a {end: .}}\n[y] {r: a} {end: .}\n";
    CHECK_THROWS_AS(parse_item_file(text), ParseError);
  }
  SUBCASE("undeclared level reports line and column") {
    std::string text = header_only() + "item 1\n[z] {r: a} {end: .}\n";
    try {
      parse_item_file(text);
      FAIL("expected ParseError");
    } catch (const ParseError& err) {
      CHECK(err.line() == 5);
      CHECK(err.column() > 0);
    }
  }
  SUBCASE("missing condition") {
    std::string text = header_only() + "item 1\n[x] {r: a} {end: .}\n";
    CHECK_THROWS_AS(parse_item_file(text), ValidationError);
  }
  SUBCASE("undeclared region") {
    std::string text = header_only() + "item 1\n[x] {spillover: a} {end: .}\n[y] {r: a} {end: .}\n";
    CHECK_THROWS_AS(parse_item_file(text), ParseError);
  }
}

TEST_CASE("validate_experiment names each violation") {
  Experiment e = parse_item_file(kSubordinationItem);
  CHECK(validate_experiment(e).empty());

  Experiment missing = e;
  missing.items[0].sentences.erase(Condition{{"nosub", "nomatrix"}});
  auto v = validate_experiment(missing);
  REQUIRE(v.size() == 1);
  CHECK(v[0].find("item 1") != std::string::npos);
  CHECK(v[0].find("[nosub,nomatrix]") != std::string::npos);

  Experiment spill = e;
  spill.items[0].sentences.at(Condition{{"sub", "matrix"}}).regions["spillover"] = TokenRange{0, 1};
  spill.items[0].sentences.at(Condition{{"sub", "matrix"}}).regions.erase("subclause");
  v = validate_experiment(spill);
  REQUIRE(v.size() == 1);
  CHECK(v[0].find("spillover") != std::string::npos);
}

TEST_CASE("tokenize splits commas and periods") {
  CHECK(tokenize("As the dog ran, the cat slept.") ==
        std::vector<std::string>{"As", "the", "dog", "ran", ",", "the", "cat", "slept", "."});
}

TEST_CASE("built-in suites") {
  const auto& suites = builtin_suites();
  REQUIRE(suites.size() == 5);
  std::map<std::string, std::size_t> counts;
  for (const Experiment& e : suites) {
    CHECK_MESSAGE(validate_experiment(e).empty(), e.name);
    counts[e.name] = e.items.size();
  }
  CHECK(counts.at("subordination") == 23);
  CHECK(counts.at("subordination-modifiers") == 23);
  CHECK(counts.at("npz-transitivity") == 32);
  CHECK(counts.at("npz-length") == 32);
  CHECK(counts.at("mvrr") == 29);
  CHECK_THROWS_AS(builtin_suite("nope"), ConfigError);
}

TEST_CASE("built-in suite exemplars") {
  const RegionedSentence& sub = builtin_suite("subordination").items[0].sentences.at(Condition{{"sub", "matrix"}});
  CHECK(sub.text() == "As the doctor studied the textbook , the nurse walked into the office .");
  // 1-based tokens 8..13
  CHECK(sub.regions.at("matrix") == TokenRange{7, 13});
  CHECK(sub.regions.at("end") == TokenRange{13, 14});

  const RegionedSentence& npz =
      builtin_suite("npz-transitivity").items[0].sentences.at(Condition{{"transitive", "nocomma"}});
  CHECK(npz.text() == "When the dog scratched the vet with his new assistant took off the muzzle .");
  auto d = npz.regions.at("disambiguator");
  CHECK(std::vector<std::string>(npz.tokens.begin() + d.begin, npz.tokens.begin() + d.end) ==
        std::vector<std::string>{"took", "off"});

  const RegionedSentence& mvrr = builtin_suite("mvrr").items[0].sentences.at(Condition{{"reduced", "unambig"}});
  CHECK(mvrr.text() == "The woman given the sandwich from the kitchen tripped on the carpet .");
  CHECK(mvrr.tokens[mvrr.regions.at("disambiguator").begin] == "tripped");
}

TEST_CASE("serialization round-trips every built-in suite") {
  for (const Experiment& e : builtin_suites()) {
    std::string text = serialize_item_file(e);
    Experiment back = parse_item_file(text);
    CHECK_MESSAGE(back == e, e.name);
    CHECK(serialize_item_file(back) == text);
  }
}

TEST_CASE("subordinate clause is a matched prefix across continuation") {
  for (const char* name : {"subordination", "subordination-modifiers"}) {
    const Experiment& e = builtin_suite(name);
    for (const Item& item : e.items)
      for (const auto& [cond, s] : item.sentences) {
        if (cond.levels[1] != "matrix") continue;
        Condition other = cond;
        other.levels[1] = "nomatrix";
        const RegionedSentence& t = item.sentences.at(other);
        auto r = s.regions.at("subclause");
        CHECK(t.regions.at("subclause") == r);
        CHECK(std::equal(s.tokens.begin(), s.tokens.begin() + r.end, t.tokens.begin()));
      }
  }
}

namespace {

// Tokens of `s` outside the given regions, in order.
std::vector<std::string> tokens_without(const RegionedSentence& s, const std::set<std::string>& skip) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < s.tokens.size(); ++i) {
    auto r = s.region_of(i);
    if (!r || !skip.count(*r)) out.push_back(s.tokens[i]);
  }
  return out;
}

std::vector<std::string> drop(std::vector<std::string> toks, const std::set<std::string>& words) {
  std::erase_if(toks, [&](const std::string& t) { return words.count(t) > 0; });
  return toks;
}

}  // namespace

TEST_CASE("garden-path manipulations change only the designated tokens") {
  for (const Item& item : builtin_suite("npz-transitivity").items) {
    // comma is the only difference within a transitivity level
    for (const char* t : {"transitive", "intransitive"}) {
      const auto& a = item.sentences.at(Condition{{t, "nocomma"}});
      const auto& b = item.sentences.at(Condition{{t, "comma"}});
      CHECK(drop(b.tokens, {","}) == a.tokens);
    }
    // the verb is the only difference within a comma level
    const auto& tr = item.sentences.at(Condition{{"transitive", "nocomma"}});
    const auto& in = item.sentences.at(Condition{{"intransitive", "nocomma"}});
    REQUIRE(tr.tokens.size() == in.tokens.size());
    std::size_t diffs = 0;
    for (std::size_t i = 0; i < tr.tokens.size(); ++i) diffs += tr.tokens[i] != in.tokens[i];
    CHECK(diffs == 1);
  }
  for (const Item& item : builtin_suite("npz-length").items)
    for (const char* l : {"short", "long"}) {
      const auto& a = item.sentences.at(Condition{{l, "nocomma"}});
      const auto& b = item.sentences.at(Condition{{l, "comma"}});
      CHECK(drop(b.tokens, {","}) == a.tokens);
    }
  for (const Item& item : builtin_suite("mvrr").items) {
    for (const char* a : {"ambig", "unambig"}) {
      const auto& red = item.sentences.at(Condition{{"reduced", a}});
      const auto& unr = item.sentences.at(Condition{{"unreduced", a}});
      CHECK(drop(unr.tokens, {"who", "was"}) == red.tokens);
    }
    const auto& amb = item.sentences.at(Condition{{"reduced", "ambig"}});
    const auto& una = item.sentences.at(Condition{{"reduced", "unambig"}});
    CHECK(tokens_without(amb, {"verb"}) == tokens_without(una, {"verb"}));
  }
}
