#include "synstate/toy_grammars.hpp"

#include <set>

#include "synstate/error.hpp"
#include "synstate/suite_lexicon.hpp"

namespace synstate {

namespace {

using Lexicon = std::map<std::string, std::set<std::string>>;

// Structural rules as "LHS -> RHS # p" lines, lexical categories uniform.
Pcfg assemble(const std::vector<std::tuple<std::string, std::vector<std::string>, double>>& rules,
              const Lexicon& lexicon) {
  PcfgBuilder b;
  b.set_start("TOP");
  for (const auto& [lhs, rhs, p] : rules) b.add_rule(lhs, rhs, p);
  for (const auto& [cat, words] : lexicon)
    for (const std::string& w : words) b.add_rule(cat, {std::pair{w, SymbolKind::Terminal}}, 1.0);
  return b.build(true);
}

void add_modifier_words(Lexicon& lex, const ModifierWords& m) {
  lex["P"].insert(m.prep);
  lex["VT"].insert(m.verb);
  lex["N"].insert(m.noun);
}

}  // namespace

Pcfg toy_subordination_grammar() {
  Lexicon lex;
  lex["CONJ"] = {"and", "but"};
  const auto& rows = subordination_rows();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const SubordinationRow& r = rows[i];
    lex["SUBW"].insert(r.subordinator);
    lex["N"].insert({r.subject, r.object, r.matrix_subject, r.matrix_object});
    lex["VT"].insert(r.verb);
    lex["VI"].insert(r.matrix_verb);
    lex["P"].insert(r.matrix_prep);
    add_modifier_words(lex, subject_modifier_words(static_cast<int>(i + 1)));
    add_modifier_words(lex, object_modifier_words(static_cast<int>(i + 1)));
  }
  return assemble(
      {
          {"TOP", {"S", "."}, 1.0},
          {"S", {"SBAR", ",", "CL"}, 0.35},
          {"S", {"SBAR"}, 0.02},
          {"S", {"ICL"}, 0.40},
          {"S", {"ICL", ",", "CL"}, 0.15},
          {"S", {"ICL", ",", "CONJ", "CL"}, 0.08},
          {"SBAR", {"SUBW", "CL"}, 1.0},
          // sentence-initial clauses differ only in the capitalized determiner
          {"ICL", {"INP", "VP"}, 1.0},
          {"INP", {"The", "N"}, 0.85},
          {"INP", {"INP", "MOD"}, 0.15},
          {"CL", {"NP", "VP"}, 1.0},
          {"NP", {"the", "N"}, 0.85},
          {"NP", {"NP", "MOD"}, 0.15},
          {"MOD", {"PP"}, 0.4},
          {"MOD", {"SRC"}, 0.3},
          {"MOD", {"ORC"}, 0.3},
          {"PP", {"P", "NP"}, 1.0},
          {"SRC", {"that", "VP"}, 1.0},
          {"ORC", {"that", "NP", "VT"}, 1.0},
          {"VP", {"VT", "NP"}, 0.6},
          {"VP", {"VI", "PP"}, 0.3},
          {"VP", {"VI"}, 0.1},
      },
      lex);
}

Pcfg toy_npz_grammar() {
  Lexicon lex;
  lex["DET"] = {"the", "his"};
  for (const NpzRow& r : npz_transitivity_rows()) {
    lex["SUBW"].insert(r.subordinator);
    lex["N"].insert({r.subject, r.object, r.final_object});
    lex["VT"].insert(r.transitive_verb);
    lex["VI"].insert(r.intransitive_verb);
    // modifier: P Det Adj N
    lex["P"].insert(r.modifier[0]);
    lex["DET"].insert(r.modifier[1]);
    lex["ADJ"].insert(r.modifier[2]);
    lex["N"].insert(r.modifier[3]);
    if (r.disambiguator.size() == 1) {
      lex["VT"].insert(r.disambiguator[0]);
    } else {
      lex["VPH"].insert(r.disambiguator[0]);
      lex["PRT"].insert(r.disambiguator[1]);
    }
  }
  for (const DiggingInRow& r : npz_length_rows()) {
    lex["SUBW"].insert(r.subordinator);
    lex["N"].insert({r.subject, r.object, r.noun});
    lex["VING"].insert({r.subject_participle, r.object_participle});
    lex["VT"].insert(r.verb);
    lex["NAME"].insert(r.name);
    lex["P"].insert(r.prep);
    lex["ADJ"].insert(r.adjective);
    lex["VI"].insert(r.final_verb);
  }
  return assemble(
      {
          {"TOP", {"S", "."}, 1.0},
          {"S", {"SBAR", ",", "CL"}, 0.6},
          {"S", {"SBAR", "CL"}, 0.4},
          {"SBAR", {"SUBW", "CL"}, 1.0},
          {"CL", {"NP", "VP"}, 1.0},
          {"NP", {"DET", "N"}, 0.5},
          {"NP", {"DET", "ADJ", "N"}, 0.15},
          {"NP", {"NAME"}, 0.05},
          {"NP", {"ADJ", "N"}, 0.05},
          {"NP", {"NP", "PP"}, 0.15},
          {"NP", {"NP", "VPING"}, 0.1},
          {"VPING", {"VING", "NP"}, 1.0},
          {"PP", {"P", "NP"}, 1.0},
          {"VP", {"VT", "NP"}, 0.4},
          {"VP", {"VT"}, 0.15},
          {"VP", {"VI"}, 0.3},
          {"VP", {"VI", "NP"}, 0.01},
          {"VP", {"VPH", "PRT", "NP"}, 0.14},
      },
      lex);
}

Pcfg toy_mvrr_grammar() {
  Lexicon lex;
  for (const MvrrRow& r : mvrr_rows()) {
    lex["N"].insert({r.subject, r.object, r.prep_object, r.final_object});
    lex["VPAST"].insert(r.ambiguous_verb);
    lex["VPART"].insert({r.ambiguous_verb, r.unambiguous_verb});
    lex["VBAD"].insert(r.unambiguous_verb);
    lex["VI"].insert(r.disambiguator);
    lex["P"].insert({r.prep, r.final_prep});
  }
  return assemble(
      {
          {"TOP", {"S", "."}, 1.0},
          {"S", {"INP", "VP"}, 1.0},
          {"INP", {"The", "N"}, 0.8},
          {"INP", {"INP", "RRC"}, 0.08},
          {"INP", {"INP", "RC"}, 0.12},
          {"RRC", {"PASS"}, 1.0},
          {"RC", {"who", "was", "PASS"}, 1.0},
          {"PASS", {"VPART", "NP"}, 0.7},
          {"PASS", {"PASS", "PP"}, 0.3},
          {"NP", {"the", "N"}, 0.8},
          {"NP", {"NP", "PP"}, 0.2},
          {"PP", {"P", "NP"}, 1.0},
          {"VP", {"VPAST", "NP"}, 0.45},
          // participle-only forms used as a past tense
          {"VP", {"VBAD", "NP"}, 0.005},
          {"VP", {"VP", "PP"}, 0.25},
          {"VP", {"VI", "PP"}, 0.2},
          {"VP", {"VI"}, 0.095},
      },
      lex);
}

std::vector<std::string> toy_grammar_names() { return {"subordination", "npz", "mvrr"}; }

Pcfg toy_grammar(std::string_view name) {
  if (name == "subordination") return toy_subordination_grammar();
  if (name == "npz") return toy_npz_grammar();
  if (name == "mvrr") return toy_mvrr_grammar();
  throw ConfigError("unknown toy grammar '" + std::string(name) + "' (subordination, npz, mvrr)");
}

std::string toy_grammar_for_suite(std::string_view suite) {
  if (suite == "subordination" || suite == "subordination-modifiers") return "subordination";
  if (suite == "npz-transitivity" || suite == "npz-length") return "npz";
  if (suite == "mvrr") return "mvrr";
  throw ConfigError("no toy grammar for suite '" + std::string(suite) + "'");
}

}  // namespace synstate
