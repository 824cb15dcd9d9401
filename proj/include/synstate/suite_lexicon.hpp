#pragma once

#include <string>
#include <vector>

// Word tables behind the built-in suites. The toy grammars draw their
// lexicons from the same rows, so every suite sentence is in-vocabulary.

namespace synstate {

struct SubordinationRow {
  std::string subordinator;  // capitalized: "As", "When", ...
  std::string subject;
  std::string verb;  // transitive, past tense
  std::string object;
  std::string matrix_subject;
  std::string matrix_verb;  // intransitive, past tense
  std::string matrix_prep;
  std::string matrix_object;
};

// Words for a postmodifier: "P the N", "that V the N", "that the N V".
struct ModifierWords {
  std::string prep;
  std::string verb;
  std::string noun;
};

struct NpzRow {
  std::string subordinator;
  std::string subject;
  std::string transitive_verb;  // optionally transitive
  std::string intransitive_verb;
  std::string object;
  std::vector<std::string> modifier;       // P Det Adj N
  std::vector<std::string> disambiguator;  // V or V Prt
  std::string final_object;
};

struct DiggingInRow {
  std::string subordinator;
  std::string subject;
  std::string subject_participle;
  std::string verb;  // optionally transitive
  std::string object;
  std::string object_participle;
  std::string name;
  std::string prep;
  std::string adjective;
  std::string noun;
  std::string final_verb;  // intransitive
};

struct MvrrRow {
  std::string subject;
  std::string ambiguous_verb;    // past tense == past participle
  std::string unambiguous_verb;  // distinct participle form
  std::string object;
  std::string prep;
  std::string prep_object;
  std::string disambiguator;  // intransitive main verb
  std::string final_prep;
  std::string final_object;
};

const std::vector<SubordinationRow>& subordination_rows();
const ModifierWords& subject_modifier_words(int item);
const ModifierWords& object_modifier_words(int item);
const std::vector<NpzRow>& npz_transitivity_rows();
const std::vector<DiggingInRow>& npz_length_rows();
const std::vector<MvrrRow>& mvrr_rows();

}  // namespace synstate
