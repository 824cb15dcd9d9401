#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "synstate/pcfg.hpp"

// Small hand-built grammars whose lexicons cover the built-in suites. Each
// encodes one phenomenon so that exact surprisal shows the expected effect
// signs on every item:
//   subordination  a subordinate clause must be followed by ", CL"; a bare
//                  fragment is possible but rare, and a comma after a main
//                  clause may also introduce a conjunction
//   npz            optionally transitive verbs may drop their object; an
//                  intransitive verb takes an object only rarely
//   mvrr           a reduced relative is rarer than a main-verb reading; a
//                  distinct participle form is used as a past tense only rarely

namespace synstate {

Pcfg toy_subordination_grammar();  // subordination, subordination-modifiers
Pcfg toy_npz_grammar();            // npz-transitivity, npz-length
Pcfg toy_mvrr_grammar();           // mvrr

std::vector<std::string> toy_grammar_names();  // "subordination", "npz", "mvrr"
Pcfg toy_grammar(std::string_view name);       // throws ConfigError
// Toy grammar whose lexicon covers a built-in suite; throws ConfigError.
std::string toy_grammar_for_suite(std::string_view suite);

}  // namespace synstate
