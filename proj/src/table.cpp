#include "synstate/table.hpp"

#include "synstate/error.hpp"

namespace synstate {

void SurprisalTable::add_sentence(const std::string& scorer, const std::string& experiment, int item,
                                  const Condition& condition, const RegionedSentence& sentence,
                                  const SentenceSurprisal& s) {
  if (s.bits.size() != sentence.tokens.size())
    throw ValidationError("surprisal count " + std::to_string(s.bits.size()) + " does not match token count " +
                          std::to_string(sentence.tokens.size()));
  for (std::size_t i = 0; i < sentence.tokens.size(); ++i)
    rows.push_back(SurprisalRow{scorer, experiment, item, condition, i, sentence.tokens[i],
                                sentence.region_of(i).value_or(""), s.bits[i], false});
  rows.push_back(SurprisalRow{scorer, experiment, item, condition, sentence.tokens.size(), "</s>",
                              std::string(kEndRegion), s.eos, true});
}

}  // namespace synstate
