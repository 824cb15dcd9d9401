#pragma once

#include <string>
#include <vector>

#include "synstate/experiment.hpp"
#include "synstate/surprisal.hpp"

namespace synstate {

// One token of one scored sentence. The end-of-sequence event is an extra
// row with eos set, token "</s>", index equal to the token count, and
// region "end".
struct SurprisalRow {
  std::string scorer;
  std::string experiment;
  int item = 0;
  Condition condition;
  std::size_t token_index = 0;
  std::string token;
  std::string region;  // empty when the token lies outside every region
  double bits = 0.0;
  bool eos = false;

  friend bool operator==(const SurprisalRow&, const SurprisalRow&) = default;
};

struct SentenceFailure {
  std::string scorer;
  std::string experiment;
  int item = 0;
  Condition condition;
  std::string reason;

  friend bool operator==(const SentenceFailure&, const SentenceFailure&) = default;
};

struct SurprisalTable {
  std::vector<SurprisalRow> rows;
  std::vector<SentenceFailure> failures;

  // Appends the rows of one sentence; throws ValidationError when the
  // surprisal count differs from the token count.
  void add_sentence(const std::string& scorer, const std::string& experiment, int item, const Condition& condition,
                    const RegionedSentence& sentence, const SentenceSurprisal& s);
  void add_failure(SentenceFailure f) { failures.push_back(std::move(f)); }
};

}  // namespace synstate
