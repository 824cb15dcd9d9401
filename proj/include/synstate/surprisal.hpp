#pragma once

#include <vector>

namespace synstate {

// Per-word surprisal in bits plus the end-of-sentence event. Entries are
// nonnegative or +infinity.
struct SentenceSurprisal {
  std::vector<double> bits;
  double eos = 0.0;

  friend bool operator==(const SentenceSurprisal&, const SentenceSurprisal&) = default;
};

}  // namespace synstate
