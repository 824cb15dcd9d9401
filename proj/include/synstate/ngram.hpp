#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "synstate/surprisal.hpp"

namespace synstate {

inline constexpr std::string_view kBos = "<s>";
inline constexpr std::string_view kEos = "</s>";
inline constexpr std::string_view kUnk = "<unk>";

// Interpolated absolute-discounting n-gram model:
//   P_k(w|h) = max(c(h,w) - d, 0) / c(h) + d * N1+(h .) / c(h) * P_{k-1}(w|h')
// falling back to P_{k-1} when c(h) = 0. The unigram level is the relative
// frequency over the vocabulary, EOS and an UNK type carrying `unk_floor`
// pseudo-counts. Out-of-vocabulary tokens are scored as UNK.
class NGramModel {
 public:
  // Throws ValidationError for an empty corpus, order outside 1..5, discount
  // outside (0,1), a negative floor, or reserved marker tokens in the corpus.
  static NGramModel train(std::span<const std::vector<std::string>> corpus, int order, double discount,
                          double unk_floor = 1.0);

  // Deterministic text form: header lines, then one count per line as
  // `k <tab> w1 <tab> ... wk <tab> count`, sorted.
  std::string save() const;
  static NGramModel load(std::string_view text);

  int order() const { return order_; }
  double discount() const { return discount_; }
  double unk_floor() const { return unk_floor_; }
  bool in_vocabulary(std::string_view w) const;
  // Predictable types: vocabulary words, EOS and UNK.
  std::vector<std::string> prediction_types() const;

  // Natural-log conditional probability; only the last order-1 context
  // tokens matter. Context may contain kBos for sentence-initial positions.
  double log_prob(std::string_view word, std::span<const std::string> context) const;

  SentenceSurprisal surprisals(std::span<const std::string> sentence) const;

 private:
  struct ContextStats {
    std::uint64_t total = 0;
    std::unordered_map<std::string, std::uint64_t> next;
  };

  void add(std::span<const std::string> context, const std::string& word, std::uint64_t count);
  std::string normalize(std::string_view w) const;
  double prob(const std::string& word, std::span<const std::string> context) const;

  int order_ = 1;
  double discount_ = 0.5;
  double unk_floor_ = 1.0;
  // levels_[k]: contexts of length k, keyed by space-joined tokens
  std::vector<std::unordered_map<std::string, ContextStats>> levels_;
};

NGramModel train_ngram(std::span<const std::vector<std::string>> corpus, int order, double discount);
SentenceSurprisal ngram_surprisals(const NGramModel& m, std::span<const std::string> sentence);

}  // namespace synstate
