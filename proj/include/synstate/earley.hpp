#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "synstate/pcfg.hpp"
#include "synstate/surprisal.hpp"

namespace synstate {

// R_L = (I - P_L)^-1 and R_U = (I - P_U)^-1, indexed by Pcfg::nt_index.
// P_L(X,Y) sums the probabilities of rules X -> Y ..., P_U(X,Y) those of
// unit rules X -> Y. Entries are >= 0; structural zeros are exact zeros.
struct ClosureMatrices {
  Eigen::MatrixXd left_corner;
  Eigen::MatrixXd unit;
};

// Throws InconsistentGrammarError when either system is singular or its
// reciprocal condition number falls below 1e-10.
ClosureMatrices build_closures(const Pcfg& g);

struct EarleyState {
  std::uint32_t rule;  // index into Pcfg::rules(); rules().size() is the root rule "-> start"
  std::uint32_t dot;
  std::uint32_t origin;
  double forward;  // log
  double inner;    // log
};

struct PrefixChart {
  std::vector<std::vector<EarleyState>> columns;
  std::vector<double> log_prefix;  // log_prefix[0] == 0
  double log_complete = 0.0;       // log P of full parses of exactly the input
};

// Exact prefix probabilities for a PCFG without empty rules. Construction
// computes the closures once; parse() is const and safe to call concurrently.
class EarleyParser {
 public:
  explicit EarleyParser(const Pcfg& g);

  const Pcfg& grammar() const { return *g_; }
  const ClosureMatrices& closures() const { return closures_; }

  // Tokens that are not terminals of the grammar have probability zero; map
  // them with map_unknowns first to apply the grammar's unknown-word policy.
  PrefixChart parse(std::span<const std::string> tokens) const;

  double prefix_probability(std::span<const std::string> tokens) const;
  SentenceSurprisal word_surprisals(std::span<const std::string> tokens) const;

 private:
  struct Weighted {
    std::size_t nt;
    double log_weight;
  };

  std::uint32_t root_rule() const { return static_cast<std::uint32_t>(g_->rules().size()); }
  std::size_t rhs_size(std::uint32_t rule) const;
  SymbolId rhs_at(std::uint32_t rule, std::uint32_t dot) const;

  const Pcfg* g_;
  ClosureMatrices closures_;
  std::vector<std::vector<Weighted>> left_corner_;   // Z -> [(Y, log R_L(Z,Y))]
  std::vector<std::vector<Weighted>> unit_parents_;  // Y -> [(Z, log R_U(Z,Y))]
  std::vector<bool> nonunit_rule_;
};

double prefix_probability(const Pcfg& g, std::span<const std::string> tokens);
SentenceSurprisal word_surprisals(const Pcfg& g, std::span<const std::string> tokens);

// Surprisals from a chart's prefix log-probabilities; eos uses log_complete.
SentenceSurprisal surprisals_from_prefixes(std::span<const double> log_prefix, double log_complete);

}  // namespace synstate
