#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace synstate {

enum class SymbolKind : std::uint8_t { Terminal, Nonterminal };

using SymbolId = std::int32_t;

struct Symbol {
  std::string label;
  SymbolKind kind;
};

struct Rule {
  SymbolId lhs;
  std::vector<SymbolId> rhs;
  double prob;
};

enum class UnkPolicy : std::uint8_t { None, SingleUnk, SignatureUnk };

std::string_view to_string(UnkPolicy p);
UnkPolicy parse_unk_policy(std::string_view s);

// Unknown-word class of a token: UNK-NUM for all-digit tokens, otherwise
// UNK plus an optional -CAP marker and one suffix marker out of
// -ed, -ing, -s, -ly. Eleven classes in total.
std::string unk_signature(std::string_view word);

inline constexpr std::string_view kSingleUnk = "UNK";

class PcfgBuilder;

// A probabilistic context-free grammar without empty right-hand sides.
// Immutable once built; every accessor is safe for concurrent use.
class Pcfg {
 public:
  const std::vector<Symbol>& symbols() const { return symbols_; }
  const Symbol& symbol(SymbolId id) const { return symbols_[static_cast<std::size_t>(id)]; }
  std::optional<SymbolId> find(std::string_view label, SymbolKind kind) const;
  bool is_terminal(SymbolId id) const { return symbol(id).kind == SymbolKind::Terminal; }

  SymbolId start() const { return start_; }
  const std::vector<Rule>& rules() const { return rules_; }
  std::span<const std::size_t> rules_for(SymbolId lhs) const;

  // Dense 0..n-1 numbering of nonterminals, used to index closure matrices.
  const std::vector<SymbolId>& nonterminals() const { return nonterminals_; }
  std::size_t nt_index(SymbolId id) const { return nt_index_[static_cast<std::size_t>(id)]; }

  bool is_unit(const Rule& r) const { return r.rhs.size() == 1 && !is_terminal(r.rhs.front()); }

  bool in_lexicon(std::string_view word) const { return find(word, SymbolKind::Terminal).has_value(); }
  UnkPolicy unk_policy() const { return unk_policy_; }

  // Nonterminals reachable from the start symbol that have no rules.
  std::vector<std::string> properness_violations() const;

 private:
  friend class PcfgBuilder;

  std::vector<Symbol> symbols_;
  std::map<std::pair<SymbolKind, std::string>, SymbolId, std::less<>> by_label_;
  std::vector<Rule> rules_;
  std::vector<std::vector<std::size_t>> rules_by_lhs_;
  std::vector<SymbolId> nonterminals_;
  std::vector<std::size_t> nt_index_;
  SymbolId start_ = 0;
  UnkPolicy unk_policy_ = UnkPolicy::None;
};

// Collects weighted rules and produces a validated Pcfg. Repeated rules are
// merged by adding their weights.
class PcfgBuilder {
 public:
  using RhsItem = std::pair<std::string, SymbolKind>;

  PcfgBuilder& set_start(std::string label);
  PcfgBuilder& set_unk_policy(UnkPolicy p);
  PcfgBuilder& add_rule(const std::string& lhs, const std::vector<RhsItem>& rhs, double weight);
  // Right-hand side kinds are inferred at build(): a label is a
  // nonterminal iff some rule has it as its left-hand side.
  PcfgBuilder& add_rule(const std::string& lhs, const std::vector<std::string>& rhs, double weight);

  // With normalize, weights are divided by their per-LHS totals; otherwise
  // they must already sum to 1 within 1e-9 per LHS.
  Pcfg build(bool normalize = false) const;

 private:
  struct PendingRule {
    std::string lhs;
    std::vector<std::string> rhs;
    std::vector<std::optional<SymbolKind>> kinds;
    double weight;
  };
  std::optional<std::string> start_;
  UnkPolicy unk_policy_ = UnkPolicy::None;
  std::vector<PendingRule> rules_;
  std::map<std::pair<std::string, std::vector<std::string>>, std::size_t> index_;
};

// Grammar file: `start: SYM`, optional `unk: none|single|signature`, then one
// `LHS -> SYM SYM ... # prob` per line; lines starting with ';' are comments.
Pcfg parse_grammar(std::string_view text);
Pcfg load_grammar(const std::string& path);
std::string write_grammar(const Pcfg& g);

// Replaces out-of-lexicon tokens according to the grammar's unk policy.
// Throws OutOfVocabularyError under UnkPolicy::None.
std::vector<std::string> map_unknowns(const Pcfg& g, std::span<const std::string> tokens);

}  // namespace synstate
