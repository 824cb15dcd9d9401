#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace synstate {

// Name of the region that closes every sentence. It covers the final
// period, and its surprisal additionally includes the end-of-sequence event.
inline constexpr std::string_view kEndRegion = "end";

// Half-open token index range [begin, end).
struct TokenRange {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  bool contains(std::size_t i) const { return i >= begin && i < end; }
  friend bool operator==(const TokenRange&, const TokenRange&) = default;
};

struct RegionedSentence {
  std::vector<std::string> tokens;
  std::map<std::string, TokenRange> regions;

  // Region covering token i, if any.
  std::optional<std::string> region_of(std::size_t i) const;
  std::string text() const;

  friend bool operator==(const RegionedSentence&, const RegionedSentence&) = default;
};

// One level per factor, ordered like Experiment::factors.
struct Condition {
  std::vector<std::string> levels;

  std::string label() const;  // "[sub,matrix]"
  friend auto operator<=>(const Condition&, const Condition&) = default;
};

struct Item {
  int id = 0;
  std::map<Condition, RegionedSentence> sentences;

  friend bool operator==(const Item&, const Item&) = default;
};

struct Factor {
  std::string name;
  std::vector<std::string> levels;

  friend bool operator==(const Factor&, const Factor&) = default;
};

struct Experiment {
  std::string name;
  std::vector<Factor> factors;
  std::vector<std::string> region_names;
  std::vector<Item> items;
  std::vector<std::string> builtin_effects;

  // Every condition of the full factorial crossing, first factor slowest.
  std::vector<Condition> conditions() const;
  std::optional<std::size_t> factor_index(std::string_view factor) const;
  const Item* find_item(int id) const;

  friend bool operator==(const Experiment&, const Experiment&) = default;
};

bool is_valid_token(std::string_view token);

// Splits running text into tokens: whitespace-delimited, with commas and
// periods detached into tokens of their own.
std::vector<std::string> tokenize(std::string_view text);

// Parses the item-file format. Throws ParseError (with line and column) on
// malformed syntax and ValidationError when the result breaks an invariant.
Experiment parse_item_file(std::string_view text);

// Byte-deterministic inverse of parse_item_file.
std::string serialize_item_file(const Experiment& e);

// One human-readable description per broken invariant; empty when valid.
std::vector<std::string> validate_experiment(const Experiment& e);

// The reconstructed designs shipped with the toolkit: subordination,
// subordination-modifiers, npz-transitivity, npz-length, mvrr.
const std::vector<Experiment>& builtin_suites();
const Experiment& builtin_suite(std::string_view name);

}  // namespace synstate
