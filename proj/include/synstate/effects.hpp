#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "synstate/experiment.hpp"
#include "synstate/table.hpp"

namespace synstate {

struct RegionSurprisal {
  std::string scorer;
  std::string experiment;
  int item = 0;
  Condition condition;
  std::string region;
  double bits = 0.0;  // >= 0 or +inf

  friend bool operator==(const RegionSurprisal&, const RegionSurprisal&) = default;
};

// Region sums for one scorer on one experiment. Token rows are checked
// against the experiment's sentences. Sentences absent from the table are
// skipped when allow_missing is set and raise ValidationError otherwise.
std::vector<RegionSurprisal> aggregate_regions(const SurprisalTable& table, const Experiment& e,
                                               const std::string& scorer, bool allow_missing = false);

using LevelAssignment = std::map<std::string, std::string>;  // factor -> level

// Linear combination of region surprisals within one item. Factors that no
// cell assigns are averaged over (all their levels, equally weighted)
// unless fixed by the slice passed at evaluation time.
struct ContrastSpec {
  struct Cell {
    LevelAssignment levels;
    std::string region;
    double weight = 0.0;
  };
  std::string name;
  std::vector<Cell> cells;
};

// plus - minus on one factor at one region, other levels held fixed.
ContrastSpec difference_contrast(std::string name, const std::string& factor, const std::string& plus,
                                 const std::string& minus, const std::string& region, LevelAssignment fixed = {});
// (a1,b1 - a1,b2) - (a2,b1 - a2,b2) at one region.
ContrastSpec interaction_contrast(std::string name, const std::string& factor_a, const std::string& a1,
                                  const std::string& a2, const std::string& factor_b, const std::string& b1,
                                  const std::string& b2, const std::string& region);
// Sum of weighted contrasts under a new name.
ContrastSpec combine(std::string name, std::span<const std::pair<double, ContrastSpec>> parts);

ContrastSpec licensing_contrast();    // sub - nosub at the matrix region, matrix continuation
ContrastSpec penalty_contrast();      // sub - nosub at the end region, no matrix continuation
ContrastSpec licensing_interaction_contrast();  // penalty - licensing

struct ItemEffect {
  int item = 0;
  double value = 0.0;
  bool clamped = false;  // some contributing region was infinite

  friend bool operator==(const ItemEffect&, const ItemEffect&) = default;
};

struct EffectOptions {
  double clamp_bits = 50.0;  // stand-in for infinite region surprisal
  std::size_t n_perm = 10000;
  std::uint64_t seed = 0;
};

// Per-item values of a contrast. Throws ValidationError when the design
// lacks a factor, level or region the contrast names. Items missing a
// needed record are left out.
std::vector<ItemEffect> item_effects(std::span<const RegionSurprisal> records, const Experiment& e,
                                     const ContrastSpec& spec, const EffectOptions& options,
                                     const LevelAssignment& slice = {});

struct EffectEstimate {
  std::string name;
  std::string slice;  // "factor=level,..." or empty
  double mean = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double p_perm = 1.0;
  std::size_t n_items = 0;
  std::size_t n_clamped = 0;
  std::vector<ItemEffect> items;
};

// Mean, paired 95% t interval and sign-flip permutation p-value. With one
// item the interval is unbounded; with none the estimate is all NaN.
EffectEstimate estimate_effect(std::string name, std::vector<ItemEffect> items, const EffectOptions& options);

EffectEstimate evaluate_contrast(std::span<const RegionSurprisal> records, const Experiment& e, const ContrastSpec& spec,
                                 const EffectOptions& options, const LevelAssignment& slice = {});

EffectEstimate matrix_licensing_effect(std::span<const RegionSurprisal> records, const Experiment& e,
                                       const EffectOptions& options, const LevelAssignment& slice = {});
EffectEstimate no_matrix_penalty(std::span<const RegionSurprisal> records, const Experiment& e,
                                 const EffectOptions& options, const LevelAssignment& slice = {});
EffectEstimate licensing_interaction(std::span<const RegionSurprisal> records, const Experiment& e,
                                     const EffectOptions& options, const LevelAssignment& slice = {});

// Disambiguator surprisal of the garden-path level minus the control level
// of `factor` ("comma": nocomma - comma; "reduction": reduced - unreduced),
// once per level of the design's other factor.
std::vector<EffectEstimate> garden_path_effect(std::span<const RegionSurprisal> records, const Experiment& e,
                                               const std::string& factor, const EffectOptions& options);

// Difference of differences over the first two levels of each factor.
EffectEstimate interaction_2x2(std::span<const RegionSurprisal> records, const Experiment& e,
                               const std::string& factor_a, const std::string& factor_b, const std::string& region,
                               const EffectOptions& options);

// Every effect the experiment names in builtin_effects, plus per-slice
// breakdowns (garden paths per level, subordination effects per modifier
// combination). Unknown effect names raise ValidationError.
std::vector<EffectEstimate> builtin_effects(std::span<const RegionSurprisal> records, const Experiment& e,
                                            const EffectOptions& options);

// Paired t interval of the mean at the given confidence level.
struct Interval {
  double low = 0.0;
  double high = 0.0;
};
Interval mean_confidence_interval(std::span<const double> values, double confidence = 0.95);

struct ConditionMean {
  double mean = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

// values[item][condition]. Each item's mean across conditions is removed
// before the standard error is taken; intervals are centred on the raw
// condition means. Throws ValidationError for fewer than 2 items or ragged
// input.
std::vector<ConditionMean> within_item_ci(const std::vector<std::vector<double>>& values, double confidence = 0.95);

// Two-sided sign-flip test of a zero mean: the share of flip assignments
// whose |mean| reaches the observed |mean|. Exhaustive when 2^n <= n_perm,
// otherwise n_perm uniform draws from a generator seeded with `seed`.
double permutation_test(std::span<const double> values, std::size_t n_perm = 10000, std::uint64_t seed = 0);
bool permutation_is_exhaustive(std::size_t n_items, std::size_t n_perm);

}  // namespace synstate
