#include "synstate/effects.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <tuple>

#include "synstate/error.hpp"
#include "synstate/logmath.hpp"

namespace synstate {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
// Per-item effects this close to zero are summation noise of cancelling
// region sums; left alone they would look like a consistent signed effect.
constexpr double kZeroEffect = 1e-10;

using SentenceKey = std::pair<int, Condition>;

std::string slice_label(const LevelAssignment& slice) {
  std::string out;
  for (const auto& [f, l] : slice) out += (out.empty() ? "" : ",") + f + "=" + l;
  return out;
}

// Every assignment of levels to the given factors.
std::vector<LevelAssignment> crossing(const Experiment& e, const std::vector<std::string>& factors) {
  std::vector<LevelAssignment> out{{}};
  for (const std::string& f : factors) {
    const Factor& factor = e.factors[*e.factor_index(f)];
    std::vector<LevelAssignment> next;
    for (const LevelAssignment& a : out)
      for (const std::string& l : factor.levels) {
        LevelAssignment b = a;
        b[f] = l;
        next.push_back(std::move(b));
      }
    out = std::move(next);
  }
  return out;
}

void check_level(const Experiment& e, const std::string& factor, const std::string& level, const std::string& what) {
  auto fi = e.factor_index(factor);
  if (!fi) throw ValidationError(what + ": experiment " + e.name + " has no factor '" + factor + "'");
  const auto& levels = e.factors[*fi].levels;
  if (std::find(levels.begin(), levels.end(), level) == levels.end())
    throw ValidationError(what + ": factor '" + factor + "' has no level '" + level + "'");
}

const Factor& factor_named(const Experiment& e, const std::string& name, const std::string& what) {
  auto fi = e.factor_index(name);
  if (!fi) throw ValidationError(what + ": experiment " + e.name + " has no factor '" + name + "'");
  return e.factors[*fi];
}

// The garden-path (ambiguous) level of a disambiguation factor comes first.
std::pair<std::string, std::string> garden_path_levels(const Factor& f) {
  if (f.levels.size() < 2) throw ValidationError("factor '" + f.name + "' needs two levels");
  if (f.name == "comma") return {"nocomma", "comma"};
  if (f.name == "reduction") return {"reduced", "unreduced"};
  return {f.levels[0], f.levels[1]};
}

std::vector<std::string> other_factors(const Experiment& e, const std::vector<std::string>& used) {
  std::vector<std::string> out;
  for (const Factor& f : e.factors)
    if (std::find(used.begin(), used.end(), f.name) == used.end()) out.push_back(f.name);
  return out;
}

}  // namespace

std::vector<RegionSurprisal> aggregate_regions(const SurprisalTable& table, const Experiment& e,
                                               const std::string& scorer, bool allow_missing) {
  std::map<SentenceKey, std::vector<const SurprisalRow*>> by_sentence;
  for (const SurprisalRow& r : table.rows)
    if (r.scorer == scorer && r.experiment == e.name) by_sentence[{r.item, r.condition}].push_back(&r);

  std::vector<RegionSurprisal> out;
  for (const Item& item : e.items) {
    for (const auto& [cond, sentence] : item.sentences) {
      std::string where = "item " + std::to_string(item.id) + " " + cond.label();
      auto it = by_sentence.find({item.id, cond});
      if (it == by_sentence.end()) {
        if (allow_missing) continue;
        throw ValidationError("missing cell: " + where);
      }
      std::vector<const SurprisalRow*> rows = it->second;
      std::stable_sort(rows.begin(), rows.end(), [](const SurprisalRow* a, const SurprisalRow* b) {
        return std::tie(a->eos, a->token_index) < std::tie(b->eos, b->token_index);
      });
      std::size_t n_tokens = 0, n_eos = 0;
      for (const SurprisalRow* r : rows) (r->eos ? n_eos : n_tokens)++;
      if (n_tokens != sentence.tokens.size() || n_eos > 1)
        throw ValidationError("token count mismatch for " + where + ": table has " + std::to_string(n_tokens) +
                              ", experiment has " + std::to_string(sentence.tokens.size()));
      std::map<std::string, double> sums;
      for (const auto& [name, range] : sentence.regions) sums[name] = 0.0;
      for (std::size_t i = 0; i < rows.size(); ++i) {
        const SurprisalRow& r = *rows[i];
        if (!r.eos && (r.token_index != i || r.token != sentence.tokens[i]))
          throw ValidationError("token mismatch for " + where + " at index " + std::to_string(i));
        if (!(r.bits >= 0.0)) throw ValidationError("negative or NaN surprisal for " + where);
        std::string region = r.eos ? std::string(kEndRegion) : sentence.region_of(i).value_or("");
        if (auto s = sums.find(region); s != sums.end()) s->second += r.bits;
      }
      for (const auto& [name, bits] : sums) out.push_back(RegionSurprisal{scorer, e.name, item.id, cond, name, bits});
    }
  }
  return out;
}

ContrastSpec difference_contrast(std::string name, const std::string& factor, const std::string& plus,
                                 const std::string& minus, const std::string& region, LevelAssignment fixed) {
  ContrastSpec c{std::move(name), {}};
  LevelAssignment p = fixed, m = std::move(fixed);
  p[factor] = plus;
  m[factor] = minus;
  c.cells.push_back({std::move(p), region, 1.0});
  c.cells.push_back({std::move(m), region, -1.0});
  return c;
}

ContrastSpec interaction_contrast(std::string name, const std::string& factor_a, const std::string& a1,
                                  const std::string& a2, const std::string& factor_b, const std::string& b1,
                                  const std::string& b2, const std::string& region) {
  ContrastSpec c{std::move(name), {}};
  c.cells.push_back({{{factor_a, a1}, {factor_b, b1}}, region, 1.0});
  c.cells.push_back({{{factor_a, a1}, {factor_b, b2}}, region, -1.0});
  c.cells.push_back({{{factor_a, a2}, {factor_b, b1}}, region, -1.0});
  c.cells.push_back({{{factor_a, a2}, {factor_b, b2}}, region, 1.0});
  return c;
}

ContrastSpec combine(std::string name, std::span<const std::pair<double, ContrastSpec>> parts) {
  ContrastSpec c{std::move(name), {}};
  for (const auto& [w, part] : parts)
    for (ContrastSpec::Cell cell : part.cells) {
      cell.weight *= w;
      c.cells.push_back(std::move(cell));
    }
  return c;
}

ContrastSpec licensing_contrast() {
  return difference_contrast("licensing", "subordinator", "sub", "nosub", "matrix", {{"continuation", "matrix"}});
}

ContrastSpec penalty_contrast() {
  return difference_contrast("penalty", "subordinator", "sub", "nosub", std::string(kEndRegion),
                             {{"continuation", "nomatrix"}});
}

ContrastSpec licensing_interaction_contrast() {
  const std::pair<double, ContrastSpec> parts[] = {{1.0, penalty_contrast()}, {-1.0, licensing_contrast()}};
  return combine("interaction", parts);
}

std::vector<ItemEffect> item_effects(std::span<const RegionSurprisal> records, const Experiment& e,
                                     const ContrastSpec& spec, const EffectOptions& options,
                                     const LevelAssignment& slice) {
  const std::string what = "contrast " + spec.name;
  if (spec.cells.empty()) throw ValidationError(what + " has no cells");
  for (const auto& [f, l] : slice) check_level(e, f, l, what);

  // Resolve every cell into the full conditions it averages over.
  struct Resolved {
    std::vector<Condition> conditions;
    std::string region;
    double weight;
  };
  std::vector<Resolved> cells;
  for (const ContrastSpec::Cell& cell : spec.cells) {
    if (std::find(e.region_names.begin(), e.region_names.end(), cell.region) == e.region_names.end())
      throw ValidationError(what + ": experiment " + e.name + " has no region '" + cell.region + "'");
    LevelAssignment fixed = slice;
    for (const auto& [f, l] : cell.levels) {
      check_level(e, f, l, what);
      fixed[f] = l;
    }
    std::vector<std::string> free;
    for (const Factor& f : e.factors)
      if (!fixed.contains(f.name)) free.push_back(f.name);
    Resolved r{{}, cell.region, cell.weight};
    for (const LevelAssignment& rest : crossing(e, free)) {
      Condition c;
      for (const Factor& f : e.factors) c.levels.push_back(fixed.contains(f.name) ? fixed.at(f.name) : rest.at(f.name));
      r.conditions.push_back(std::move(c));
    }
    cells.push_back(std::move(r));
  }

  std::map<std::tuple<int, Condition, std::string>, double> bits;
  for (const RegionSurprisal& r : records)
    if (r.experiment == e.name) bits[{r.item, r.condition, r.region}] = r.bits;

  std::vector<ItemEffect> out;
  for (const Item& item : e.items) {
    ItemEffect eff{item.id, 0.0, false};
    bool complete = true;
    for (const Resolved& cell : cells) {
      double sum = 0.0;
      for (const Condition& c : cell.conditions) {
        auto it = bits.find({item.id, c, cell.region});
        if (it == bits.end()) {
          complete = false;
          break;
        }
        double b = it->second;
        if (std::isinf(b)) {
          b = options.clamp_bits;
          eff.clamped = true;
        }
        sum += b;
      }
      if (!complete) break;
      eff.value += cell.weight * sum / static_cast<double>(cell.conditions.size());
    }
    if (!complete) continue;
    if (std::abs(eff.value) < kZeroEffect) eff.value = 0.0;
    out.push_back(eff);
  }
  return out;
}

Interval mean_confidence_interval(std::span<const double> values, double confidence) {
  const std::size_t n = values.size();
  if (n == 0) return {kNaN, kNaN};
  double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(n);
  if (n == 1) return {-kInfinity, kInfinity};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  double se = std::sqrt(ss / static_cast<double>(n - 1)) / std::sqrt(static_cast<double>(n));
  boost::math::students_t dist(static_cast<double>(n - 1));
  double t = boost::math::quantile(dist, 0.5 + confidence / 2.0);
  return {mean - t * se, mean + t * se};
}

bool permutation_is_exhaustive(std::size_t n_items, std::size_t n_perm) {
  return n_items < 63 && (std::uint64_t{1} << n_items) <= n_perm;
}

double permutation_test(std::span<const double> values, std::size_t n_perm, std::uint64_t seed) {
  const std::size_t n = values.size();
  if (n == 0) return 1.0;
  double observed = std::abs(std::accumulate(values.begin(), values.end(), 0.0));
  // sums instead of means; the tolerance absorbs summation-order rounding
  double threshold = observed * (1.0 - 1e-12);
  auto flipped_sum = [&](auto&& sign_of) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += sign_of(i) ? -values[i] : values[i];
    return std::abs(s);
  };
  std::uint64_t hits = 0, total = 0;
  if (permutation_is_exhaustive(n, n_perm)) {
    total = std::uint64_t{1} << n;
    for (std::uint64_t mask = 0; mask < total; ++mask)
      if (flipped_sum([&](std::size_t i) { return (mask >> i) & 1U; }) >= threshold) ++hits;
  } else {
    if (n_perm == 0) throw ConfigError("permutation count must be positive");
    std::mt19937_64 rng(seed);
    std::vector<bool> flip(n);
    total = n_perm;
    for (std::size_t k = 0; k < n_perm; ++k) {
      for (std::size_t i = 0; i < n; ++i) flip[i] = (rng() >> 63) != 0;
      if (flipped_sum([&](std::size_t i) { return flip[i]; }) >= threshold) ++hits;
    }
  }
  return static_cast<double>(hits) / static_cast<double>(total);
}

EffectEstimate estimate_effect(std::string name, std::vector<ItemEffect> items, const EffectOptions& options) {
  EffectEstimate est;
  est.name = std::move(name);
  est.n_items = items.size();
  std::vector<double> v;
  for (const ItemEffect& i : items) {
    v.push_back(i.value);
    if (i.clamped) ++est.n_clamped;
  }
  if (v.empty()) {
    est.mean = est.ci_low = est.ci_high = est.p_perm = kNaN;
  } else {
    est.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    Interval ci = mean_confidence_interval(v);
    // keep ci_low <= mean <= ci_high under rounding
    est.ci_low = std::min(ci.low, est.mean);
    est.ci_high = std::max(ci.high, est.mean);
    est.p_perm = permutation_test(v, options.n_perm, options.seed);
  }
  est.items = std::move(items);
  return est;
}

EffectEstimate evaluate_contrast(std::span<const RegionSurprisal> records, const Experiment& e, const ContrastSpec& spec,
                                 const EffectOptions& options, const LevelAssignment& slice) {
  EffectEstimate est = estimate_effect(spec.name, item_effects(records, e, spec, options, slice), options);
  est.slice = slice_label(slice);
  return est;
}

EffectEstimate matrix_licensing_effect(std::span<const RegionSurprisal> records, const Experiment& e,
                                       const EffectOptions& options, const LevelAssignment& slice) {
  return evaluate_contrast(records, e, licensing_contrast(), options, slice);
}

EffectEstimate no_matrix_penalty(std::span<const RegionSurprisal> records, const Experiment& e,
                                 const EffectOptions& options, const LevelAssignment& slice) {
  return evaluate_contrast(records, e, penalty_contrast(), options, slice);
}

EffectEstimate licensing_interaction(std::span<const RegionSurprisal> records, const Experiment& e,
                                     const EffectOptions& options, const LevelAssignment& slice) {
  return evaluate_contrast(records, e, licensing_interaction_contrast(), options, slice);
}

std::vector<EffectEstimate> garden_path_effect(std::span<const RegionSurprisal> records, const Experiment& e,
                                               const std::string& factor, const EffectOptions& options) {
  auto [gp, control] = garden_path_levels(factor_named(e, factor, "garden_path"));
  std::vector<EffectEstimate> out;
  for (const LevelAssignment& slice : crossing(e, other_factors(e, {factor})))
    out.push_back(evaluate_contrast(records, e, difference_contrast("garden_path", factor, gp, control, "disambiguator"),
                                    options, slice));
  return out;
}

EffectEstimate interaction_2x2(std::span<const RegionSurprisal> records, const Experiment& e,
                               const std::string& factor_a, const std::string& factor_b, const std::string& region,
                               const EffectOptions& options) {
  const Factor& a = factor_named(e, factor_a, "interaction");
  const Factor& b = factor_named(e, factor_b, "interaction");
  if (a.levels.size() < 2 || b.levels.size() < 2) throw ValidationError("interaction needs two levels per factor");
  return evaluate_contrast(records, e,
                           interaction_contrast(factor_a + "_x_" + factor_b, factor_a, a.levels[0], a.levels[1],
                                                factor_b, b.levels[0], b.levels[1], region),
                           options);
}

namespace {

// Garden-path interaction: how much larger the garden path is at `more`
// than at `less` of the modulating factor.
EffectEstimate modulation(std::span<const RegionSurprisal> records, const Experiment& e, const std::string& name,
                          const std::string& gp_factor, const std::string& modulator, const std::string& more,
                          const std::string& less, const EffectOptions& options) {
  auto [gp, control] = garden_path_levels(factor_named(e, gp_factor, name));
  return evaluate_contrast(records, e,
                           interaction_contrast(name, modulator, more, less, gp_factor, gp, control, "disambiguator"),
                           options);
}

std::string disambiguation_factor(const Experiment& e) {
  for (const char* f : {"comma", "reduction"})
    if (e.factor_index(f)) return f;
  throw ValidationError("garden_path: experiment " + e.name + " has neither a comma nor a reduction factor");
}

}  // namespace

std::vector<EffectEstimate> builtin_effects(std::span<const RegionSurprisal> records, const Experiment& e,
                                            const EffectOptions& options) {
  std::vector<EffectEstimate> out;
  for (const std::string& name : e.builtin_effects) {
    if (name == "licensing" || name == "penalty" || name == "interaction") {
      ContrastSpec spec = name == "licensing" ? licensing_contrast()
                          : name == "penalty" ? penalty_contrast()
                                              : licensing_interaction_contrast();
      out.push_back(evaluate_contrast(records, e, spec, options));
      auto extra = other_factors(e, {"subordinator", "continuation"});
      if (!extra.empty())
        for (const LevelAssignment& slice : crossing(e, extra))
          out.push_back(evaluate_contrast(records, e, spec, options, slice));
    } else if (name == "garden_path") {
      for (EffectEstimate& est : garden_path_effect(records, e, disambiguation_factor(e), options))
        out.push_back(std::move(est));
    } else if (name == "transitivity_interaction") {
      out.push_back(modulation(records, e, name, "comma", "transitivity", "transitive", "intransitive", options));
    } else if (name == "length_interaction") {
      out.push_back(modulation(records, e, name, "comma", "length", "long", "short", options));
    } else if (name == "ambiguity_interaction") {
      out.push_back(modulation(records, e, name, "reduction", "ambiguity", "ambig", "unambig", options));
    } else {
      throw ValidationError("unknown effect '" + name + "' in experiment " + e.name);
    }
  }
  return out;
}

std::vector<ConditionMean> within_item_ci(const std::vector<std::vector<double>>& values, double confidence) {
  const std::size_t n = values.size();
  if (n < 2) throw ValidationError("within-item intervals need at least 2 items");
  const std::size_t k = values.front().size();
  if (k == 0) throw ValidationError("within-item intervals need at least one condition");
  for (const auto& row : values)
    if (row.size() != k) throw ValidationError("every item needs a value for every condition");

  std::vector<std::vector<double>> centered(k, std::vector<double>(n));
  std::vector<double> raw_mean(k, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double item_mean = std::accumulate(values[i].begin(), values[i].end(), 0.0) / static_cast<double>(k);
    for (std::size_t c = 0; c < k; ++c) {
      centered[c][i] = values[i][c] - item_mean;
      raw_mean[c] += values[i][c];
    }
  }
  boost::math::students_t dist(static_cast<double>(n - 1));
  double t = boost::math::quantile(dist, 0.5 + confidence / 2.0);
  std::vector<ConditionMean> out;
  for (std::size_t c = 0; c < k; ++c) {
    double m = raw_mean[c] / static_cast<double>(n);
    double cm = std::accumulate(centered[c].begin(), centered[c].end(), 0.0) / static_cast<double>(n);
    double ss = 0.0;
    for (double v : centered[c]) ss += (v - cm) * (v - cm);
    // exact zeros stay exact: a constant offset gives zero-width intervals
    double se = ss == 0.0 ? 0.0 : std::sqrt(ss / static_cast<double>(n - 1)) / std::sqrt(static_cast<double>(n));
    out.push_back({m, m - t * se, m + t * se});
  }
  return out;
}

}  // namespace synstate
