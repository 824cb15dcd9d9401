#include "synstate/earley.hpp"

#include <queue>
#include <unordered_map>

#include "synstate/error.hpp"
#include "synstate/logmath.hpp"

namespace synstate {

namespace {

constexpr double kMinRcond = 1e-10;

// Boolean transitive-reflexive closure of a nonnegative matrix's support.
Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> reachability(const Eigen::MatrixXd& p) {
  const Eigen::Index n = p.rows();
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> r(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) r(i, j) = i == j || p(i, j) > 0.0;
  for (Eigen::Index k = 0; k < n; ++k)
    for (Eigen::Index i = 0; i < n; ++i)
      if (r(i, k))
        for (Eigen::Index j = 0; j < n; ++j) r(i, j) = r(i, j) || r(k, j);
  return r;
}

Eigen::MatrixXd closure(const Eigen::MatrixXd& p, const char* what) {
  const Eigen::Index n = p.rows();
  if (n == 0) return p;
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n) - p;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
  double rcond = lu.rcond();
  if (!(rcond >= kMinRcond))
    throw InconsistentGrammarError(std::string(what) + " closure is singular or ill-conditioned (rcond " +
                                   std::to_string(rcond) + ")");
  Eigen::MatrixXd r = lu.inverse();
  auto support = reachability(p);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!support(i, j)) {
        r(i, j) = 0.0;
        continue;
      }
      if (!std::isfinite(r(i, j)) || r(i, j) <= 0.0)
        throw InconsistentGrammarError(std::string(what) + " closure has a non-positive entry on a reachable pair");
    }
  return r;
}

struct StateKey {
  std::uint32_t rule, dot, origin;
  bool operator==(const StateKey&) const = default;
};

struct StateKeyHash {
  std::size_t operator()(const StateKey& k) const {
    std::uint64_t h = (static_cast<std::uint64_t>(k.rule) << 32) ^ (static_cast<std::uint64_t>(k.dot) << 20) ^ k.origin;
    return std::hash<std::uint64_t>{}(h);
  }
};

// One chart column: states plus a key index for merging duplicates.
struct Column {
  std::vector<EarleyState> states;
  std::unordered_map<StateKey, std::size_t, StateKeyHash> index;

  // Returns the slot and whether it was newly created.
  std::pair<std::size_t, bool> add(std::uint32_t rule, std::uint32_t dot, std::uint32_t origin, double forward,
                                   double inner) {
    auto [it, fresh] = index.try_emplace(StateKey{rule, dot, origin}, states.size());
    if (fresh) {
      states.push_back(EarleyState{rule, dot, origin, forward, inner});
    } else {
      EarleyState& s = states[it->second];
      s.forward = log_add(s.forward, forward);
      s.inner = log_add(s.inner, inner);
    }
    return {it->second, fresh};
  }
};

}  // namespace

ClosureMatrices build_closures(const Pcfg& g) {
  const auto n = static_cast<Eigen::Index>(g.nonterminals().size());
  Eigen::MatrixXd pl = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd pu = Eigen::MatrixXd::Zero(n, n);
  for (const Rule& r : g.rules()) {
    SymbolId first = r.rhs.front();
    if (g.is_terminal(first)) continue;
    auto x = static_cast<Eigen::Index>(g.nt_index(r.lhs));
    auto y = static_cast<Eigen::Index>(g.nt_index(first));
    pl(x, y) += r.prob;
    if (r.rhs.size() == 1) pu(x, y) += r.prob;
  }
  return ClosureMatrices{closure(pl, "left-corner"), closure(pu, "unit-production")};
}

EarleyParser::EarleyParser(const Pcfg& g) : g_(&g), closures_(build_closures(g)) {
  const std::size_t n = g.nonterminals().size();
  left_corner_.resize(n);
  unit_parents_.resize(n);
  for (std::size_t z = 0; z < n; ++z)
    for (std::size_t y = 0; y < n; ++y) {
      double rl = closures_.left_corner(static_cast<Eigen::Index>(z), static_cast<Eigen::Index>(y));
      if (rl > 0.0) left_corner_[z].push_back({y, std::log(rl)});
      double ru = closures_.unit(static_cast<Eigen::Index>(z), static_cast<Eigen::Index>(y));
      if (ru > 0.0) unit_parents_[y].push_back({z, std::log(ru)});
    }
  nonunit_rule_.resize(g.rules().size() + 1, true);
  for (std::size_t i = 0; i < g.rules().size(); ++i) nonunit_rule_[i] = !g.is_unit(g.rules()[i]);
}

std::size_t EarleyParser::rhs_size(std::uint32_t rule) const {
  return rule == root_rule() ? 1 : g_->rules()[rule].rhs.size();
}

SymbolId EarleyParser::rhs_at(std::uint32_t rule, std::uint32_t dot) const {
  return rule == root_rule() ? g_->start() : g_->rules()[rule].rhs[dot];
}

PrefixChart EarleyParser::parse(std::span<const std::string> tokens) const {
  const Pcfg& g = *g_;
  const std::size_t n_nt = g.nonterminals().size();
  const std::size_t n = tokens.size();
  std::vector<Column> cols(n + 1);
  // waiting[j][Z]: states of column j with the dot before nonterminal Z
  std::vector<std::vector<std::vector<std::size_t>>> waiting(n + 1);

  PrefixChart chart;
  chart.log_prefix.assign(n + 1, kLogZero);
  chart.log_prefix[0] = 0.0;
  cols[0].add(root_rule(), 0, 0, 0.0, 0.0);

  auto next_symbol = [&](const EarleyState& s) -> std::optional<SymbolId> {
    if (s.dot >= rhs_size(s.rule)) return std::nullopt;
    return rhs_at(s.rule, s.dot);
  };

  auto predict = [&](std::size_t i) {
    Column& col = cols[i];
    std::vector<double> a(n_nt, kLogZero);
    for (const EarleyState& s : col.states) {
      if (s.dot == 0 && s.rule != root_rule()) continue;  // predicted states are covered by R_L
      auto sym = next_symbol(s);
      if (!sym || g.is_terminal(*sym)) continue;
      std::size_t z = g.nt_index(*sym);
      a[z] = log_add(a[z], s.forward);
    }
    std::vector<double> b(n_nt, kLogZero);
    for (std::size_t z = 0; z < n_nt; ++z) {
      if (a[z] == kLogZero) continue;
      for (const Weighted& w : left_corner_[z]) b[w.nt] = log_add(b[w.nt], a[z] + w.log_weight);
    }
    for (std::size_t y = 0; y < n_nt; ++y) {
      if (b[y] == kLogZero) continue;
      for (std::size_t r : g.rules_for(g.nonterminals()[y])) {
        double lp = std::log(g.rules()[r].prob);
        col.add(static_cast<std::uint32_t>(r), 0, static_cast<std::uint32_t>(i), b[y] + lp, lp);
      }
    }
    auto& wait = waiting[i];
    wait.assign(n_nt, {});
    for (std::size_t k = 0; k < col.states.size(); ++k) {
      auto sym = next_symbol(col.states[k]);
      if (sym && !g.is_terminal(*sym)) wait[g.nt_index(*sym)].push_back(k);
    }
  };

  auto complete = [&](std::size_t i) {
    Column& col = cols[i];
    // Completed states are final once every state of larger origin has been
    // processed: a non-unit completion strictly decreases the origin.
    std::priority_queue<std::pair<std::uint32_t, std::size_t>> heap;
    std::vector<bool> queued;
    auto enqueue = [&](std::size_t k) {
      if (queued.size() <= k) queued.resize(col.states.size(), false);
      const EarleyState& s = col.states[k];
      if (queued[k] || s.dot != rhs_size(s.rule) || s.rule == root_rule()) return;
      queued[k] = true;
      heap.emplace(s.origin, k);
    };
    for (std::size_t k = 0; k < col.states.size(); ++k) enqueue(k);
    while (!heap.empty()) {
      auto [j, k] = heap.top();
      heap.pop();
      const EarleyState done = col.states[k];
      if (!nonunit_rule_[done.rule]) continue;  // unit chains enter through R_U
      std::size_t y = g.nt_index(g.rules()[done.rule].lhs);
      for (const Weighted& zu : unit_parents_[y]) {
        for (std::size_t wk : waiting[j][zu.nt]) {
          const EarleyState x = cols[j].states[wk];
          auto [slot, fresh] = col.add(x.rule, x.dot + 1, x.origin, x.forward + zu.log_weight + done.inner,
                                       x.inner + zu.log_weight + done.inner);
          if (fresh) enqueue(slot);
        }
      }
    }
  };

  predict(0);
  for (std::size_t i = 1; i <= n; ++i) {
    auto term = g.find(tokens[i - 1], SymbolKind::Terminal);
    if (term) {
      double prefix = kLogZero;
      for (const EarleyState& s : cols[i - 1].states) {
        if (next_symbol(s) != term) continue;
        cols[i].add(s.rule, s.dot + 1, s.origin, s.forward, s.inner);
        prefix = log_add(prefix, s.forward);
      }
      chart.log_prefix[i] = prefix;
    }
    if (cols[i].states.empty()) break;
    complete(i);
    predict(i);
  }

  chart.log_complete = kLogZero;
  if (auto it = cols[n].index.find(StateKey{root_rule(), 1, 0}); it != cols[n].index.end())
    chart.log_complete = cols[n].states[it->second].inner;
  chart.columns.reserve(n + 1);
  for (Column& c : cols) chart.columns.push_back(std::move(c.states));
  return chart;
}

double EarleyParser::prefix_probability(std::span<const std::string> tokens) const {
  return std::exp(parse(tokens).log_prefix.back());
}

SentenceSurprisal EarleyParser::word_surprisals(std::span<const std::string> tokens) const {
  PrefixChart c = parse(tokens);
  return surprisals_from_prefixes(c.log_prefix, c.log_complete);
}

double prefix_probability(const Pcfg& g, std::span<const std::string> tokens) {
  return EarleyParser(g).prefix_probability(tokens);
}

SentenceSurprisal word_surprisals(const Pcfg& g, std::span<const std::string> tokens) {
  return EarleyParser(g).word_surprisals(tokens);
}

SentenceSurprisal surprisals_from_prefixes(std::span<const double> log_prefix, double log_complete) {
  SentenceSurprisal out;
  for (std::size_t i = 1; i < log_prefix.size(); ++i) out.bits.push_back(surprisal_bits(log_prefix[i], log_prefix[i - 1]));
  out.eos = surprisal_bits(log_complete, log_prefix.back());
  return out;
}

}  // namespace synstate
