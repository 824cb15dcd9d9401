#include "synstate/pcfg.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "synstate/error.hpp"

namespace synstate {

namespace {

constexpr double kNormTolerance = 1e-9;

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() > suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

std::string format_prob(double p) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", p);
  return buf;
}

}  // namespace

std::string_view to_string(UnkPolicy p) {
  switch (p) {
    case UnkPolicy::None: return "none";
    case UnkPolicy::SingleUnk: return "single";
    case UnkPolicy::SignatureUnk: return "signature";
  }
  return "none";
}

UnkPolicy parse_unk_policy(std::string_view s) {
  if (s == "none") return UnkPolicy::None;
  if (s == "single") return UnkPolicy::SingleUnk;
  if (s == "signature") return UnkPolicy::SignatureUnk;
  throw ConfigError("unknown unk policy '" + std::string(s) + "'");
}

std::string unk_signature(std::string_view word) {
  if (!word.empty() && std::all_of(word.begin(), word.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
    return "UNK-NUM";
  std::string sig = "UNK";
  if (!word.empty() && std::isupper(static_cast<unsigned char>(word.front()))) sig += "-CAP";
  if (ends_with(word, "ing")) sig += "-ing";
  else if (ends_with(word, "ed")) sig += "-ed";
  else if (ends_with(word, "ly")) sig += "-ly";
  else if (ends_with(word, "s")) sig += "-s";
  return sig;
}

// --- Pcfg ------------------------------------------------------------------

std::optional<SymbolId> Pcfg::find(std::string_view label, SymbolKind kind) const {
  auto it = by_label_.find(std::make_pair(kind, std::string(label)));
  if (it == by_label_.end()) return std::nullopt;
  return it->second;
}

std::span<const std::size_t> Pcfg::rules_for(SymbolId lhs) const {
  return rules_by_lhs_[static_cast<std::size_t>(lhs)];
}

std::vector<std::string> Pcfg::properness_violations() const {
  std::vector<std::string> out;
  std::vector<bool> seen(symbols_.size(), false);
  std::vector<SymbolId> todo{start_};
  seen[static_cast<std::size_t>(start_)] = true;
  while (!todo.empty()) {
    SymbolId x = todo.back();
    todo.pop_back();
    if (rules_for(x).empty()) out.push_back("nonterminal '" + symbol(x).label + "' is reachable but has no rules");
    for (std::size_t r : rules_for(x))
      for (SymbolId y : rules_[r].rhs)
        if (!is_terminal(y) && !seen[static_cast<std::size_t>(y)]) {
          seen[static_cast<std::size_t>(y)] = true;
          todo.push_back(y);
        }
  }
  return out;
}

// --- PcfgBuilder -----------------------------------------------------------

PcfgBuilder& PcfgBuilder::set_start(std::string label) {
  start_ = std::move(label);
  return *this;
}

PcfgBuilder& PcfgBuilder::set_unk_policy(UnkPolicy p) {
  unk_policy_ = p;
  return *this;
}

PcfgBuilder& PcfgBuilder::add_rule(const std::string& lhs, const std::vector<RhsItem>& rhs, double weight) {
  std::vector<std::string> labels;
  std::vector<std::optional<SymbolKind>> kinds;
  for (const auto& [label, kind] : rhs) {
    labels.push_back(label);
    kinds.emplace_back(kind);
  }
  auto key = std::make_pair(lhs, labels);
  if (auto it = index_.find(key); it != index_.end()) {
    rules_[it->second].weight += weight;
  } else {
    index_.emplace(std::move(key), rules_.size());
    rules_.push_back(PendingRule{lhs, std::move(labels), std::move(kinds), weight});
  }
  return *this;
}

PcfgBuilder& PcfgBuilder::add_rule(const std::string& lhs, const std::vector<std::string>& rhs, double weight) {
  auto key = std::make_pair(lhs, rhs);
  if (auto it = index_.find(key); it != index_.end()) {
    rules_[it->second].weight += weight;
  } else {
    index_.emplace(std::move(key), rules_.size());
    rules_.push_back(PendingRule{lhs, rhs, std::vector<std::optional<SymbolKind>>(rhs.size()), weight});
  }
  return *this;
}

Pcfg PcfgBuilder::build(bool normalize) const {
  if (!start_) throw ValidationError("grammar has no start symbol");
  Pcfg g;
  g.unk_policy_ = unk_policy_;
  auto intern = [&g](const std::string& label, SymbolKind kind) {
    auto key = std::make_pair(kind, label);
    if (auto it = g.by_label_.find(key); it != g.by_label_.end()) return it->second;
    auto id = static_cast<SymbolId>(g.symbols_.size());
    g.symbols_.push_back(Symbol{label, kind});
    g.by_label_.emplace(std::move(key), id);
    return id;
  };

  std::set<std::string> lhs_labels;
  for (const PendingRule& r : rules_) lhs_labels.insert(r.lhs);
  intern(*start_, SymbolKind::Nonterminal);
  for (const PendingRule& r : rules_) intern(r.lhs, SymbolKind::Nonterminal);

  std::map<SymbolId, double> totals;
  for (const PendingRule& r : rules_) {
    if (r.rhs.empty()) throw ValidationError("empty right-hand side for '" + r.lhs + "' (epsilon rules are not supported)");
    if (!(r.weight > 0.0) || !std::isfinite(r.weight))
      throw ValidationError("rule for '" + r.lhs + "' has non-positive or non-finite weight");
    Rule rule{intern(r.lhs, SymbolKind::Nonterminal), {}, r.weight};
    for (std::size_t i = 0; i < r.rhs.size(); ++i) {
      SymbolKind kind = r.kinds[i].value_or(lhs_labels.count(r.rhs[i]) ? SymbolKind::Nonterminal : SymbolKind::Terminal);
      rule.rhs.push_back(intern(r.rhs[i], kind));
    }
    totals[rule.lhs] += r.weight;
    g.rules_.push_back(std::move(rule));
  }

  for (Rule& r : g.rules_) {
    double total = totals[r.lhs];
    if (normalize) {
      r.prob /= total;
    } else if (std::abs(total - 1.0) > kNormTolerance) {
      throw ValidationError("rules for '" + g.symbol(r.lhs).label + "' sum to " + format_prob(total) + ", not 1");
    }
  }

  g.rules_by_lhs_.assign(g.symbols_.size(), {});
  for (std::size_t i = 0; i < g.rules_.size(); ++i)
    g.rules_by_lhs_[static_cast<std::size_t>(g.rules_[i].lhs)].push_back(i);
  g.nt_index_.assign(g.symbols_.size(), static_cast<std::size_t>(-1));
  for (std::size_t i = 0; i < g.symbols_.size(); ++i)
    if (g.symbols_[i].kind == SymbolKind::Nonterminal) {
      g.nt_index_[i] = g.nonterminals_.size();
      g.nonterminals_.push_back(static_cast<SymbolId>(i));
    }
  g.start_ = *g.find(*start_, SymbolKind::Nonterminal);
  return g;
}

// --- grammar files -----------------------------------------------------------

Pcfg parse_grammar(std::string_view text) {
  PcfgBuilder b;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool have_start = false;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    std::string_view body = trim(line);
    if (body.empty() || body.front() == ';') continue;
    auto column = [&](std::string_view at) { return static_cast<std::size_t>(at.data() - line.data()) + 1; };

    if (body.rfind("start:", 0) == 0) {
      std::string_view sym = trim(body.substr(6));
      if (sym.empty()) throw ParseError("missing start symbol", line_no, column(body));
      b.set_start(std::string(sym));
      have_start = true;
      continue;
    }
    if (body.rfind("unk:", 0) == 0) {
      try {
        b.set_unk_policy(parse_unk_policy(trim(body.substr(4))));
      } catch (const ConfigError& e) {
        throw ParseError(e.what(), line_no, column(body));
      }
      continue;
    }

    std::size_t arrow = body.find("->");
    std::size_t hash = body.rfind('#');
    if (arrow == std::string_view::npos) throw ParseError("expected 'LHS -> RHS # prob'", line_no, column(body));
    if (hash == std::string_view::npos || hash < arrow) throw ParseError("missing '# prob'", line_no, column(body));
    std::string lhs(trim(body.substr(0, arrow)));
    if (lhs.empty() || lhs.find_first_of(" \t") != std::string::npos)
      throw ParseError("left-hand side must be a single symbol", line_no, column(body));
    std::vector<std::string> rhs;
    {
      std::istringstream in{std::string(body.substr(arrow + 2, hash - arrow - 2))};
      std::string sym;
      while (in >> sym) rhs.push_back(sym);
    }
    if (rhs.empty()) throw ParseError("empty right-hand side (epsilon rules are not supported)", line_no, column(body.substr(arrow)));
    std::string_view prob_text = trim(body.substr(hash + 1));
    double prob = 0.0;
    try {
      std::size_t used = 0;
      prob = std::stod(std::string(prob_text), &used);
      if (used != prob_text.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ParseError("bad probability '" + std::string(prob_text) + "'", line_no, column(body.substr(hash)));
    }
    if (!(prob > 0.0 && prob <= 1.0)) throw ParseError("probability must be in (0,1]", line_no, column(body.substr(hash)));
    b.add_rule(lhs, rhs, prob);
  }
  if (!have_start) throw ParseError("missing 'start:' header", 0, 0);
  return b.build(false);
}

Pcfg load_grammar(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open grammar file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_grammar(ss.str());
}

std::string write_grammar(const Pcfg& g) {
  std::vector<std::pair<std::string, std::string>> lines;
  for (const Rule& r : g.rules()) {
    std::string rhs;
    for (SymbolId s : r.rhs) rhs += " " + g.symbol(s).label;
    lines.emplace_back(g.symbol(r.lhs).label + " ->" + rhs, format_prob(r.prob));
  }
  std::sort(lines.begin(), lines.end());
  std::string out = "start: " + g.symbol(g.start()).label + "\n";
  if (g.unk_policy() != UnkPolicy::None) out += "unk: " + std::string(to_string(g.unk_policy())) + "\n";
  for (const auto& [rule, prob] : lines) out += rule + " # " + prob + "\n";
  return out;
}

std::vector<std::string> map_unknowns(const Pcfg& g, std::span<const std::string> tokens) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const std::string& t : tokens) {
    if (g.in_lexicon(t)) {
      out.push_back(t);
      continue;
    }
    switch (g.unk_policy()) {
      case UnkPolicy::None:
        throw OutOfVocabularyError(t);
      case UnkPolicy::SingleUnk:
        out.emplace_back(kSingleUnk);
        break;
      case UnkPolicy::SignatureUnk: {
        if (t.rfind(kSingleUnk, 0) == 0) {
          out.push_back(t);  // already an unknown-word class
          break;
        }
        std::string sig = unk_signature(t);
        if (!g.in_lexicon(sig) && g.in_lexicon(kSingleUnk)) sig = std::string(kSingleUnk);
        out.push_back(std::move(sig));
        break;
      }
    }
  }
  return out;
}

}  // namespace synstate
