#include "synstate/experiment.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

#include "synstate/error.hpp"

namespace synstate {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\v' || c == '\f'; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.emplace_back(trim(s.substr(start, i - start)));
      start = i + 1;
    }
  }
  return out;
}

bool is_name(std::string_view s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
  });
}

template <typename T>
std::string join(const std::vector<T>& xs, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += sep;
    out += xs[i];
  }
  return out;
}

// Line-oriented reader that keeps 1-based positions for error reporting.
class ItemFileParser {
 public:
  explicit ItemFileParser(std::string_view text) : text_(text) {}

  Experiment run() {
    Experiment e;
    bool saw_name = false;
    bool saw_factors = false;
    bool saw_regions = false;
    Item* current = nullptr;

    std::size_t pos = 0;
    while (pos <= text_.size()) {
      std::size_t nl = text_.find('\n', pos);
      if (nl == std::string_view::npos) nl = text_.size();
      std::string_view line = text_.substr(pos, nl - pos);
      ++line_no_;
      pos = nl + 1;
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

      std::string_view body = trim(line);
      if (body.empty() || body.front() == '#') {
        if (nl == text_.size()) break;
        continue;
      }
      std::size_t indent = static_cast<std::size_t>(body.data() - line.data());

      if (body.front() == '[') {
        if (current == nullptr) fail("condition line before any 'item' line", indent + 1);
        parse_condition_line(e, *current, line);
      } else if (starts_with_keyword(body, "item")) {
        if (!saw_name || !saw_factors || !saw_regions)
          fail("item block before the 'experiment:', 'factors:' and 'regions:' headers", indent + 1);
        std::string_view num = trim(body.substr(4));
        int id = 0;
        try {
          std::size_t used = 0;
          id = std::stoi(std::string(num), &used);
          if (used != num.size()) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
          fail("expected integer item id", indent + 6);
        }
        for (const Item& it : e.items)
          if (it.id == id) fail("duplicate item id " + std::to_string(id), indent + 6);
        e.items.push_back(Item{id, {}});
        current = &e.items.back();
      } else if (auto v = header_value(body, "experiment")) {
        if (current) fail("header after items", indent + 1);
        if (!is_name(*v)) fail("experiment name must be a non-empty name", indent + 12);
        e.name = std::string(*v);
        saw_name = true;
      } else if (auto v = header_value(body, "factors")) {
        if (current) fail("header after items", indent + 1);
        parse_factors(e, *v, indent + 9);
        saw_factors = true;
      } else if (auto v = header_value(body, "regions")) {
        if (current) fail("header after items", indent + 1);
        for (std::string& r : split(*v, ',')) {
          if (!is_name(r)) fail("bad region name '" + r + "'", indent + 9);
          if (std::find(e.region_names.begin(), e.region_names.end(), r) != e.region_names.end())
            fail("duplicate region name '" + r + "'", indent + 9);
          e.region_names.push_back(std::move(r));
        }
        saw_regions = true;
      } else if (auto v = header_value(body, "effects")) {
        if (current) fail("header after items", indent + 1);
        if (!trim(*v).empty())
          for (std::string& name : split(*v, ',')) {
            if (!is_name(name)) fail("bad effect name '" + name + "'", indent + 9);
            e.builtin_effects.push_back(std::move(name));
          }
      } else {
        fail("unrecognized line", indent + 1);
      }
      if (nl == text_.size()) break;
    }
    if (!saw_name || !saw_factors || !saw_regions)
      throw ParseError("missing 'experiment:', 'factors:' or 'regions:' header", line_no_, 1);

    auto violations = validate_experiment(e);
    if (!violations.empty()) throw ValidationError(violations.front());
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what, std::size_t column) const {
    throw ParseError(what, line_no_, column);
  }

  static bool starts_with_keyword(std::string_view body, std::string_view kw) {
    return body.size() > kw.size() && body.substr(0, kw.size()) == kw && is_space(body[kw.size()]);
  }

  static std::optional<std::string_view> header_value(std::string_view body, std::string_view key) {
    if (body.size() <= key.size() || body.substr(0, key.size()) != key || body[key.size()] != ':')
      return std::nullopt;
    return trim(body.substr(key.size() + 1));
  }

  void parse_factors(Experiment& e, std::string_view spec, std::size_t column) {
    std::istringstream in{std::string(spec)};
    std::string part;
    bool any = false;
    while (in >> part) {
      any = true;
      auto eq = part.find('=');
      if (eq == std::string::npos) fail("factor spec must look like name=level|level", column);
      Factor f{part.substr(0, eq), split(std::string_view(part).substr(eq + 1), '|')};
      if (!is_name(f.name)) fail("bad factor name '" + f.name + "'", column);
      if (e.factor_index(f.name)) fail("duplicate factor '" + f.name + "'", column);
      std::set<std::string> seen;
      for (const std::string& l : f.levels) {
        if (!is_name(l)) fail("bad level name '" + l + "' in factor " + f.name, column);
        if (!seen.insert(l).second) fail("duplicate level '" + l + "' in factor " + f.name, column);
      }
      e.factors.push_back(std::move(f));
    }
    if (!any) fail("empty factor list", column);
  }

  void parse_condition_line(const Experiment& e, Item& item, std::string_view line) {
    std::size_t i = line.find('[');
    std::size_t close = line.find(']', i);
    if (close == std::string_view::npos) fail("unterminated condition label", i + 1);
    Condition cond{split(line.substr(i + 1, close - i - 1), ',')};
    if (cond.levels.size() != e.factors.size())
      fail("condition has " + std::to_string(cond.levels.size()) + " levels, experiment has " +
               std::to_string(e.factors.size()) + " factors",
           i + 1);
    for (std::size_t f = 0; f < cond.levels.size(); ++f) {
      const auto& lv = e.factors[f].levels;
      if (std::find(lv.begin(), lv.end(), cond.levels[f]) == lv.end())
        fail("undeclared level '" + cond.levels[f] + "' for factor " + e.factors[f].name, i + 2);
    }
    if (item.sentences.count(cond))
      fail("duplicate condition " + cond.label() + " in item " + std::to_string(item.id), i + 1);

    RegionedSentence s;
    std::optional<std::pair<std::string, std::size_t>> open;  // name, first token
    std::size_t open_column = 0;
    std::size_t p = close + 1;
    while (p < line.size()) {
      char c = line[p];
      if (is_space(c)) {
        ++p;
        continue;
      }
      if (c == '{') {
        if (open) fail("overlapping regions: '{' inside region '" + open->first + "'", p + 1);
        std::size_t colon = line.find(':', p);
        std::size_t stop = p + 1;
        while (stop < line.size() && !is_space(line[stop]) && line[stop] != ':' && line[stop] != '}' &&
               line[stop] != '{')
          ++stop;
        if (colon == std::string_view::npos || colon != stop) fail("expected '{region:'", p + 1);
        std::string name(line.substr(p + 1, colon - p - 1));
        if (name.empty()) fail("empty region name", p + 1);
        if (std::find(e.region_names.begin(), e.region_names.end(), name) == e.region_names.end())
          fail("undeclared region '" + name + "'", p + 2);
        if (s.regions.count(name)) fail("region '" + name + "' is not contiguous", p + 1);
        open = std::make_pair(name, s.tokens.size());
        open_column = p + 1;
        p = colon + 1;
      } else if (c == '}') {
        if (!open) fail("'}' without an open region", p + 1);
        if (s.tokens.size() == open->second) fail("empty region '" + open->first + "'", p + 1);
        s.regions.emplace(open->first, TokenRange{open->second, s.tokens.size()});
        open.reset();
        ++p;
      } else {
        std::size_t stop = p;
        while (stop < line.size() && !is_space(line[stop]) && line[stop] != '{' && line[stop] != '}') ++stop;
        s.tokens.emplace_back(line.substr(p, stop - p));
        p = stop;
      }
    }
    if (open) fail("unterminated region '" + open->first + "'", open_column);
    if (s.tokens.empty()) fail("sentence has no tokens", close + 2);
    item.sentences.emplace(std::move(cond), std::move(s));
  }

  std::string_view text_;
  std::size_t line_no_ = 0;
};

void collect_crossing(const std::vector<Factor>& factors, std::size_t f, std::vector<std::string>& prefix,
                      std::vector<Condition>& out) {
  if (f == factors.size()) {
    out.push_back(Condition{prefix});
    return;
  }
  for (const std::string& level : factors[f].levels) {
    prefix.push_back(level);
    collect_crossing(factors, f + 1, prefix, out);
    prefix.pop_back();
  }
}

}  // namespace

std::optional<std::string> RegionedSentence::region_of(std::size_t i) const {
  for (const auto& [name, range] : regions)
    if (range.contains(i)) return name;
  return std::nullopt;
}

std::string RegionedSentence::text() const { return join(tokens, " "); }

std::string Condition::label() const { return "[" + join(levels, ",") + "]"; }

std::vector<Condition> Experiment::conditions() const {
  std::vector<Condition> out;
  if (factors.empty()) return out;
  std::vector<std::string> prefix;
  collect_crossing(factors, 0, prefix, out);
  return out;
}

std::optional<std::size_t> Experiment::factor_index(std::string_view factor) const {
  for (std::size_t i = 0; i < factors.size(); ++i)
    if (factors[i].name == factor) return i;
  return std::nullopt;
}

const Item* Experiment::find_item(int id) const {
  for (const Item& it : items)
    if (it.id == id) return &it;
  return nullptr;
}

bool is_valid_token(std::string_view token) {
  return !token.empty() && std::none_of(token.begin(), token.end(), is_space);
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) out.push_back(std::move(cur));
    cur.clear();
  };
  for (char c : text) {
    if (is_space(c)) {
      flush();
    } else if (c == ',' || c == '.') {
      flush();
      out.emplace_back(1, c);
    } else {
      cur.push_back(c);
    }
  }
  flush();
  return out;
}

Experiment parse_item_file(std::string_view text) { return ItemFileParser(text).run(); }

std::string serialize_item_file(const Experiment& e) {
  std::string out;
  out += "experiment: " + e.name + "\n";
  for (const Factor& f : e.factors) out += "factors: " + f.name + "=" + join(f.levels, "|") + "\n";
  out += "regions: " + join(e.region_names, ",") + "\n";
  if (!e.builtin_effects.empty()) out += "effects: " + join(e.builtin_effects, ",") + "\n";
  for (const Item& item : e.items) {
    out += "\nitem " + std::to_string(item.id) + "\n";
    // conditions in declared crossing order, then anything off-grid
    std::vector<const std::pair<const Condition, RegionedSentence>*> order;
    for (const Condition& c : e.conditions())
      if (auto it = item.sentences.find(c); it != item.sentences.end()) order.push_back(&*it);
    for (const auto& kv : item.sentences)
      if (std::find(order.begin(), order.end(), &kv) == order.end()) order.push_back(&kv);

    for (const auto* kv : order) {
      const RegionedSentence& s = kv->second;
      std::vector<std::string> opens(s.tokens.size() + 1), closes(s.tokens.size() + 1);
      for (const auto& [name, r] : s.regions) {
        if (r.begin < opens.size()) opens[r.begin] = name;
        if (r.end < closes.size()) closes[r.end] = name;
      }
      out += kv->first.label();
      for (std::size_t i = 0; i < s.tokens.size(); ++i) {
        out += ' ';
        if (!opens[i].empty()) out += "{" + opens[i] + ": ";
        out += s.tokens[i];
        if (!closes[i + 1].empty()) out += '}';
      }
      out += '\n';
    }
  }
  return out;
}

std::vector<std::string> validate_experiment(const Experiment& e) {
  std::vector<std::string> v;
  if (!is_name(e.name)) v.push_back("experiment name '" + e.name + "' is not a valid name");
  if (e.factors.empty()) v.push_back("experiment declares no factors");
  {
    std::set<std::string> names;
    for (const Factor& f : e.factors) {
      if (!names.insert(f.name).second) v.push_back("duplicate factor '" + f.name + "'");
      if (f.levels.empty()) v.push_back("factor '" + f.name + "' has no levels");
      std::set<std::string> levels(f.levels.begin(), f.levels.end());
      if (levels.size() != f.levels.size()) v.push_back("factor '" + f.name + "' repeats a level");
    }
  }
  std::set<std::string> declared(e.region_names.begin(), e.region_names.end());
  if (declared.size() != e.region_names.size()) v.push_back("duplicate region name in experiment header");

  const std::vector<Condition> crossing = e.conditions();
  std::set<int> ids;
  for (const Item& item : e.items) {
    const std::string where = "item " + std::to_string(item.id);
    if (!ids.insert(item.id).second) v.push_back(where + ": duplicate item id");
    for (const Condition& c : crossing)
      if (!item.sentences.count(c)) v.push_back(where + ": missing condition " + c.label());
    for (const auto& [cond, s] : item.sentences) {
      const std::string at = where + " " + cond.label();
      if (std::find(crossing.begin(), crossing.end(), cond) == crossing.end())
        v.push_back(at + ": condition is not in the factorial crossing");
      if (s.tokens.empty()) v.push_back(at + ": empty sentence");
      for (std::size_t t = 0; t < s.tokens.size(); ++t)
        if (!is_valid_token(s.tokens[t])) v.push_back(at + ": invalid token at index " + std::to_string(t));
      std::vector<const std::string*> owner(s.tokens.size(), nullptr);
      for (const auto& [name, r] : s.regions) {
        if (!declared.count(name)) v.push_back(at + ": undeclared region '" + name + "'");
        if (r.begin >= r.end || r.end > s.tokens.size()) {
          v.push_back(at + ": region '" + name + "' is empty or out of bounds");
          continue;
        }
        for (std::size_t t = r.begin; t < r.end; ++t) {
          if (owner[t]) {
            v.push_back(at + ": regions '" + *owner[t] + "' and '" + name + "' overlap");
            break;
          }
          owner[t] = &name;
        }
        if (name == kEndRegion && r.end != s.tokens.size())
          v.push_back(at + ": region 'end' must cover the final token");
      }
    }
  }
  return v;
}

const Experiment& builtin_suite(std::string_view name) {
  for (const Experiment& e : builtin_suites())
    if (e.name == name) return e;
  throw ConfigError("no built-in suite named '" + std::string(name) + "'");
}

}  // namespace synstate
