#include "synstate/treebank.hpp"

#include <cctype>
#include <map>
#include <optional>
#include <set>

#include "synstate/error.hpp"

namespace synstate {

namespace {

class TreeReader {
 public:
  explicit TreeReader(std::string_view text) : text_(text) {}

  bool at_end() {
    skip_space();
    return pos_ >= text_.size();
  }

  TreebankTree read_tree() {
    skip_space();
    expect('(');
    TreebankTree node;
    skip_space();
    if (peek() != '(' && peek() != ')') node.label = read_atom();
    for (;;) {
      skip_space();
      if (pos_ >= text_.size()) fail("unbalanced brackets: missing ')'");
      char c = text_[pos_];
      if (c == ')') break;
      if (c == '(') {
        node.children.push_back(read_tree());
      } else {
        node.children.push_back(TreebankTree{read_atom(), {}});
      }
    }
    if (node.children.empty()) fail("empty constituent");
    ++pos_;
    ++column_;
    return node;
  }

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, line_, column_); }

 private:
  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  void expect(char c) {
    if (peek() == ')' && c == '(') fail("unbalanced brackets: unexpected ')'");
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
    ++column_;
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      if (text_[pos_] == '\n') {
        ++line_;
        column_ = 1;
      } else {
        ++column_;
      }
      ++pos_;
    }
  }

  std::string read_atom() {
    std::size_t begin = pos_;
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) && text_[pos_] != '(' &&
           text_[pos_] != ')')
      ++pos_;
    column_ += pos_ - begin;
    return std::string(text_.substr(begin, pos_ - begin));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t column_ = 1;
};

// Deletes -NONE- subtrees and any constituent left without children.
std::optional<TreebankTree> strip_empty(const TreebankTree& t) {
  if (t.is_leaf()) return t;
  if (t.label == "-NONE-") return std::nullopt;
  TreebankTree out{t.label, {}};
  for (const TreebankTree& c : t.children)
    if (auto kept = strip_empty(c)) out.children.push_back(std::move(*kept));
  if (out.children.empty()) return std::nullopt;
  return out;
}

void count_words(const TreebankTree& t, std::map<std::string, int>& counts) {
  if (t.is_leaf()) {
    ++counts[t.label];
    return;
  }
  for (const TreebankTree& c : t.children) count_words(c, counts);
}

void add_rules(const TreebankTree& t, const std::set<std::string>& rare, UnkPolicy policy, PcfgBuilder& b) {
  std::vector<PcfgBuilder::RhsItem> rhs;
  for (const TreebankTree& c : t.children) {
    if (!c.is_leaf()) {
      rhs.emplace_back(c.label, SymbolKind::Nonterminal);
      add_rules(c, rare, policy, b);
    } else if (rare.count(c.label)) {
      rhs.emplace_back(policy == UnkPolicy::SingleUnk ? std::string(kSingleUnk) : unk_signature(c.label),
                       SymbolKind::Terminal);
    } else {
      rhs.emplace_back(c.label, SymbolKind::Terminal);
    }
  }
  b.add_rule(t.label, rhs, 1.0);
}

}  // namespace

TreebankTree parse_bracketed_tree(std::string_view text) {
  TreeReader r(text);
  if (r.at_end()) r.fail("empty input");
  TreebankTree t = r.read_tree();
  if (!r.at_end()) r.fail("trailing text after tree");
  return t;
}

std::vector<TreebankTree> parse_treebank(std::string_view text) {
  TreeReader r(text);
  std::vector<TreebankTree> out;
  while (!r.at_end()) out.push_back(r.read_tree());
  return out;
}

std::string to_string(const TreebankTree& t) {
  if (t.is_leaf()) return t.label;
  std::string s = "(" + t.label;
  for (const TreebankTree& c : t.children) s += " " + to_string(c);
  return s + ")";
}

Pcfg estimate_pcfg(const std::vector<TreebankTree>& trees, int unk_threshold, UnkPolicy policy) {
  if (trees.empty()) throw ValidationError("cannot estimate a grammar from an empty treebank");
  std::vector<TreebankTree> clean;
  for (const TreebankTree& t : trees) {
    auto s = strip_empty(t);
    if (!s) continue;
    while (s->label.empty() && s->children.size() == 1 && !s->children.front().is_leaf()) {
      TreebankTree inner = std::move(s->children.front());
      s = std::move(inner);
    }
    if (s->label.empty()) throw ValidationError("tree without a root label: " + to_string(*s));
    clean.push_back(std::move(*s));
  }
  if (clean.empty()) throw ValidationError("every tree in the treebank is empty");

  std::map<std::string, int> counts;
  for (const TreebankTree& t : clean) count_words(t, counts);
  std::set<std::string> rare;
  if (policy != UnkPolicy::None)
    for (const auto& [w, n] : counts)
      if (n < unk_threshold) rare.insert(w);

  bool same_root = true;
  for (const TreebankTree& t : clean) same_root = same_root && t.label == clean.front().label;

  PcfgBuilder b;
  b.set_unk_policy(policy);
  b.set_start(same_root ? clean.front().label : "TOP");
  for (const TreebankTree& t : clean) {
    if (!same_root) b.add_rule("TOP", std::vector<PcfgBuilder::RhsItem>{{t.label, SymbolKind::Nonterminal}}, 1.0);
    add_rules(t, rare, policy, b);
  }
  return b.build(true);
}

}  // namespace synstate
