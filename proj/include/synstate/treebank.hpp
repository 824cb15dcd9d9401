#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "synstate/pcfg.hpp"

namespace synstate {

// A node with no children is a leaf and its label is the terminal word.
struct TreebankTree {
  std::string label;
  std::vector<TreebankTree> children;

  bool is_leaf() const { return children.empty(); }
  friend bool operator==(const TreebankTree&, const TreebankTree&) = default;
};

// Exactly one bracketed tree, e.g. "(S (NP the dog) (VP barked))".
TreebankTree parse_bracketed_tree(std::string_view text);

// Any number of bracketed trees separated by whitespace.
std::vector<TreebankTree> parse_treebank(std::string_view text);

std::string to_string(const TreebankTree& t);

// Relative-frequency estimate. Empty elements (-NONE-) are deleted, an
// unlabeled outer bracket is dropped, and a TOP root is added when the trees
// disagree on their root label. Words seen fewer than unk_threshold times
// are replaced by their unknown class before counting.
Pcfg estimate_pcfg(const std::vector<TreebankTree>& trees, int unk_threshold,
                   UnkPolicy policy = UnkPolicy::SignatureUnk);

}  // namespace synstate
