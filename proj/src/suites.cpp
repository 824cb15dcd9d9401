// Built-in factorial suites. Items are authored on the templates of the
// classic subordination, NP/Z and MV/RR designs; each builder derives all
// conditions of an item from one row so that the manipulated tokens are the
// only difference between conditions.

#include <array>
#include <string>
#include <vector>

#include "synstate/error.hpp"
#include "synstate/experiment.hpp"
#include "synstate/suite_lexicon.hpp"

namespace synstate {

namespace {

class SentenceBuilder {
 public:
  SentenceBuilder& add(const std::vector<std::string>& toks) {
    s_.tokens.insert(s_.tokens.end(), toks.begin(), toks.end());
    return *this;
  }
  SentenceBuilder& add(const std::string& tok) {
    s_.tokens.push_back(tok);
    return *this;
  }
  SentenceBuilder& region(const std::string& name, const std::vector<std::string>& toks) {
    std::size_t begin = s_.tokens.size();
    add(toks);
    s_.regions[name] = TokenRange{begin, s_.tokens.size()};
    return *this;
  }
  RegionedSentence finish() {
    region(std::string(kEndRegion), {"."});
    return std::move(s_);
  }

 private:
  RegionedSentence s_;
};

using Words = std::vector<std::string>;

Words cat(std::initializer_list<Words> parts) {
  Words out;
  for (const Words& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

// --- subordination ---------------------------------------------------------

Words subject_modifier(const std::string& kind, int item) {
  const auto& m = subject_modifier_words(item);
  if (kind == "pp") return {m.prep, "the", m.noun};
  if (kind == "src") return {"that", m.verb, "the", m.noun};
  if (kind == "orc") return {"that", "the", m.noun, m.verb};
  return {};
}

Words object_modifier(const std::string& kind, int item) {
  const auto& m = object_modifier_words(item);
  if (kind == "pp") return {m.prep, "the", m.noun};
  if (kind == "src") return {"that", m.verb, "the", m.noun};
  if (kind == "orc") return {"that", "the", m.noun, m.verb};
  return {};
}

RegionedSentence subordination_sentence(const SubordinationRow& r, int item, bool sub, bool matrix,
                                        const std::string& subjmod, const std::string& objmod) {
  Words clause = cat({{sub ? "the" : "The", r.subject},
                      subject_modifier(subjmod, item),
                      {r.verb, "the", r.object},
                      object_modifier(objmod, item)});
  if (sub) clause.insert(clause.begin(), r.subordinator);
  SentenceBuilder b;
  b.region("subclause", clause);
  if (matrix) b.add(",").region("matrix", {"the", r.matrix_subject, r.matrix_verb, r.matrix_prep, "the", r.matrix_object});
  return b.finish();
}

Experiment make_subordination() {
  Experiment e;
  e.name = "subordination";
  e.factors = {{"subordinator", {"sub", "nosub"}}, {"continuation", {"matrix", "nomatrix"}}};
  e.region_names = {"subclause", "matrix", "end"};
  e.builtin_effects = {"licensing", "penalty", "interaction"};
  const auto& rows = subordination_rows();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    Item item{static_cast<int>(i + 1), {}};
    for (bool sub : {true, false})
      for (bool matrix : {true, false})
        item.sentences[Condition{{sub ? "sub" : "nosub", matrix ? "matrix" : "nomatrix"}}] =
            subordination_sentence(rows[i], item.id, sub, matrix, "none", "none");
    e.items.push_back(std::move(item));
  }
  return e;
}

Experiment make_subordination_modifiers() {
  Experiment e;
  e.name = "subordination-modifiers";
  const Words mods = {"none", "pp", "src", "orc"};
  e.factors = {{"subordinator", {"sub", "nosub"}},
               {"continuation", {"matrix", "nomatrix"}},
               {"subjmod", mods},
               {"objmod", mods}};
  e.region_names = {"subclause", "matrix", "end"};
  e.builtin_effects = {"licensing", "penalty", "interaction"};
  const auto& rows = subordination_rows();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    Item item{static_cast<int>(i + 1), {}};
    for (bool sub : {true, false})
      for (bool matrix : {true, false})
        for (const std::string& sm : mods)
          for (const std::string& om : mods)
            item.sentences[Condition{{sub ? "sub" : "nosub", matrix ? "matrix" : "nomatrix", sm, om}}] =
                subordination_sentence(rows[i], item.id, sub, matrix, sm, om);
    e.items.push_back(std::move(item));
  }
  return e;
}

// --- NP/Z ------------------------------------------------------------------

Experiment make_npz_transitivity() {
  Experiment e;
  e.name = "npz-transitivity";
  e.factors = {{"transitivity", {"transitive", "intransitive"}}, {"comma", {"nocomma", "comma"}}};
  e.region_names = {"subclause", "ambiguous", "disambiguator", "end"};
  e.builtin_effects = {"garden_path", "transitivity_interaction"};
  const auto& rows = npz_transitivity_rows();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const NpzRow& r = rows[i];
    Item item{static_cast<int>(i + 1), {}};
    for (bool transitive : {true, false})
      for (bool comma : {false, true}) {
        SentenceBuilder b;
        b.region("subclause", {r.subordinator, "the", r.subject, transitive ? r.transitive_verb : r.intransitive_verb});
        if (comma) b.add(",");
        b.region("ambiguous", cat({{"the", r.object}, r.modifier}));
        b.region("disambiguator", r.disambiguator);
        b.add({"the", r.final_object});
        item.sentences[Condition{{transitive ? "transitive" : "intransitive", comma ? "comma" : "nocomma"}}] =
            b.finish();
      }
    e.items.push_back(std::move(item));
  }
  return e;
}

Experiment make_npz_length() {
  Experiment e;
  e.name = "npz-length";
  e.factors = {{"length", {"short", "long"}}, {"comma", {"nocomma", "comma"}}};
  e.region_names = {"subclause", "ambiguous", "disambiguator", "end"};
  e.builtin_effects = {"garden_path", "length_interaction"};
  const auto& rows = npz_length_rows();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const DiggingInRow& r = rows[i];
    const Words tail = {r.name, r.prep, r.adjective, r.noun};
    Item item{static_cast<int>(i + 1), {}};
    for (bool is_short : {true, false})
      for (bool comma : {false, true}) {
        SentenceBuilder b;
        if (is_short) {
          b.region("subclause", cat({{r.subordinator, "the", r.subject, r.subject_participle}, tail, {r.verb}}));
          if (comma) b.add(",");
          b.region("ambiguous", {"the", r.object});
        } else {
          b.region("subclause", {r.subordinator, "the", r.subject, r.verb});
          if (comma) b.add(",");
          b.region("ambiguous", cat({{"the", r.object, r.object_participle}, tail}));
        }
        b.region("disambiguator", {r.final_verb});
        item.sentences[Condition{{is_short ? "short" : "long", comma ? "comma" : "nocomma"}}] = b.finish();
      }
    e.items.push_back(std::move(item));
  }
  return e;
}

// --- MV/RR -----------------------------------------------------------------

Experiment make_mvrr() {
  Experiment e;
  e.name = "mvrr";
  e.factors = {{"reduction", {"reduced", "unreduced"}}, {"ambiguity", {"ambig", "unambig"}}};
  e.region_names = {"verb", "ambiguous", "disambiguator", "end"};
  e.builtin_effects = {"garden_path", "ambiguity_interaction"};
  const auto& rows = mvrr_rows();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const MvrrRow& r = rows[i];
    Item item{static_cast<int>(i + 1), {}};
    for (bool reduced : {true, false})
      for (bool ambig : {true, false}) {
        SentenceBuilder b;
        b.add({"The", r.subject});
        if (!reduced) b.add(Words{"who", "was"});
        b.region("verb", {ambig ? r.ambiguous_verb : r.unambiguous_verb});
        b.region("ambiguous", {"the", r.object, r.prep, "the", r.prep_object});
        b.region("disambiguator", {r.disambiguator});
        b.add({r.final_prep, "the", r.final_object});
        item.sentences[Condition{{reduced ? "reduced" : "unreduced", ambig ? "ambig" : "unambig"}}] = b.finish();
      }
    e.items.push_back(std::move(item));
  }
  return e;
}

}  // namespace

const std::vector<Experiment>& builtin_suites() {
  static const std::vector<Experiment> suites = [] {
    std::vector<Experiment> v{make_subordination(), make_subordination_modifiers(), make_npz_transitivity(),
                              make_npz_length(), make_mvrr()};
    for (const Experiment& e : v) {
      auto problems = validate_experiment(e);
      if (!problems.empty()) throw ValidationError("built-in suite " + e.name + ": " + problems.front());
    }
    return v;
  }();
  return suites;
}

}  // namespace synstate
