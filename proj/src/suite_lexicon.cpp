#include "synstate/suite_lexicon.hpp"

namespace synstate {

const std::vector<SubordinationRow>& subordination_rows() {
  static const std::vector<SubordinationRow> rows = {
      {"As", "doctor", "studied", "textbook", "nurse", "walked", "into", "office"},
      {"When", "chef", "tasted", "soup", "waiter", "hurried", "to", "kitchen"},
      {"While", "pilot", "checked", "engine", "passengers", "waited", "in", "lounge"},
      {"As", "farmer", "fed", "horses", "children", "played", "in", "barn"},
      {"When", "lawyer", "read", "letter", "clerk", "stood", "by", "door"},
      {"While", "student", "wrote", "essay", "teacher", "sat", "at", "desk"},
      {"As", "painter", "mixed", "colors", "model", "rested", "on", "couch"},
      {"When", "captain", "raised", "flag", "sailors", "cheered", "from", "deck"},
      {"While", "girl", "watched", "movie", "boy", "slept", "on", "sofa"},
      {"As", "mechanic", "fixed", "car", "customer", "waited", "in", "office"},
      {"When", "reporter", "asked", "question", "senator", "smiled", "at", "crowd"},
      {"While", "nurse", "cleaned", "wound", "patient", "stared", "at", "ceiling"},
      {"As", "singer", "practiced", "song", "pianist", "sat", "by", "window"},
      {"When", "gardener", "trimmed", "hedge", "dog", "barked", "at", "neighbor"},
      {"While", "baker", "kneaded", "dough", "customers", "gathered", "at", "counter"},
      {"As", "professor", "graded", "exams", "assistant", "walked", "to", "library"},
      {"When", "manager", "signed", "contract", "workers", "returned", "to", "factory"},
      {"While", "driver", "loaded", "truck", "guard", "stood", "at", "gate"},
      {"As", "tourist", "photographed", "statue", "guide", "waited", "near", "fountain"},
      {"When", "judge", "reviewed", "evidence", "jury", "returned", "to", "courtroom"},
      {"While", "scientist", "examined", "sample", "intern", "ran", "to", "lab"},
      {"As", "soldier", "cleaned", "rifle", "sergeant", "marched", "across", "yard"},
      {"When", "librarian", "sorted", "books", "janitor", "swept", "behind", "shelves"},
  };
  return rows;
}

namespace {

const std::vector<ModifierWords>& subject_modifiers() {
  static const std::vector<ModifierWords> m = {
      {"from", "admired", "city"},   {"with", "called", "umbrella"}, {"near", "visited", "window"},
      {"in", "trusted", "hallway"},  {"beside", "helped", "station"}, {"behind", "thanked", "fence"},
      {"at", "followed", "hospital"},
  };
  return m;
}

const std::vector<ModifierWords>& object_modifiers() {
  static const std::vector<ModifierWords> m = {
      {"about", "recommended", "history"}, {"on", "mentioned", "shelf"},   {"from", "ordered", "store"},
      {"under", "needed", "table"},        {"with", "described", "cover"}, {"for", "borrowed", "class"},
      {"near", "praised", "door"},         {"in", "wanted", "box"},        {"by", "loved", "author"},
      {"beside", "chose", "lamp"},         {"of", "found", "museum"},
  };
  return m;
}

}  // namespace

const ModifierWords& subject_modifier_words(int item) {
  const auto& m = subject_modifiers();
  return m[static_cast<std::size_t>(item) % m.size()];
}

const ModifierWords& object_modifier_words(int item) {
  const auto& m = object_modifiers();
  return m[static_cast<std::size_t>(item) % m.size()];
}

const std::vector<NpzRow>& npz_transitivity_rows() {
  static const std::vector<NpzRow> rows = {
      {"When", "dog", "scratched", "struggled", "vet", {"with", "his", "new", "assistant"}, {"took", "off"}, "muzzle"},
      {"While", "boy", "washed", "yawned", "car", {"with", "the", "red", "stripes"}, {"lost"}, "mirror"},
      {"As", "girl", "painted", "laughed", "fence", {"near", "the", "old", "barn"}, {"blocked"}, "road"},
      {"When", "man", "hunted", "slept", "deer", {"in", "the", "dark", "forest"}, {"watched"}, "river"},
      {"While", "chef", "cooked", "paused", "fish", {"from", "the", "local", "market"}, {"filled"}, "kitchen"},
      {"As", "nurse", "dressed", "hesitated", "patient", {"with", "the", "broken", "arm"}, {"grabbed"}, "blanket"},
      {"When", "pilot", "flew", "waited", "plane", {"with", "the", "new", "engine"}, {"hit"}, "tower"},
      {"While", "farmer", "plowed", "rested", "field", {"near", "the", "old", "river"}, {"flooded"}, "road"},
      {"As", "teacher", "taught", "paused", "class", {"with", "the", "new", "students"}, {"opened"}, "door"},
      {"When", "thief", "robbed", "fled", "bank", {"on", "the", "busy", "street"}, {"closed"}, "door"},
      {"While", "mother", "bathed", "sneezed", "baby", {"in", "the", "small", "tub"}, {"splashed"}, "water"},
      {"As", "writer", "edited", "wavered", "story", {"about", "the", "old", "sailor"}, {"won"}, "prize"},
      {"When", "hunter", "shot", "coughed", "bear", {"near", "the", "frozen", "lake"}, {"attacked"}, "camp"},
      {"While", "student", "studied", "daydreamed", "map", {"of", "the", "ancient", "city"}, {"fell", "off"}, "desk"},
      {"As", "waiter", "served", "stumbled", "guests", {"at", "the", "long", "table"}, {"knocked", "over"}, "glass"},
      {"When", "sailor", "steered", "shouted", "ship", {"with", "the", "torn", "sails"}, {"struck"}, "rock"},
      {"While", "doctor", "examined", "sighed", "child", {"with", "the", "high", "fever"}, {"picked", "up"}, "toy"},
      {"As", "crowd", "watched", "cheered", "players", {"in", "the", "red", "shirts"}, {"left"}, "field"},
      {"When", "driver", "parked", "waited", "truck", {"with", "the", "heavy", "load"}, {"blocked"}, "gate"},
      {"While", "artist", "sketched", "relaxed", "model", {"in", "the", "blue", "dress"}, {"adjusted"}, "lamp"},
      {"As", "coach", "trained", "shouted", "team", {"with", "the", "new", "uniforms"}, {"won"}, "match"},
      {"When", "baker", "baked", "whistled", "bread", {"in", "the", "stone", "oven"}, {"burned"}, "crust"},
      {"While", "guard", "searched", "dozed", "prisoner", {"with", "the", "long", "beard"}, {"stole"}, "key"},
      {"As", "mechanic", "repaired", "grumbled", "truck", {"with", "the", "flat", "tire"}, {"rolled", "down"}, "hill"},
      {"When", "kids", "chased", "giggled", "ball", {"on", "the", "steep", "hill"}, {"hit"}, "fence"},
      {"While", "maid", "dusted", "hummed", "shelf", {"with", "the", "old", "books"}, {"covered"}, "crack"},
      {"As", "soldiers", "attacked", "retreated", "fort", {"on", "the", "high", "cliff"}, {"fired"}, "cannon"},
      {"When", "man", "called", "hesitated", "girl", {"with", "the", "long", "hair"}, {"turned", "on"}, "radio"},
      {"While", "parents", "visited", "relaxed", "school", {"with", "the", "new", "gym"}, {"hosted"}, "fair"},
      {"As", "priest", "blessed", "prayed", "couple", {"at", "the", "old", "church"}, {"lit"}, "candle"},
      {"When", "scientist", "tested", "blinked", "robot", {"with", "the", "metal", "arms"}, {"lifted"}, "box"},
      {"While", "actor", "rehearsed", "slept", "scene", {"with", "the", "angry", "king"}, {"amazed"}, "audience"},
  };
  return rows;
}

const std::vector<DiggingInRow>& npz_length_rows() {
  static const std::vector<DiggingInRow> rows = {
      {"As", "author", "studying", "wrote", "book", "describing", "Babylon", "in", "ancient", "times", "grew"},
      {"While", "historian", "researching", "taught", "course", "covering", "Rome", "in", "imperial", "times", "ended"},
      {"As", "director", "filming", "edited", "movie", "showing", "Paris", "in", "rainy", "weather", "improved"},
      {"When", "professor", "examining", "presented", "lecture", "discussing", "Egypt", "in", "early", "history", "expanded"},
      {"While", "journalist", "investigating", "reported", "story", "exposing", "Chicago", "in", "recent", "years", "spread"},
      {"As", "artist", "painting", "sketched", "mural", "depicting", "Venice", "in", "golden", "light", "faded"},
      {"When", "scholar", "translating", "published", "paper", "analyzing", "Athens", "in", "classical", "times", "succeeded"},
      {"While", "student", "visiting", "photographed", "exhibit", "featuring", "Tokyo", "in", "modern", "times", "opened"},
      {"As", "poet", "describing", "recited", "poem", "praising", "London", "in", "foggy", "weather", "continued"},
      {"When", "architect", "admiring", "designed", "tower", "resembling", "Dubai", "in", "desert", "heat", "collapsed"},
      {"While", "composer", "honoring", "performed", "symphony", "celebrating", "Vienna", "in", "happier", "days", "began"},
      {"As", "novelist", "imagining", "revised", "novel", "portraying", "Moscow", "in", "bitter", "winter", "sold"},
      {"When", "teacher", "explaining", "read", "chapter", "describing", "Troy", "in", "ancient", "myth", "ended"},
      {"While", "guide", "touring", "narrated", "film", "showing", "Cairo", "in", "busy", "seasons", "played"},
      {"As", "critic", "reviewing", "praised", "play", "depicting", "Madrid", "in", "troubled", "times", "closed"},
      {"When", "engineer", "mapping", "planned", "bridge", "crossing", "Boston", "in", "harsh", "winters", "failed"},
      {"While", "blogger", "exploring", "wrote", "post", "comparing", "Berlin", "in", "divided", "times", "spread"},
      {"As", "singer", "remembering", "recorded", "album", "evoking", "Havana", "in", "lively", "nights", "flopped"},
      {"When", "reporter", "covering", "filmed", "documentary", "showing", "Baghdad", "in", "troubled", "times", "aired"},
      {"While", "researcher", "surveying", "analyzed", "report", "studying", "Lagos", "in", "rapid", "growth", "changed"},
      {"As", "painter", "visiting", "finished", "portrait", "showing", "Florence", "in", "spring", "sunshine", "cracked"},
      {"When", "author", "recalling", "dictated", "memoir", "describing", "Dublin", "in", "hungry", "years", "sold"},
      {"While", "tourist", "exploring", "filmed", "video", "showing", "Lisbon", "in", "summer", "heat", "circulated"},
      {"As", "lecturer", "discussing", "prepared", "talk", "covering", "Sparta", "in", "ancient", "wars", "improved"},
      {"When", "curator", "studying", "arranged", "exhibit", "presenting", "Kyoto", "in", "autumn", "colors", "opened"},
      {"While", "playwright", "picturing", "staged", "drama", "depicting", "Rome", "in", "final", "days", "succeeded"},
      {"As", "scientist", "modeling", "simulated", "flood", "threatening", "Houston", "in", "stormy", "seasons", "spread"},
      {"When", "pianist", "visiting", "played", "concerto", "honoring", "Prague", "in", "cold", "winters", "ended"},
      {"While", "chef", "recalling", "cooked", "dish", "evoking", "Naples", "in", "warm", "evenings", "cooled"},
      {"As", "editor", "reviewing", "printed", "article", "criticizing", "Detroit", "in", "recent", "decades", "spread"},
      {"When", "monk", "describing", "copied", "manuscript", "describing", "Jerusalem", "in", "medieval", "times", "survived"},
      {"While", "sailor", "remembering", "sang", "song", "praising", "Marseille", "in", "stormy", "nights", "ended"},
  };
  return rows;
}

const std::vector<MvrrRow>& mvrr_rows() {
  static const std::vector<MvrrRow> rows = {
      {"woman", "brought", "given", "sandwich", "from", "kitchen", "tripped", "on", "carpet"},
      {"man", "sent", "written", "letter", "from", "office", "fell", "on", "stairs"},
      {"boy", "handed", "given", "toy", "from", "shelf", "cried", "in", "car"},
      {"girl", "served", "shown", "dessert", "at", "party", "smiled", "at", "camera"},
      {"patient", "fed", "given", "soup", "in", "hospital", "slept", "in", "chair"},
      {"worker", "paid", "given", "bonus", "at", "factory", "laughed", "at", "joke"},
      {"student", "taught", "shown", "lesson", "at", "school", "yawned", "in", "hallway"},
      {"soldier", "offered", "given", "medal", "at", "ceremony", "stood", "by", "flag"},
      {"child", "read", "sung", "story", "about", "dragon", "giggled", "in", "bed"},
      {"tenant", "mailed", "written", "notice", "about", "rent", "complained", "to", "landlord"},
      {"player", "passed", "thrown", "ball", "near", "fence", "ran", "to", "goal"},
      {"driver", "sold", "given", "car", "with", "dent", "drove", "to", "city"},
      {"traveler", "lent", "given", "money", "for", "trip", "packed", "for", "journey"},
      {"neighbor", "told", "shown", "news", "about", "fire", "panicked", "in", "kitchen"},
      {"chef", "awarded", "given", "prize", "at", "dinner", "cried", "at", "table"},
      {"graduate", "promised", "shown", "job", "at", "bank", "celebrated", "with", "friends"},
      {"girl", "tossed", "thrown", "coin", "in", "fountain", "wished", "for", "luck"},
      {"clerk", "assigned", "given", "task", "for", "day", "worked", "in", "office"},
      {"student", "allowed", "given", "time", "for", "test", "studied", "in", "library"},
      {"bride", "brought", "shown", "flowers", "from", "garden", "blushed", "at", "door"},
      {"customer", "sent", "given", "package", "from", "store", "left", "through", "exit"},
      {"sailor", "handed", "thrown", "rope", "from", "boat", "jumped", "into", "water"},
      {"guest", "served", "given", "coffee", "in", "lobby", "relaxed", "on", "sofa"},
      {"actor", "offered", "shown", "ticket", "for", "show", "hurried", "to", "theater"},
      {"pupil", "taught", "given", "answer", "to", "puzzle", "frowned", "at", "teacher"},
      {"widow", "told", "written", "secret", "about", "house", "shivered", "in", "hallway"},
      {"boy", "passed", "given", "note", "from", "teacher", "laughed", "in", "class"},
      {"veteran", "lent", "shown", "book", "about", "war", "wept", "in", "room"},
      {"family", "sold", "shown", "house", "near", "lake", "moved", "to", "town"},
  };
  return rows;
}

}  // namespace synstate
