#include "synstate/ngram.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "synstate/error.hpp"
#include "synstate/logmath.hpp"

namespace synstate {

namespace {

std::string join(std::span<const std::string> toks) {
  std::string out;
  for (const std::string& t : toks) {
    if (!out.empty()) out += ' ';
    out += t;
  }
  return out;
}

void check_params(int order, double discount, double unk_floor) {
  if (order < 1 || order > 5) throw ValidationError("n-gram order must be between 1 and 5");
  if (!(discount > 0.0 && discount < 1.0)) throw ValidationError("discount must lie strictly between 0 and 1");
  if (!(unk_floor >= 0.0) || !std::isfinite(unk_floor)) throw ValidationError("unk floor must be nonnegative");
}

}  // namespace

void NGramModel::add(std::span<const std::string> context, const std::string& word, std::uint64_t count) {
  ContextStats& s = levels_[context.size()][join(context)];
  s.total += count;
  s.next[word] += count;
}

NGramModel NGramModel::train(std::span<const std::vector<std::string>> corpus, int order, double discount,
                             double unk_floor) {
  if (corpus.empty()) throw ValidationError("cannot train an n-gram model on an empty corpus");
  check_params(order, discount, unk_floor);
  NGramModel m;
  m.order_ = order;
  m.discount_ = discount;
  m.unk_floor_ = unk_floor;
  m.levels_.resize(static_cast<std::size_t>(order));
  const auto history = static_cast<std::size_t>(order - 1);
  for (const auto& sentence : corpus) {
    std::vector<std::string> padded(history, std::string(kBos));
    for (const std::string& w : sentence) {
      if (w == kBos || w == kEos || w == kUnk) throw ValidationError("corpus contains reserved token '" + w + "'");
      padded.push_back(w);
    }
    padded.emplace_back(kEos);
    for (std::size_t j = history; j < padded.size(); ++j)
      for (std::size_t k = 0; k <= history; ++k)
        m.add(std::span<const std::string>(padded).subspan(j - k, k), padded[j], 1);
  }
  return m;
}

bool NGramModel::in_vocabulary(std::string_view w) const {
  const auto& unigrams = levels_[0].at("").next;
  return w != kUnk && unigrams.count(std::string(w)) > 0;
}

std::vector<std::string> NGramModel::prediction_types() const {
  std::vector<std::string> out;
  for (const auto& [w, c] : levels_[0].at("").next) out.push_back(w);
  if (!levels_[0].at("").next.count(std::string(kUnk))) out.emplace_back(kUnk);
  std::sort(out.begin(), out.end());
  return out;
}

std::string NGramModel::normalize(std::string_view w) const {
  if (w == kBos || w == kEos || in_vocabulary(w)) return std::string(w);
  return std::string(kUnk);
}

double NGramModel::prob(const std::string& word, std::span<const std::string> context) const {
  const ContextStats& uni = levels_[0].at("");
  double p = word == kUnk ? unk_floor_ : 0.0;
  if (auto it = uni.next.find(word); it != uni.next.end()) p += static_cast<double>(it->second);
  p /= static_cast<double>(uni.total) + unk_floor_;
  for (std::size_t k = 1; k < levels_.size() && k <= context.size(); ++k) {
    auto it = levels_[k].find(join(context.subspan(context.size() - k)));
    if (it == levels_[k].end()) break;  // longer contexts are unseen as well
    const ContextStats& s = it->second;
    double total = static_cast<double>(s.total);
    double c = 0.0;
    if (auto w = s.next.find(word); w != s.next.end()) c = static_cast<double>(w->second);
    p = std::max(c - discount_, 0.0) / total + discount_ * static_cast<double>(s.next.size()) / total * p;
  }
  return p;
}

double NGramModel::log_prob(std::string_view word, std::span<const std::string> context) const {
  std::vector<std::string> ctx;
  std::size_t keep = std::min(context.size(), static_cast<std::size_t>(order_ - 1));
  for (std::size_t i = context.size() - keep; i < context.size(); ++i) ctx.push_back(normalize(context[i]));
  return std::log(prob(normalize(word), ctx));
}

SentenceSurprisal NGramModel::surprisals(std::span<const std::string> sentence) const {
  std::vector<std::string> padded(static_cast<std::size_t>(order_ - 1), std::string(kBos));
  for (const std::string& w : sentence) padded.push_back(normalize(w));
  padded.emplace_back(kEos);
  SentenceSurprisal out;
  const auto history = static_cast<std::size_t>(order_ - 1);
  for (std::size_t j = history; j < padded.size(); ++j) {
    double bits = nats_to_bits(std::log(prob(padded[j], std::span<const std::string>(padded).subspan(j - history, history))));
    if (j + 1 < padded.size())
      out.bits.push_back(bits);
    else
      out.eos = bits;
  }
  return out;
}

std::string NGramModel::save() const {
  char buf[64];
  std::string out = "order\t" + std::to_string(order_) + "\n";
  std::snprintf(buf, sizeof buf, "%.17g", discount_);
  out += "discount\t" + std::string(buf) + "\n";
  std::snprintf(buf, sizeof buf, "%.17g", unk_floor_);
  out += "unk_floor\t" + std::string(buf) + "\n";
  std::vector<std::string> lines;
  for (std::size_t k = 0; k < levels_.size(); ++k)
    for (const auto& [ctx, stats] : levels_[k])
      for (const auto& [w, c] : stats.next) {
        std::string line = std::to_string(k + 1);
        std::istringstream in(ctx);
        std::string tok;
        while (in >> tok) line += "\t" + tok;
        line += "\t" + w + "\t" + std::to_string(c);
        lines.push_back(std::move(line));
      }
  std::sort(lines.begin(), lines.end());
  for (const std::string& l : lines) out += l + "\n";
  return out;
}

NGramModel NGramModel::load(std::string_view text) {
  NGramModel m;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  auto header = [&](const char* key) {
    ++line_no;
    if (!std::getline(in, line)) throw ParseError(std::string("missing '") + key + "' header", line_no, 1);
    auto tab = line.find('\t');
    if (tab == std::string::npos || line.substr(0, tab) != key)
      throw ParseError(std::string("expected '") + key + "' header", line_no, 1);
    try {
      return std::stod(line.substr(tab + 1));
    } catch (const std::exception&) {
      throw ParseError(std::string("bad value for '") + key + "'", line_no, tab + 2);
    }
  };
  double order = header("order");
  m.discount_ = header("discount");
  m.unk_floor_ = header("unk_floor");
  if (order != std::floor(order)) throw ParseError("order must be an integer", 1, 7);
  m.order_ = static_cast<int>(order);
  try {
    check_params(m.order_, m.discount_, m.unk_floor_);
  } catch (const ValidationError& e) {
    throw ParseError(e.what(), 1, 1);
  }
  m.levels_.resize(static_cast<std::size_t>(m.order_));
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (;;) {
      auto tab = line.find('\t', start);
      fields.push_back(line.substr(start, tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    std::size_t k = 0;
    std::uint64_t count = 0;
    try {
      k = std::stoul(fields.front());
      count = std::stoull(fields.back());
    } catch (const std::exception&) {
      throw ParseError("malformed n-gram line", line_no, 1);
    }
    if (k < 1 || k > m.levels_.size() || fields.size() != k + 2 || count == 0)
      throw ParseError("malformed n-gram line", line_no, 1);
    std::vector<std::string> ctx(fields.begin() + 1, fields.begin() + static_cast<std::ptrdiff_t>(k));
    m.add(ctx, fields[k], count);
  }
  if (!m.levels_[0].count("")) throw ParseError("model has no unigram counts", line_no, 1);
  return m;
}

NGramModel train_ngram(std::span<const std::vector<std::string>> corpus, int order, double discount) {
  return NGramModel::train(corpus, order, discount);
}

SentenceSurprisal ngram_surprisals(const NGramModel& m, std::span<const std::string> sentence) {
  return m.surprisals(sentence);
}

}  // namespace synstate
