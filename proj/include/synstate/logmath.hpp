#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

namespace synstate {

inline constexpr double kLogZero = -std::numeric_limits<double>::infinity();
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();
inline constexpr double kLn2 = 0.69314718055994530942;

inline double log_add(double a, double b) {
  if (a == kLogZero) return b;
  if (b == kLogZero) return a;
  if (a < b) std::swap(a, b);
  return a + std::log1p(std::exp(b - a));
}

inline double log_sum_exp(std::span<const double> xs) {
  double hi = kLogZero;
  for (double x : xs) hi = std::max(hi, x);
  if (hi == kLogZero) return kLogZero;
  double acc = 0.0;
  for (double x : xs) acc += std::exp(x - hi);
  return hi + std::log(acc);
}

// Surprisal in bits of a natural-log conditional probability.
inline double nats_to_bits(double log_prob) {
  if (log_prob == kLogZero) return kInfinity;
  double bits = -log_prob / kLn2;
  // rounding can push a probability-one event a hair below zero bits
  return bits <= 0.0 && bits > -1e-12 ? 0.0 : bits;
}

// -log2(exp(num) / exp(den)); infinite when the numerator vanishes.
inline double surprisal_bits(double log_num, double log_den) {
  if (log_num == kLogZero) return kInfinity;
  return nats_to_bits(log_num - log_den);
}

}  // namespace synstate
