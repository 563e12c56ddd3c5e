#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "degwalk/rng.hpp"

namespace degwalk {

// Walker/Vose alias method over a categorical distribution: O(n) build from
// unnormalized non-negative weights, O(1) draw.
//
// Tables are written into caller-owned slices so that many small
// distributions can share one flat buffer.
inline void build_alias(std::span<const double> weights, std::span<double> prob, std::span<std::uint32_t> alias) {
  const std::size_t n = weights.size();
  double total = 0.0;
  for (double w : weights) total += w;

  std::vector<std::uint32_t> small, large;
  small.reserve(n);
  large.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    prob[i] = weights[i] * static_cast<double>(n) / total;
    alias[i] = static_cast<std::uint32_t>(i);
    (prob[i] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(i));
  }
  while (!small.empty() && !large.empty()) {
    const auto s = small.back();
    small.pop_back();
    const auto l = large.back();
    alias[s] = l;
    prob[l] -= 1.0 - prob[s];
    if (prob[l] < 1.0) {
      large.pop_back();
      small.push_back(l);
    }
  }
  // Leftovers are 1 up to rounding.
  for (auto i : large) prob[i] = 1.0;
  for (auto i : small) prob[i] = 1.0;
}

inline std::size_t draw_alias(std::span<const double> prob, std::span<const std::uint32_t> alias, Rng& rng) {
  const auto i = static_cast<std::size_t>(rng.below(prob.size()));
  return rng.uniform() < prob[i] ? i : alias[i];
}

// Probability mass each outcome receives from a built table.
inline std::vector<double> alias_distribution(std::span<const double> prob, std::span<const std::uint32_t> alias) {
  const std::size_t n = prob.size();
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] += prob[i] / static_cast<double>(n);
    out[alias[i]] += (1.0 - prob[i]) / static_cast<double>(n);
  }
  return out;
}

// Single owned table.
class AliasTable {
 public:
  AliasTable() = default;
  explicit AliasTable(std::span<const double> weights) : prob_(weights.size()), alias_(weights.size()) {
    build_alias(weights, prob_, alias_);
  }

  std::size_t size() const noexcept { return prob_.size(); }
  std::size_t operator()(Rng& rng) const { return draw_alias(prob_, alias_, rng); }
  std::vector<double> distribution() const { return alias_distribution(prob_, alias_); }

 private:
  std::vector<double> prob_;
  std::vector<std::uint32_t> alias_;
};

}  // namespace degwalk
