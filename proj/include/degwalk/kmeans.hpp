#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "degwalk/error.hpp"
#include "degwalk/matrix.hpp"
#include "degwalk/rng.hpp"

namespace degwalk {

struct KMeansResult {
  std::vector<std::uint32_t> assignments;
  Dense centroids;
  std::vector<double> inertia;  // after each Lloyd iteration
  std::size_t iterations = 0;
};

// k-means++ seeding followed by Lloyd iterations until the assignment stops
// changing or max_iter is reached. Distance ties go to the lower cluster.
inline KMeansResult kmeans(const Dense& points, std::size_t k, std::uint64_t seed, std::size_t max_iter = 300) {
  const std::size_t n = points.rows, d = points.cols;
  if (k < 1) throw InputError("k must be >= 1");
  if (k > n) throw InputError("k exceeds number of points");

  Rng rng(Rng::stream(seed, 0x6b6d));
  KMeansResult out;
  out.centroids = Dense(k, d);
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());

  auto set_centroid = [&](std::size_t c, std::size_t p) {
    auto dst = out.centroids.row(c);
    auto src = points.row(p);
    std::copy(src.begin(), src.end(), dst.begin());
    for (std::size_t i = 0; i < n; ++i) nearest[i] = std::min(nearest[i], squared_distance(points.row(i), dst));
  };
  set_centroid(0, static_cast<std::size_t>(rng.below(n)));
  for (std::size_t c = 1; c < k; ++c) {
    double total = 0.0;
    for (double v : nearest) total += v;
    std::size_t pick = 0;
    if (total > 0.0) {
      double r = rng.uniform() * total;
      pick = n - 1;
      for (std::size_t i = 0; i < n; ++i) {
        if (r < nearest[i]) {
          pick = i;
          break;
        }
        r -= nearest[i];
      }
      // Never re-pick an existing centroid when distinct points remain.
      while (nearest[pick] == 0.0) pick = (pick + 1) % n;
    } else {
      pick = static_cast<std::size_t>(rng.below(n));
    }
    set_centroid(c, pick);
  }

  out.assignments.assign(n, std::numeric_limits<std::uint32_t>::max());
  std::vector<std::size_t> counts(k);
  for (std::size_t iter = 0; iter < max_iter; ++iter) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      std::uint32_t best = 0;
      double best_d = squared_distance(points.row(i), out.centroids.row(0));
      for (std::size_t c = 1; c < k; ++c) {
        const double dd = squared_distance(points.row(i), out.centroids.row(c));
        if (dd < best_d) {
          best_d = dd;
          best = static_cast<std::uint32_t>(c);
        }
      }
      if (best != out.assignments[i]) {
        out.assignments[i] = best;
        changed = true;
      }
    }
    if (!changed) break;
    ++out.iterations;

    // Empty clusters keep their previous centroid.
    Dense sums(k, d);
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      auto s = sums.row(out.assignments[i]);
      auto p = points.row(i);
      for (std::size_t j = 0; j < d; ++j) s[j] += p[j];
      ++counts[out.assignments[i]];
    }
    for (std::size_t c = 0; c < k; ++c)
      if (counts[c] > 0)
        for (std::size_t j = 0; j < d; ++j) out.centroids(c, j) = sums(c, j) / static_cast<double>(counts[c]);

    double inertia = 0.0;
    for (std::size_t i = 0; i < n; ++i) inertia += squared_distance(points.row(i), out.centroids.row(out.assignments[i]));
    out.inertia.push_back(inertia);
  }
  return out;
}

// Number of points whose cluster matches the label under the best
// one-to-one relabeling of clusters (exhaustive over permutations; k <= 8).
inline std::size_t best_permutation_matches(const std::vector<std::uint32_t>& clusters,
                                            const std::vector<std::int32_t>& labels, std::size_t k) {
  std::vector<std::size_t> perm(k);
  for (std::size_t i = 0; i < k; ++i) perm[i] = i;
  std::size_t best = 0;
  do {
    std::size_t hits = 0;
    for (std::size_t i = 0; i < clusters.size(); ++i)
      if (static_cast<std::int64_t>(perm[clusters[i]]) == labels[i]) ++hits;
    best = std::max(best, hits);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace degwalk
