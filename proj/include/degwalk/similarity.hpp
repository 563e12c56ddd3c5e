#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "degwalk/embedding.hpp"
#include "degwalk/error.hpp"
#include "degwalk/matrix.hpp"

namespace degwalk {

inline double cosine_similarity(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) throw InputError("cosine: dimension mismatch");
  const double nu = std::sqrt(dot(u, u));
  const double nv = std::sqrt(dot(v, v));
  if (nu == 0.0 || nv == 0.0) throw InputError("cosine: zero vector");
  return dot(u, v) / (nu * nv);
}

struct Neighbor {
  NodeId node;
  double score;
};

// Most cosine-similar other row among `candidates` (all rows when empty).
// Ties go to the lowest id.
inline Neighbor most_similar(const EmbeddingMatrix& emb, NodeId node, std::span<const NodeId> candidates = {}) {
  Neighbor best{node, -2.0};
  auto consider = [&](NodeId j) {
    if (j == node) return;
    const double s = cosine_similarity(emb.row(node), emb.row(j));
    if (s > best.score || (s == best.score && j < best.node)) best = {j, s};
  };
  if (candidates.empty()) {
    if (emb.rows < 2) throw InputError("most_similar needs at least two rows");
    for (NodeId j = 0; j < emb.rows; ++j) consider(j);
  } else {
    for (NodeId j : candidates) consider(j);
  }
  return best;
}

}  // namespace degwalk
