#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "degwalk/embedding.hpp"
#include "degwalk/error.hpp"
#include "degwalk/graph.hpp"
#include "degwalk/kmeans.hpp"
#include "degwalk/logistic.hpp"
#include "degwalk/matrix.hpp"
#include "degwalk/mds.hpp"
#include "degwalk/rng.hpp"

namespace degwalk {

// ---------------------------------------------------------------------------
// Node classification

struct LabeledFeatures {
  Dense x;
  std::vector<std::uint32_t> y;
  std::vector<NodeId> nodes;  // graph node of each row
  std::size_t classes = 0;
};

// Embedding rows of labeled nodes with degree >= 1. Rows of `emb` are graph
// node ids.
inline LabeledFeatures labeled_features(const EmbeddingMatrix& emb, const Graph& g) {
  if (!g.has_labels()) throw InputError("graph has no labels");
  LabeledFeatures out;
  out.classes = g.num_classes();
  std::vector<double> data;
  for (NodeId i = 0; i < g.num_nodes(); ++i) {
    if (g.label(i) == kUnlabeled || g.degree(i) == 0 || i >= emb.rows) continue;
    out.nodes.push_back(i);
    out.y.push_back(static_cast<std::uint32_t>(g.label(i)));
    const auto r = emb.row(i);
    data.insert(data.end(), r.begin(), r.end());
  }
  out.x.rows = out.nodes.size();
  out.x.cols = emb.dim;
  out.x.data = std::move(data);
  return out;
}

struct ClassifyResult {
  double accuracy = 0.0;  // percent
  double c = 0.0;         // chosen inverse regularization
  std::size_t train = 0;
  std::size_t test = 0;
};

// Stratified split: each class contributes round(train_fraction * size)
// members to training, clamped so both sides keep at least one.
inline ClassifyResult classify_nodes(const Dense& x, std::span<const std::uint32_t> y, std::size_t classes,
                                     double train_fraction, std::uint64_t seed,
                                     std::span<const double> grid = kDefaultCGrid) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw InputError("train fraction must be in (0, 1)");
  std::vector<std::size_t> count(classes, 0);
  for (auto c : y) {
    if (c >= classes) throw InputError("label out of range");
    ++count[c];
  }
  std::size_t present = 0;
  for (std::size_t c = 0; c < classes; ++c) {
    if (count[c] == 1) throw InputError("class " + std::to_string(c) + " has fewer than 2 members");
    present += count[c] > 0;
  }
  if (present < 2) throw InputError("need at least 2 classes");

  Rng rng(Rng::stream(seed, 0x73706c));
  std::vector<std::size_t> train, test;
  for (std::size_t c = 0; c < classes; ++c) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < y.size(); ++i)
      if (y[i] == c) members.push_back(i);
    if (members.empty()) continue;
    rng.shuffle(members.begin(), members.end());
    auto k = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(members.size())));
    k = std::clamp<std::size_t>(k, 1, members.size() - 1);
    train.insert(train.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(k));
    test.insert(test.end(), members.begin() + static_cast<std::ptrdiff_t>(k), members.end());
  }
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());
  if (test.empty()) throw InputError("empty test set");

  std::vector<std::uint32_t> ytr, yte;
  for (auto i : train) ytr.push_back(y[i]);
  for (auto i : test) yte.push_back(y[i]);
  const auto fit = fit_logistic_cv(select_rows(x, train), ytr, classes, grid, seed);
  return {100.0 * accuracy(fit.model, select_rows(x, test), yte), fit.c, train.size(), test.size()};
}

inline ClassifyResult classify_nodes(const EmbeddingMatrix& emb, const Graph& g, double train_fraction,
                                     std::uint64_t seed) {
  const auto f = labeled_features(emb, g);
  return classify_nodes(f.x, f.y, f.classes, train_fraction, seed);
}

// ---------------------------------------------------------------------------
// Community recovery (2-D reduction + k-means)

struct CommunityResult {
  std::size_t correct = 0;  // best label permutation
  std::size_t total = 0;
  std::vector<std::uint32_t> clusters;
  Dense coords;
};

inline CommunityResult recover_communities(const EmbeddingMatrix& emb, const Graph& g, std::uint64_t seed) {
  const auto f = labeled_features(emb, g);
  const auto mds = reduce_2d(f.x, seed);
  const auto km = kmeans(mds.coords, f.classes, seed);
  std::vector<std::int32_t> labels(f.y.begin(), f.y.end());
  return {best_permutation_matches(km.assignments, labels, f.classes), f.y.size(), km.assignments, mds.coords};
}

// ---------------------------------------------------------------------------
// Link prediction

enum class EdgeOperator { Hadamard, Average, L1, L2 };

inline std::string to_string(EdgeOperator op) {
  switch (op) {
    case EdgeOperator::Hadamard: return "hadamard";
    case EdgeOperator::Average: return "average";
    case EdgeOperator::L1: return "l1";
    case EdgeOperator::L2: return "l2";
  }
  return "?";
}

inline EdgeOperator parse_edge_operator(const std::string& name) {
  if (name == "hadamard") return EdgeOperator::Hadamard;
  if (name == "average") return EdgeOperator::Average;
  if (name == "l1") return EdgeOperator::L1;
  if (name == "l2") return EdgeOperator::L2;
  throw InputError("unknown edge operator: " + name);
}

inline void edge_features(EdgeOperator op, std::span<const double> u, std::span<const double> v, std::span<double> out) {
  if (u.size() != v.size() || out.size() != u.size()) throw InputError("edge features: dimension mismatch");
  for (std::size_t i = 0; i < u.size(); ++i) {
    switch (op) {
      case EdgeOperator::Hadamard: out[i] = u[i] * v[i]; break;
      case EdgeOperator::Average: out[i] = 0.5 * (u[i] + v[i]); break;
      case EdgeOperator::L1: out[i] = std::abs(u[i] - v[i]); break;
      case EdgeOperator::L2: out[i] = (u[i] - v[i]) * (u[i] - v[i]); break;
    }
  }
}

inline std::vector<double> edge_features(EdgeOperator op, std::span<const double> u, std::span<const double> v) {
  std::vector<double> out(u.size());
  edge_features(op, u, v, out);
  return out;
}

struct LinkSplit {
  Graph train_graph;  // same node ids and tokens as the source graph
  std::vector<Edge> test_pos;
  std::vector<Edge> test_neg;
  std::uint64_t seed = 0;
};

namespace detail {

inline std::uint64_t edge_key(NodeId u, NodeId v) {
  if (u > v) std::swap(u, v);
  return (static_cast<std::uint64_t>(u) << 32) | v;
}

// Uniform node pairs that are not edges of g and not in `taken`.
inline std::vector<Edge> sample_non_edges(const Graph& g, std::size_t count, Rng& rng,
                                          std::unordered_set<std::uint64_t>& taken) {
  const std::size_t n = g.num_nodes();
  const std::size_t pairs = n * (n - 1) / 2;
  if (pairs < g.num_edges() + taken.size() + count) throw InputError("not enough non-edges to sample");
  std::vector<Edge> out;
  while (out.size() < count) {
    auto u = static_cast<NodeId>(rng.below(n));
    auto v = static_cast<NodeId>(rng.below(n));
    if (u == v || g.has_edge(u, v)) continue;
    if (!taken.insert(edge_key(u, v)).second) continue;
    out.push_back(u < v ? Edge{u, v} : Edge{v, u});
  }
  return out;
}

}  // namespace detail

// Holds out round(test_fraction * |E|) edges chosen uniformly at random,
// skipping any removal that would leave an endpoint isolated, plus the same
// number of uniform non-edges.
inline LinkSplit make_link_split(const Graph& g, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 0.5)) throw InputError("test fraction must be in (0, 0.5)");
  const auto want = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(g.num_edges())));
  Rng rng(Rng::stream(seed, 0x6c70));
  auto edges = g.edges();
  rng.shuffle(edges.begin(), edges.end());

  std::vector<std::size_t> deg(g.num_nodes());
  for (NodeId i = 0; i < g.num_nodes(); ++i) deg[i] = g.degree(i);
  LinkSplit split;
  split.seed = seed;
  std::vector<Edge> keep;
  for (const auto& e : edges) {
    if (split.test_pos.size() < want && deg[e.u] > 1 && deg[e.v] > 1) {
      --deg[e.u];
      --deg[e.v];
      split.test_pos.push_back(e);
    } else {
      keep.push_back(e);
    }
  }
  if (split.test_pos.size() < want)
    throw InputError("graph too sparse to hold out " + std::to_string(want) + " edges without isolating nodes");

  std::unordered_set<std::uint64_t> taken;
  split.test_neg = detail::sample_non_edges(g, want, rng, taken);
  split.train_graph = Graph::from_edges(g.num_nodes(), keep, g.tokens());
  if (g.has_labels())
    split.train_graph.set_labels(std::vector<ClassId>(g.labels().begin(), g.labels().end()), g.label_names());
  return split;
}

// Rank-based AUC with average ranks for ties.
inline double roc_auc(std::span<const double> pos, std::span<const double> neg) {
  std::vector<std::pair<double, int>> all;
  for (double s : pos) all.push_back({s, 1});
  for (double s : neg) all.push_back({s, 0});
  std::sort(all.begin(), all.end(), [](auto& a, auto& b) { return a.first < b.first; });
  double rank_sum = 0.0;
  for (std::size_t i = 0; i < all.size();) {
    std::size_t j = i;
    while (j < all.size() && all[j].first == all[i].first) ++j;
    const double avg = 0.5 * static_cast<double>(i + j + 1);  // ranks are 1-based
    for (std::size_t t = i; t < j; ++t)
      if (all[t].second) rank_sum += avg;
    i = j;
  }
  const auto np = static_cast<double>(pos.size()), nn = static_cast<double>(neg.size());
  return (rank_sum - np * (np + 1) / 2.0) / (np * nn);
}

struct LinkResult {
  double accuracy = 0.0;  // percent, threshold 0.5
  double auc = 0.0;
  double c = 0.0;
};

// Binary logistic regression on edge features: train-graph edges against an
// equal number of train-graph non-edges (excluding the held-out pairs);
// scored on the split's test pairs.
inline LinkResult predict_links(const EmbeddingMatrix& emb, const LinkSplit& split, EdgeOperator op,
                                std::uint64_t seed, std::span<const double> grid = kDefaultCGrid) {
  const Graph& g = split.train_graph;
  if (emb.rows < g.num_nodes()) throw InputError("embedding has fewer rows than the graph");
  Rng rng(Rng::stream(seed, 0x6c72));
  std::unordered_set<std::uint64_t> taken;
  for (const auto& e : split.test_pos) taken.insert(detail::edge_key(e.u, e.v));
  for (const auto& e : split.test_neg) taken.insert(detail::edge_key(e.u, e.v));
  const auto pos = g.edges();
  const auto neg = detail::sample_non_edges(g, pos.size(), rng, taken);

  auto featurize = [&](std::span<const Edge> a, std::span<const Edge> b, std::vector<std::uint32_t>& y) {
    Dense x(a.size() + b.size(), emb.dim);
    std::size_t r = 0;
    for (const auto& e : a) {
      edge_features(op, emb.row(e.u), emb.row(e.v), x.row(r++));
      y.push_back(1);
    }
    for (const auto& e : b) {
      edge_features(op, emb.row(e.u), emb.row(e.v), x.row(r++));
      y.push_back(0);
    }
    return x;
  };
  std::vector<std::uint32_t> ytr, yte;
  const Dense xtr = featurize(pos, neg, ytr);
  const Dense xte = featurize(split.test_pos, split.test_neg, yte);
  const auto fit = fit_logistic_cv(xtr, ytr, 2, grid, seed);

  LinkResult out;
  out.c = fit.c;
  std::vector<double> sp, sn;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < xte.rows; ++i) {
    const double p1 = fit.model.predict_proba(xte.row(i))[1];
    hits += (p1 >= 0.5) == (yte[i] == 1);
    (yte[i] == 1 ? sp : sn).push_back(p1);
  }
  out.accuracy = 100.0 * static_cast<double>(hits) / static_cast<double>(xte.rows);
  out.auc = roc_auc(sp, sn);
  return out;
}

}  // namespace degwalk
