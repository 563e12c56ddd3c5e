#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <thread>
#include <unordered_map>
#include <variant>
#include <vector>

#include "degwalk/alias.hpp"
#include "degwalk/error.hpp"
#include "degwalk/graph.hpp"
#include "degwalk/rng.hpp"

namespace degwalk {

// Same number of walks from every non-isolated node.
struct FixedWalks {
  std::size_t walks_per_node = 10;
  friend bool operator==(const FixedWalks&, const FixedWalks&) = default;
};

// Walks from node i = walks_per_degree * degree(i).
struct DegreeWalks {
  std::size_t walks_per_degree = 1;
  friend bool operator==(const DegreeWalks&, const DegreeWalks&) = default;
};

using WalkStrategy = std::variant<FixedWalks, DegreeWalks>;

inline void validate(const WalkStrategy& s) {
  std::visit(
      [](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, FixedWalks>) {
          if (v.walks_per_node < 1) throw InputError("walks per node must be >= 1");
        } else {
          if (v.walks_per_degree < 1) throw InputError("walks per degree must be >= 1");
        }
      },
      s);
}

// "fixed" / "degree"
inline std::string strategy_name(const WalkStrategy& s) {
  return std::holds_alternative<FixedWalks>(s) ? "fixed" : "degree";
}

// The per-node or per-degree multiplier.
inline std::size_t strategy_multiplier(const WalkStrategy& s) {
  return std::visit(
      [](const auto& v) -> std::size_t {
        if constexpr (std::is_same_v<std::decay_t<decltype(v)>, FixedWalks>)
          return v.walks_per_node;
        else
          return v.walks_per_degree;
      },
      s);
}

// "fixed-20", "degree-3"
inline std::string strategy_label(const WalkStrategy& s) {
  return strategy_name(s) + "-" + std::to_string(strategy_multiplier(s));
}

inline std::size_t walk_count(const WalkStrategy& s, std::size_t degree) {
  if (const auto* f = std::get_if<FixedWalks>(&s)) return degree >= 1 ? f->walks_per_node : 0;
  return std::get<DegreeWalks>(s).walks_per_degree * degree;
}

inline std::size_t total_walk_count(const WalkStrategy& s, const Graph& g) {
  std::size_t total = 0;
  for (NodeId i = 0; i < g.num_nodes(); ++i) total += walk_count(s, g.degree(i));
  return total;
}

enum class SamplerKind {
  Alias,      // precomputed table per directed edge
  Rejection,  // no tables; uniform proposal + acceptance test
};

struct WalkConfig {
  WalkStrategy strategy = DegreeWalks{1};
  std::size_t walk_length = 30;  // steps; a walk holds walk_length + 1 nodes
  double p = 1.0;
  double q = 1.0;
  std::uint64_t seed = 1;
  SamplerKind sampler = SamplerKind::Alias;
  std::size_t threads = 1;  // 0 = hardware concurrency; output does not depend on it

  void validate() const {
    degwalk::validate(strategy);
    if (walk_length < 1) throw InputError("walk length must be >= 1");
    if (!(p > 0.0) || !std::isfinite(p)) throw InputError("p must be positive");
    if (!(q > 0.0) || !std::isfinite(q)) throw InputError("q must be positive");
  }
};

// Second-order node2vec transition law. For a walk that arrived at v from t,
// neighbor x of v has unnormalized weight 1/p if x == t, 1 if x is adjacent
// to t, and 1/q otherwise.
class TransitionModel {
 public:
  TransitionModel(const Graph& g, double p, double q, SamplerKind kind = SamplerKind::Alias)
      : graph_(&g), p_(p), q_(q), kind_(kind) {
    if (!(p > 0.0) || !(q > 0.0)) throw InputError("p and q must be positive");
    if (kind_ == SamplerKind::Rejection) return;

    // One table per directed edge t->v, sized degree(v).
    const auto offs = g.offsets();
    const std::size_t slots = g.degree_sum();
    table_offsets_.resize(slots + 1, 0);
    for (NodeId t = 0; t < g.num_nodes(); ++t)
      for (std::size_t s = offs[t]; s < offs[t + 1]; ++s) {
        const NodeId v = g.neighbors(t)[s - offs[t]];
        table_offsets_[s + 1] = table_offsets_[s] + g.degree(v);
      }
    prob_.resize(table_offsets_.back());
    alias_.resize(table_offsets_.back());

    std::vector<double> weights;
    for (NodeId t = 0; t < g.num_nodes(); ++t)
      for (std::size_t s = offs[t]; s < offs[t + 1]; ++s) {
        const NodeId v = g.neighbors(t)[s - offs[t]];
        weights.clear();
        for (NodeId x : g.neighbors(v)) weights.push_back(weight(t, x));
        build_alias(weights, table_prob(s), table_alias(s));
      }
  }

  const Graph& graph() const noexcept { return *graph_; }
  double p() const noexcept { return p_; }
  double q() const noexcept { return q_; }
  SamplerKind kind() const noexcept { return kind_; }

  // Unnormalized weight of stepping to x given the walk came from prev.
  double weight(NodeId prev, NodeId x) const noexcept {
    if (x == prev) return 1.0 / p_;
    if (graph_->has_edge(prev, x)) return 1.0;
    return 1.0 / q_;
  }

  // Next-step distribution over neighbors(current) encoded by the sampler.
  // For alias tables this is read back from the table itself.
  std::vector<double> distribution(NodeId prev, NodeId current) const {
    if (kind_ == SamplerKind::Alias) {
      const auto s = graph_->edge_slot(prev, current);
      return alias_distribution(table_prob(s), table_alias(s));
    }
    std::vector<double> w;
    double total = 0.0;
    for (NodeId x : graph_->neighbors(current)) total += w.emplace_back(weight(prev, x));
    for (double& x : w) x /= total;
    return w;
  }

  // Draw the next node. prev must be a neighbor of current.
  NodeId next(NodeId prev, NodeId current, Rng& rng) const {
    const auto nbrs = graph_->neighbors(current);
    if (kind_ == SamplerKind::Alias) {
      const auto s = graph_->edge_slot(prev, current);
      return nbrs[draw_alias(table_prob(s), table_alias(s), rng)];
    }
    const double max_w = std::max({1.0 / p_, 1.0, 1.0 / q_});
    for (;;) {
      const NodeId x = nbrs[rng.below(nbrs.size())];
      if (rng.uniform() * max_w < weight(prev, x)) return x;
    }
  }

  // First step: uniform over neighbors.
  NodeId first(NodeId start, Rng& rng) const {
    const auto nbrs = graph_->neighbors(start);
    return nbrs[rng.below(nbrs.size())];
  }

  std::size_t table_entries() const noexcept { return prob_.size(); }

 private:
  std::span<double> table_prob(std::size_t s) {
    return {prob_.data() + table_offsets_[s], table_offsets_[s + 1] - table_offsets_[s]};
  }
  std::span<std::uint32_t> table_alias(std::size_t s) {
    return {alias_.data() + table_offsets_[s], table_offsets_[s + 1] - table_offsets_[s]};
  }
  std::span<const double> table_prob(std::size_t s) const {
    return {prob_.data() + table_offsets_[s], table_offsets_[s + 1] - table_offsets_[s]};
  }
  std::span<const std::uint32_t> table_alias(std::size_t s) const {
    return {alias_.data() + table_offsets_[s], table_offsets_[s + 1] - table_offsets_[s]};
  }

  const Graph* graph_;
  double p_;
  double q_;
  SamplerKind kind_;
  std::vector<std::size_t> table_offsets_;
  std::vector<double> prob_;
  std::vector<std::uint32_t> alias_;
};

inline TransitionModel build_transition_model(const Graph& g, double p, double q,
                                              SamplerKind kind = SamplerKind::Alias) {
  return TransitionModel(g, p, q, kind);
}

// Writes up to out.size() nodes (start + out.size()-1 steps) and returns the
// number written; fewer only at a dead end.
inline std::size_t generate_walk_into(const TransitionModel& model, NodeId start, std::span<NodeId> out, Rng& rng) {
  const Graph& g = model.graph();
  if (out.empty()) return 0;
  out[0] = start;
  if (out.size() == 1) return 1;
  if (g.degree(start) == 0) throw InputError("cannot walk from isolated node " + g.token(start));
  out[1] = model.first(start, rng);
  std::size_t n = 2;
  for (; n < out.size(); ++n) {
    if (g.degree(out[n - 1]) == 0) break;
    out[n] = model.next(out[n - 2], out[n - 1], rng);
  }
  return n;
}

inline std::vector<NodeId> generate_walk(const TransitionModel& model, NodeId start, std::size_t walk_length,
                                         Rng& rng) {
  std::vector<NodeId> walk(walk_length + 1);
  walk.resize(generate_walk_into(model, start, walk, rng));
  return walk;
}

// Flat storage of equal-capacity walks.
struct WalkCorpus {
  std::size_t stride = 0;  // walk_length + 1
  std::vector<NodeId> nodes;
  std::vector<std::uint32_t> lengths;
  WalkConfig config;

  std::size_t size() const noexcept { return lengths.size(); }
  bool empty() const noexcept { return lengths.empty(); }
  std::span<const NodeId> walk(std::size_t i) const noexcept { return {nodes.data() + i * stride, lengths[i]}; }
  std::size_t token_count() const noexcept {
    std::size_t n = 0;
    for (auto l : lengths) n += l;
    return n;
  }

  void push_back(std::span<const NodeId> w) {
    if (w.size() > stride) {
      // Grow the stride; only used when assembling corpora read from text.
      std::vector<NodeId> grown(size() * w.size());
      for (std::size_t i = 0; i < size(); ++i) std::copy_n(nodes.data() + i * stride, lengths[i], grown.data() + i * w.size());
      nodes = std::move(grown);
      stride = w.size();
    }
    nodes.resize((size() + 1) * stride);
    std::copy(w.begin(), w.end(), nodes.data() + size() * stride);
    lengths.push_back(static_cast<std::uint32_t>(w.size()));
  }
};

// Start node of every scheduled walk in schedule order: node by node, each
// repeated walk_count times.
inline std::vector<NodeId> walk_schedule(const WalkStrategy& s, const Graph& g) {
  std::vector<NodeId> starts;
  starts.reserve(total_walk_count(s, g));
  for (NodeId i = 0; i < g.num_nodes(); ++i) starts.insert(starts.end(), walk_count(s, g.degree(i)), i);
  return starts;
}

inline std::size_t resolve_threads(std::size_t requested) {
  if (requested == 0) requested = std::max(1u, std::thread::hardware_concurrency());
  return requested;
}

// Runs fn(i) for i in [0, n) over up to `threads` workers in contiguous chunks.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t threads, Fn&& fn) {
  threads = std::min(resolve_threads(threads), std::max<std::size_t>(n, 1));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::jthread> pool;
  const std::size_t chunk = (n + threads - 1) / threads;
  for (std::size_t t = 0; t < threads; ++t) {
    const std::size_t lo = t * chunk, hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn] {
      for (std::size_t i = lo; i < hi; ++i) fn(i);
    });
  }
}

// Walk i is the r-th repetition from its start node and draws from the
// stream keyed by (seed, node, r), so the corpus does not depend on the
// worker count.
inline WalkCorpus generate_corpus(const TransitionModel& model, const WalkConfig& cfg) {
  cfg.validate();
  const Graph& g = model.graph();
  const auto starts = walk_schedule(cfg.strategy, g);
  if (starts.empty()) throw InputError("graph has no non-isolated nodes to walk from");

  WalkCorpus corpus;
  corpus.config = cfg;
  corpus.stride = cfg.walk_length + 1;
  corpus.nodes.assign(starts.size() * corpus.stride, 0);
  corpus.lengths.assign(starts.size(), 0);

  // Repetition index of each schedule slot.
  std::vector<std::uint32_t> rep(starts.size(), 0);
  for (std::size_t i = 1; i < starts.size(); ++i) rep[i] = starts[i] == starts[i - 1] ? rep[i - 1] + 1 : 0;

  parallel_for(starts.size(), cfg.threads, [&](std::size_t i) {
    Rng rng = Rng::stream(cfg.seed, starts[i], rep[i]);
    std::span<NodeId> slot(corpus.nodes.data() + i * corpus.stride, corpus.stride);
    corpus.lengths[i] = static_cast<std::uint32_t>(generate_walk_into(model, starts[i], slot, rng));
  });
  return corpus;
}

inline WalkCorpus generate_corpus(const Graph& g, const WalkConfig& cfg) {
  cfg.validate();
  const TransitionModel model(g, cfg.p, cfg.q, cfg.sampler);
  return generate_corpus(model, cfg);
}

// One walk per line, space-separated node tokens.
inline void write_corpus(const WalkCorpus& corpus, const std::vector<std::string>& tokens, std::ostream& out) {
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto w = corpus.walk(i);
    for (std::size_t j = 0; j < w.size(); ++j) {
      if (j) out << ' ';
      out << tokens[w[j]];
    }
    out << '\n';
  }
}

// Reads a token corpus. Tokens get dense ids in order of first appearance;
// the id -> token table is appended to `tokens`.
inline WalkCorpus read_corpus(std::istream& in, std::vector<std::string>& tokens) {
  std::unordered_map<std::string, NodeId> ids;
  for (std::size_t i = 0; i < tokens.size(); ++i) ids.emplace(tokens[i], static_cast<NodeId>(i));
  WalkCorpus corpus;
  std::string line;
  std::vector<NodeId> walk;
  while (std::getline(in, line)) {
    walk.clear();
    for (const auto& t : detail::split_ws(line)) {
      auto [it, inserted] = ids.try_emplace(t, static_cast<NodeId>(tokens.size()));
      if (inserted) tokens.push_back(t);
      walk.push_back(it->second);
    }
    if (!walk.empty()) corpus.push_back(walk);
  }
  return corpus;
}

}  // namespace degwalk
