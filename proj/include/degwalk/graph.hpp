#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <queue>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "degwalk/error.hpp"

namespace degwalk {

using NodeId = std::uint32_t;
using ClassId = std::int32_t;
inline constexpr ClassId kUnlabeled = -1;

struct Edge {
  NodeId u;
  NodeId v;
  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

// Immutable undirected simple graph in compressed sparse row form.
// Neighbor lists are sorted; node ids are dense in [0, num_nodes()).
class Graph {
 public:
  Graph() = default;

  // Builds a graph from an edge list. Self-loops and duplicate edges (in
  // either orientation) are dropped. tokens[i] is the external name of node
  // i; if empty, tokens default to decimal ids.
  static Graph from_edges(std::size_t num_nodes, std::span<const Edge> edges,
                          std::vector<std::string> tokens = {}) {
    Graph g;
    std::vector<Edge> canon;
    canon.reserve(edges.size());
    for (auto e : edges) {
      if (e.u >= num_nodes || e.v >= num_nodes) throw InputError("edge endpoint out of range");
      if (e.u == e.v) continue;
      canon.push_back(e.u < e.v ? e : Edge{e.v, e.u});
    }
    std::sort(canon.begin(), canon.end());
    canon.erase(std::unique(canon.begin(), canon.end()), canon.end());

    g.offsets_.assign(num_nodes + 1, 0);
    for (auto e : canon) {
      ++g.offsets_[e.u + 1];
      ++g.offsets_[e.v + 1];
    }
    for (std::size_t i = 0; i < num_nodes; ++i) g.offsets_[i + 1] += g.offsets_[i];
    g.adjacency_.resize(g.offsets_.back());
    std::vector<std::size_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
    for (auto e : canon) {
      g.adjacency_[cursor[e.u]++] = e.v;
      g.adjacency_[cursor[e.v]++] = e.u;
    }
    for (std::size_t i = 0; i < num_nodes; ++i)
      std::sort(g.adjacency_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[i]),
                g.adjacency_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[i + 1]));

    if (tokens.empty()) {
      tokens.reserve(num_nodes);
      for (std::size_t i = 0; i < num_nodes; ++i) tokens.push_back(std::to_string(i));
    }
    if (tokens.size() != num_nodes) throw InputError("token count does not match node count");
    g.tokens_ = std::move(tokens);
    g.index_.reserve(num_nodes);
    for (std::size_t i = 0; i < num_nodes; ++i) g.index_.emplace(g.tokens_[i], static_cast<NodeId>(i));
    g.labels_.assign(num_nodes, kUnlabeled);
    return g;
  }

  std::size_t num_nodes() const noexcept { return tokens_.size(); }
  std::size_t num_edges() const noexcept { return adjacency_.size() / 2; }
  std::size_t degree_sum() const noexcept { return adjacency_.size(); }

  std::size_t degree(NodeId i) const noexcept { return offsets_[i + 1] - offsets_[i]; }

  std::span<const NodeId> neighbors(NodeId i) const noexcept {
    return {adjacency_.data() + offsets_[i], degree(i)};
  }

  bool has_edge(NodeId u, NodeId v) const noexcept {
    auto n = neighbors(u);
    return std::binary_search(n.begin(), n.end(), v);
  }

  // Position of v inside neighbors(u); requires has_edge(u, v).
  std::size_t neighbor_index(NodeId u, NodeId v) const noexcept {
    auto n = neighbors(u);
    return static_cast<std::size_t>(std::lower_bound(n.begin(), n.end(), v) - n.begin());
  }

  // Offset of the directed edge u->v in the flat adjacency array.
  std::size_t edge_slot(NodeId u, NodeId v) const noexcept { return offsets_[u] + neighbor_index(u, v); }

  std::span<const std::size_t> offsets() const noexcept { return offsets_; }

  const std::string& token(NodeId i) const noexcept { return tokens_[i]; }
  const std::vector<std::string>& tokens() const noexcept { return tokens_; }

  std::optional<NodeId> find(const std::string& token) const {
    auto it = index_.find(token);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  // Undirected edges with u < v, sorted.
  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    out.reserve(num_edges());
    for (NodeId u = 0; u < num_nodes(); ++u)
      for (NodeId v : neighbors(u))
        if (u < v) out.push_back({u, v});
    return out;
  }

  std::size_t min_degree() const noexcept {
    std::size_t m = num_nodes() ? degree(0) : 0;
    for (NodeId i = 1; i < num_nodes(); ++i) m = std::min(m, degree(i));
    return m;
  }

  std::size_t max_degree() const noexcept {
    std::size_t m = 0;
    for (NodeId i = 0; i < num_nodes(); ++i) m = std::max(m, degree(i));
    return m;
  }

  double mean_degree() const noexcept {
    return num_nodes() ? static_cast<double>(degree_sum()) / static_cast<double>(num_nodes()) : 0.0;
  }

  // Labels: one ClassId per node, kUnlabeled where unknown.
  bool has_labels() const noexcept { return !label_names_.empty(); }
  std::span<const ClassId> labels() const noexcept { return labels_; }
  ClassId label(NodeId i) const noexcept { return labels_[i]; }
  const std::vector<std::string>& label_names() const noexcept { return label_names_; }
  std::size_t num_classes() const noexcept { return label_names_.size(); }

  void set_labels(std::vector<ClassId> labels, std::vector<std::string> names) {
    if (labels.size() != num_nodes()) throw InputError("label vector size does not match node count");
    for (auto c : labels)
      if (c != kUnlabeled && (c < 0 || static_cast<std::size_t>(c) >= names.size()))
        throw InputError("class id out of range");
    labels_ = std::move(labels);
    label_names_ = std::move(names);
  }

 private:
  std::vector<std::size_t> offsets_{0};
  std::vector<NodeId> adjacency_;
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, NodeId> index_;
  std::vector<ClassId> labels_;
  std::vector<std::string> label_names_;
};

struct LoadOptions {
  bool deduplicate = true;      // false: a repeated edge is an input error
  bool drop_self_loops = true;  // false: a self-loop is an input error
};

struct LoadStats {
  std::size_t lines = 0;
  std::size_t edges_read = 0;
  std::size_t self_loops_dropped = 0;
  std::size_t duplicates_dropped = 0;
};

namespace detail {

inline std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

inline bool skippable(const std::vector<std::string>& fields) {
  return fields.empty() || fields.front().front() == '#' || fields.front().front() == '%';
}

}  // namespace detail

// Reads a whitespace-separated edge list. Tokens get dense ids in order of
// first appearance. Blank lines and lines starting with '#' or '%' are
// ignored.
inline Graph read_edge_list(std::istream& in, LoadOptions opts = {}, LoadStats* stats = nullptr) {
  LoadStats local;
  std::unordered_map<std::string, NodeId> ids;
  std::vector<std::string> tokens;
  std::vector<Edge> edges;
  auto intern = [&](const std::string& t) {
    auto [it, inserted] = ids.try_emplace(t, static_cast<NodeId>(tokens.size()));
    if (inserted) tokens.push_back(t);
    return it->second;
  };

  std::string line;
  while (std::getline(in, line)) {
    ++local.lines;
    auto fields = detail::split_ws(line);
    if (detail::skippable(fields)) continue;
    if (fields.size() != 2)
      throw InputError("malformed edge at line " + std::to_string(local.lines) + ": expected 2 fields, got " +
                       std::to_string(fields.size()));
    ++local.edges_read;
    NodeId u = intern(fields[0]);
    NodeId v = intern(fields[1]);
    if (u == v) {
      if (!opts.drop_self_loops) throw InputError("self-loop at line " + std::to_string(local.lines));
      ++local.self_loops_dropped;
      continue;
    }
    edges.push_back({u, v});
  }
  if (tokens.empty()) throw InputError("empty graph");

  std::vector<Edge> canon;
  canon.reserve(edges.size());
  for (auto e : edges) canon.push_back(e.u < e.v ? e : Edge{e.v, e.u});
  std::sort(canon.begin(), canon.end());
  const std::size_t unique = static_cast<std::size_t>(std::unique(canon.begin(), canon.end()) - canon.begin());
  local.duplicates_dropped = canon.size() - unique;
  if (!opts.deduplicate && local.duplicates_dropped > 0)
    throw InputError(std::to_string(local.duplicates_dropped) + " duplicate edge(s) with deduplication disabled");

  const std::size_t n = tokens.size();
  Graph g = Graph::from_edges(n, edges, std::move(tokens));
  if (stats) *stats = local;
  return g;
}

inline Graph load_edge_list(const std::string& path, LoadOptions opts = {}, LoadStats* stats = nullptr) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read edge list: " + path);
  return read_edge_list(in, opts, stats);
}

inline void write_edge_list(const Graph& g, std::ostream& out) {
  for (auto e : g.edges()) out << g.token(e.u) << ' ' << g.token(e.v) << '\n';
}

struct LabelStats {
  std::size_t matched = 0;
  std::size_t skipped = 0;  // lines naming a node not in the graph
  std::size_t classes = 0;
};

// Label rows are `<node> <class>` or `.content` rows (first and last field
// taken). Class ids are assigned in order of first appearance.
inline Graph read_labels(std::istream& in, Graph g, LabelStats* stats = nullptr) {
  LabelStats local;
  std::vector<ClassId> labels(g.num_nodes(), kUnlabeled);
  std::vector<std::string> names;
  std::unordered_map<std::string, ClassId> class_ids;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto fields = detail::split_ws(line);
    if (detail::skippable(fields)) continue;
    if (fields.size() < 2) throw InputError("malformed label row at line " + std::to_string(lineno));
    auto node = g.find(fields.front());
    if (!node) {
      ++local.skipped;
      continue;
    }
    auto [it, inserted] = class_ids.try_emplace(fields.back(), static_cast<ClassId>(names.size()));
    if (inserted) names.push_back(fields.back());
    labels[*node] = it->second;
    ++local.matched;
  }
  if (local.matched == 0) throw InputError("no label rows matched graph nodes");
  local.classes = names.size();
  g.set_labels(std::move(labels), std::move(names));
  if (stats) *stats = local;
  return g;
}

inline Graph load_labels(const std::string& path, Graph g, LabelStats* stats = nullptr) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read label file: " + path);
  return read_labels(in, std::move(g), stats);
}

// Zachary's karate club, tokens "1".."34", labeled by post-split faction.
inline Graph karate_club() {
  static constexpr std::pair<int, int> kEdges[] = {
      {0, 1},   {0, 2},   {0, 3},   {0, 4},   {0, 5},   {0, 6},   {0, 7},   {0, 8},   {0, 10},  {0, 11},
      {0, 12},  {0, 13},  {0, 17},  {0, 19},  {0, 21},  {0, 31},  {1, 2},   {1, 3},   {1, 7},   {1, 13},
      {1, 17},  {1, 19},  {1, 21},  {1, 30},  {2, 3},   {2, 7},   {2, 8},   {2, 9},   {2, 13},  {2, 27},
      {2, 28},  {2, 32},  {3, 7},   {3, 12},  {3, 13},  {4, 6},   {4, 10},  {5, 6},   {5, 10},  {5, 16},
      {6, 16},  {8, 30},  {8, 32},  {8, 33},  {9, 33},  {13, 33}, {14, 32}, {14, 33}, {15, 32}, {15, 33},
      {18, 32}, {18, 33}, {19, 33}, {20, 32}, {20, 33}, {22, 32}, {22, 33}, {23, 25}, {23, 27}, {23, 29},
      {23, 32}, {23, 33}, {24, 25}, {24, 27}, {24, 31}, {25, 31}, {26, 29}, {26, 33}, {27, 33}, {28, 31},
      {28, 33}, {29, 32}, {29, 33}, {30, 32}, {30, 33}, {31, 32}, {31, 33}, {32, 33}};
  static constexpr ClassId kFaction[34] = {0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 1, 0,
                                           0, 1, 0, 1, 0, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1};
  std::vector<Edge> edges;
  for (auto [u, v] : kEdges) edges.push_back({static_cast<NodeId>(u), static_cast<NodeId>(v)});
  std::vector<std::string> tokens;
  for (int i = 1; i <= 34; ++i) tokens.push_back(std::to_string(i));
  Graph g = Graph::from_edges(34, edges, std::move(tokens));
  g.set_labels(std::vector<ClassId>(std::begin(kFaction), std::end(kFaction)), {"Mr. Hi", "Officer"});
  return g;
}

// Connected component id per node (BFS, components numbered from 0 in order
// of their lowest node id).
inline std::vector<std::uint32_t> connected_components(const Graph& g, std::size_t* count = nullptr) {
  constexpr auto kNone = static_cast<std::uint32_t>(-1);
  std::vector<std::uint32_t> comp(g.num_nodes(), kNone);
  std::uint32_t next = 0;
  std::queue<NodeId> frontier;
  for (NodeId s = 0; s < g.num_nodes(); ++s) {
    if (comp[s] != kNone) continue;
    comp[s] = next;
    frontier.push(s);
    while (!frontier.empty()) {
      NodeId u = frontier.front();
      frontier.pop();
      for (NodeId v : g.neighbors(u))
        if (comp[v] == kNone) {
          comp[v] = next;
          frontier.push(v);
        }
    }
    ++next;
  }
  if (count) *count = next;
  return comp;
}

// Induced subgraph on a node subset; kept[i] is the original id of new node i.
inline Graph induced_subgraph(const Graph& g, std::span<const NodeId> kept) {
  constexpr auto kNone = static_cast<NodeId>(-1);
  std::vector<NodeId> remap(g.num_nodes(), kNone);
  for (std::size_t i = 0; i < kept.size(); ++i) remap[kept[i]] = static_cast<NodeId>(i);
  std::vector<Edge> edges;
  std::vector<std::string> tokens;
  std::vector<ClassId> labels;
  for (NodeId old : kept) {
    tokens.push_back(g.token(old));
    labels.push_back(g.label(old));
    for (NodeId nb : g.neighbors(old))
      if (old < nb && remap[nb] != kNone) edges.push_back({remap[old], remap[nb]});
  }
  Graph sub = Graph::from_edges(kept.size(), edges, std::move(tokens));
  if (g.has_labels()) sub.set_labels(std::move(labels), g.label_names());
  return sub;
}

struct ComponentExtract {
  Graph graph;
  std::vector<NodeId> original_ids;  // new id -> id in the source graph
};

// Largest connected component (ties go to the component holding the lowest
// node id). Node order and labels are carried over.
inline ComponentExtract largest_connected_component(const Graph& g) {
  std::size_t count = 0;
  auto comp = connected_components(g, &count);
  std::vector<std::size_t> sizes(count, 0);
  for (auto c : comp) ++sizes[c];
  const auto best = static_cast<std::uint32_t>(std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
  ComponentExtract out;
  for (NodeId i = 0; i < g.num_nodes(); ++i)
    if (comp[i] == best) out.original_ids.push_back(i);
  out.graph = induced_subgraph(g, out.original_ids);
  return out;
}

inline nlohmann::json summary_json(const Graph& g) {
  return {{"nodes", g.num_nodes()},         {"edges", g.num_edges()},           {"classes", g.num_classes()},
          {"min_degree", g.min_degree()}, {"max_degree", g.max_degree()}, {"mean_degree", g.mean_degree()}};
}

}  // namespace degwalk
