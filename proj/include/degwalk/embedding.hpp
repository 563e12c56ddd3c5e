#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "degwalk/alias.hpp"
#include "degwalk/error.hpp"
#include "degwalk/rng.hpp"
#include "degwalk/walk.hpp"

namespace degwalk {

struct TrainConfig {
  std::size_t dim = 128;
  std::size_t window = 5;
  std::size_t negatives = 5;
  std::size_t epochs = 5;
  double learning_rate = 0.025;
  double lr_floor = 0.0001;
  bool shrink_window = true;  // effective window drawn uniformly from 1..window per center
  std::uint64_t seed = 1;
  // >1 enables lock-free parallel updates; results are then nondeterministic.
  std::size_t threads = 1;

  void validate() const {
    if (dim < 1) throw InputError("dimension must be >= 1");
    if (window < 1) throw InputError("window must be >= 1");
    if (negatives < 1) throw InputError("negatives must be >= 1");
    if (epochs < 1) throw InputError("epochs must be >= 1");
    if (!(lr_floor > 0.0) || !(lr_floor <= learning_rate)) throw InputError("need 0 < lr_floor <= learning_rate");
  }
};

// Corpus node frequencies and the unigram^0.75 negative-sampling law.
class Vocabulary {
 public:
  Vocabulary() = default;
  explicit Vocabulary(std::vector<std::uint64_t> frequencies) : freq_(std::move(frequencies)) {
    std::vector<double> w;
    for (std::size_t i = 0; i < freq_.size(); ++i)
      if (freq_[i] > 0) {
        present_.push_back(static_cast<NodeId>(i));
        w.push_back(std::pow(static_cast<double>(freq_[i]), 0.75));
      }
    if (present_.empty()) throw InputError("empty corpus");
    table_ = AliasTable(w);
  }

  std::size_t size() const noexcept { return freq_.size(); }
  std::uint64_t frequency(NodeId i) const noexcept { return freq_[i]; }
  std::span<const std::uint64_t> frequencies() const noexcept { return freq_; }
  // Nodes with nonzero frequency, ascending.
  std::span<const NodeId> present() const noexcept { return present_; }

  NodeId sample_negative(Rng& rng) const { return present_[table_(rng)]; }

  // Negative-sampling probability per node (zero for absent nodes).
  std::vector<double> negative_probabilities() const {
    std::vector<double> out(freq_.size(), 0.0);
    const auto d = table_.distribution();
    for (std::size_t k = 0; k < present_.size(); ++k) out[present_[k]] = d[k];
    return out;
  }

 private:
  std::vector<std::uint64_t> freq_;
  std::vector<NodeId> present_;
  AliasTable table_;
};

// num_nodes = 0 sizes the vocabulary to the largest id seen.
inline Vocabulary build_vocab(const WalkCorpus& corpus, std::size_t num_nodes = 0) {
  if (corpus.empty() || corpus.token_count() == 0) throw InputError("empty corpus");
  std::size_t n = num_nodes;
  for (std::size_t i = 0; i < corpus.size(); ++i)
    for (NodeId v : corpus.walk(i)) n = std::max<std::size_t>(n, v + 1);
  std::vector<std::uint64_t> freq(n, 0);
  for (std::size_t i = 0; i < corpus.size(); ++i)
    for (NodeId v : corpus.walk(i)) ++freq[v];
  return Vocabulary(std::move(freq));
}

struct ContextPair {
  NodeId center;
  NodeId context;
  friend bool operator==(const ContextPair&, const ContextPair&) = default;
};

// Skip-gram pairs of one walk. With shrink enabled each center position draws
// its effective window uniformly from 1..window.
inline void generate_pairs(std::span<const NodeId> walk, std::size_t window, bool shrink, Rng& rng,
                           std::vector<ContextPair>& out) {
  const std::size_t n = walk.size();
  for (std::size_t c = 0; c < n; ++c) {
    const std::size_t w = shrink ? 1 + static_cast<std::size_t>(rng.below(window)) : window;
    const std::size_t lo = c >= w ? c - w : 0;
    const std::size_t hi = std::min(n - 1, c + w);
    for (std::size_t j = lo; j <= hi; ++j)
      if (j != c) out.push_back({walk[c], walk[j]});
  }
}

inline std::vector<ContextPair> generate_pairs(std::span<const NodeId> walk, std::size_t window, bool shrink,
                                               Rng& rng) {
  std::vector<ContextPair> out;
  generate_pairs(walk, window, shrink, rng, out);
  return out;
}

// Node vectors (`input`, the embeddings) and context vectors, row-major.
struct EmbeddingMatrix {
  std::size_t rows = 0;
  std::size_t dim = 0;
  std::vector<double> input;
  std::vector<double> context;

  EmbeddingMatrix() = default;
  EmbeddingMatrix(std::size_t r, std::size_t d) : rows(r), dim(d), input(r * d, 0.0), context(r * d, 0.0) {}

  std::span<double> row(std::size_t i) noexcept { return {input.data() + i * dim, dim}; }
  std::span<const double> row(std::size_t i) const noexcept { return {input.data() + i * dim, dim}; }
  std::span<double> context_row(std::size_t i) noexcept { return {context.data() + i * dim, dim}; }
  std::span<const double> context_row(std::size_t i) const noexcept { return {context.data() + i * dim, dim}; }

  bool all_finite() const noexcept {
    for (double x : input)
      if (!std::isfinite(x)) return false;
    for (double x : context)
      if (!std::isfinite(x)) return false;
    return true;
  }
};

inline double sigmoid(double x) noexcept { return 1.0 / (1.0 + std::exp(-x)); }

// log(sigmoid(x)) without overflow.
inline double log_sigmoid(double x) noexcept { return x >= 0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x)); }

// Loss and gradients of one skip-gram negative-sampling term
//   L = -log s(u_ctx . v_c) - sum_neg log s(-u_neg . v_c)
// with v_c = input row of center and u_* = context rows.
struct SgnsGradient {
  double loss = 0.0;
  std::vector<double> center;                // dL/dv_c
  std::vector<NodeId> outputs;               // context, then negatives
  std::vector<std::vector<double>> output;   // dL/du_j, parallel to outputs
};

inline SgnsGradient sgns_gradient(const EmbeddingMatrix& m, NodeId center, NodeId context,
                                  std::span<const NodeId> negatives) {
  SgnsGradient g;
  g.center.assign(m.dim, 0.0);
  const auto v = m.row(center);
  auto term = [&](NodeId j, double label) {
    const auto u = m.context_row(j);
    double dot = 0.0;
    for (std::size_t k = 0; k < m.dim; ++k) dot += u[k] * v[k];
    g.loss -= label > 0 ? log_sigmoid(dot) : log_sigmoid(-dot);
    const double coeff = sigmoid(dot) - label;
    std::vector<double> du(m.dim);
    for (std::size_t k = 0; k < m.dim; ++k) {
      g.center[k] += coeff * u[k];
      du[k] = coeff * v[k];
    }
    g.outputs.push_back(j);
    g.output.push_back(std::move(du));
  };
  term(context, 1.0);
  for (NodeId n : negatives) term(n, 0.0);
  return g;
}

namespace detail {

// Hot-path SGNS update. All gradients are taken at the pre-update point; the
// center gradient is accumulated in `scratch`. With Shared, matrix reads and
// writes are relaxed atomics so concurrent workers do not race formally.
template <bool Shared>
double sgns_update(EmbeddingMatrix& m, NodeId center, NodeId context, std::span<const NodeId> negatives, double lr,
                   std::span<double> scratch) {
  auto load = [](double& x) {
    if constexpr (Shared)
      return std::atomic_ref<double>(x).load(std::memory_order_relaxed);
    else
      return x;
  };
  auto store = [](double& x, double val) {
    if constexpr (Shared)
      std::atomic_ref<double>(x).store(val, std::memory_order_relaxed);
    else
      x = val;
  };

  const std::size_t d = m.dim;
  double* v = m.input.data() + static_cast<std::size_t>(center) * d;
  std::fill(scratch.begin(), scratch.end(), 0.0);
  double loss = 0.0;
  auto term = [&](NodeId j, double label) {
    double* u = m.context.data() + static_cast<std::size_t>(j) * d;
    double dot = 0.0;
    for (std::size_t k = 0; k < d; ++k) dot += load(u[k]) * load(v[k]);
    loss -= label > 0 ? log_sigmoid(dot) : log_sigmoid(-dot);
    const double coeff = sigmoid(dot) - label;
    for (std::size_t k = 0; k < d; ++k) {
      const double uk = load(u[k]);
      scratch[k] += coeff * uk;
      store(u[k], uk - lr * coeff * load(v[k]));
    }
  };
  term(context, 1.0);
  for (NodeId n : negatives) term(n, 0.0);
  for (std::size_t k = 0; k < d; ++k) store(v[k], load(v[k]) - lr * scratch[k]);
  return loss;
}

}  // namespace detail

// One gradient-descent step on a single (center, context, negatives) term.
// Returns the loss evaluated before the update.
inline double sgns_step(EmbeddingMatrix& m, NodeId center, NodeId context, std::span<const NodeId> negatives,
                        double lr) {
  const SgnsGradient g = sgns_gradient(m, center, context, negatives);
  auto v = m.row(center);
  for (std::size_t k = 0; k < m.dim; ++k) v[k] -= lr * g.center[k];
  for (std::size_t j = 0; j < g.outputs.size(); ++j) {
    auto u = m.context_row(g.outputs[j]);
    for (std::size_t k = 0; k < m.dim; ++k) u[k] -= lr * g.output[j][k];
  }
  return g.loss;
}

struct TrainStats {
  std::vector<double> epoch_loss;  // mean loss per positive pair
  std::size_t pairs = 0;
};

namespace detail {

template <bool Shared>
void train_walks(const WalkCorpus& corpus, std::span<const std::size_t> order, std::size_t begin, std::size_t end,
                 const Vocabulary& vocab, const TrainConfig& cfg, EmbeddingMatrix& m, Rng& rng,
                 std::atomic<std::size_t>& tokens_done, std::size_t tokens_total, double& loss_sum,
                 std::size_t& pair_count) {
  std::vector<ContextPair> pairs;
  std::vector<NodeId> negs(cfg.negatives);
  std::vector<double> scratch(cfg.dim);
  for (std::size_t w = begin; w < end; ++w) {
    const auto walk = corpus.walk(order[w]);
    const double progress =
        static_cast<double>(tokens_done.load(std::memory_order_relaxed)) / static_cast<double>(tokens_total);
    const double lr = std::max(cfg.lr_floor, cfg.learning_rate - (cfg.learning_rate - cfg.lr_floor) * progress);
    pairs.clear();
    generate_pairs(walk, cfg.window, cfg.shrink_window, rng, pairs);
    for (const auto& pr : pairs) {
      std::size_t k = 0;
      while (k < cfg.negatives) {
        const NodeId n = vocab.sample_negative(rng);
        // Skipped when it hits the positive context, as in word2vec.
        if (n == pr.context) {
          if (vocab.present().size() == 1) break;
          continue;
        }
        negs[k++] = n;
      }
      loss_sum += sgns_update<Shared>(m, pr.center, pr.context, std::span<const NodeId>(negs.data(), k), lr, scratch);
      ++pair_count;
    }
    tokens_done.fetch_add(walk.size(), std::memory_order_relaxed);
  }
}

}  // namespace detail

// Skip-gram with negative sampling over a walk corpus. Rows are node ids; the
// matrix has max(num_nodes, largest id + 1) rows.
inline EmbeddingMatrix train(const WalkCorpus& corpus, const TrainConfig& cfg, std::size_t num_nodes = 0,
                             TrainStats* stats = nullptr) {
  cfg.validate();
  const Vocabulary vocab = build_vocab(corpus, num_nodes);
  EmbeddingMatrix m(vocab.size(), cfg.dim);
  Rng init(Rng::stream(cfg.seed, 0));
  const double scale = 0.5 / static_cast<double>(cfg.dim);
  for (double& x : m.input) x = (init.uniform() * 2.0 - 1.0) * scale;

  TrainStats local;
  const std::size_t tokens_total = corpus.token_count() * cfg.epochs;
  std::atomic<std::size_t> tokens_done{0};
  std::vector<std::size_t> order(corpus.size());
  const std::size_t threads = std::min(resolve_threads(cfg.threads), std::max<std::size_t>(corpus.size(), 1));

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng shuffler(Rng::stream(cfg.seed, 1, epoch));
    shuffler.shuffle(order.begin(), order.end());

    double loss_sum = 0.0;
    std::size_t pair_count = 0;
    if (threads <= 1) {
      Rng rng(Rng::stream(cfg.seed, 2, epoch));
      detail::train_walks<false>(corpus, order, 0, order.size(), vocab, cfg, m, rng, tokens_done, tokens_total,
                                 loss_sum, pair_count);
    } else {
      std::vector<double> losses(threads, 0.0);
      std::vector<std::size_t> counts(threads, 0);
      {
        std::vector<std::jthread> pool;
        const std::size_t chunk = (order.size() + threads - 1) / threads;
        for (std::size_t t = 0; t < threads; ++t) {
          const std::size_t lo = t * chunk, hi = std::min(order.size(), lo + chunk);
          if (lo >= hi) break;
          pool.emplace_back([&, t, lo, hi] {
            Rng rng(Rng::stream(cfg.seed, 3 + epoch, t));
            detail::train_walks<true>(corpus, order, lo, hi, vocab, cfg, m, rng, tokens_done, tokens_total,
                                      losses[t], counts[t]);
          });
        }
      }
      for (std::size_t t = 0; t < threads; ++t) {
        loss_sum += losses[t];
        pair_count += counts[t];
      }
    }
    local.epoch_loss.push_back(pair_count ? loss_sum / static_cast<double>(pair_count) : 0.0);
    local.pairs += pair_count;
  }
  if (stats) *stats = std::move(local);
  return m;
}

// word2vec text format: "rows dim" header, then "<token> <dim values>" per
// row, values with 6 significant digits. `rows` selects which matrix rows to
// write (all when empty).
inline void save_word2vec(const EmbeddingMatrix& m, const std::vector<std::string>& tokens, std::ostream& out,
                          std::span<const NodeId> rows = {}) {
  std::vector<NodeId> all;
  if (rows.empty()) {
    for (std::size_t i = 0; i < m.rows; ++i) all.push_back(static_cast<NodeId>(i));
    rows = all;
  }
  out << rows.size() << ' ' << m.dim << '\n';
  char buf[32];
  for (NodeId r : rows) {
    out << tokens[r];
    for (double x : m.row(r)) {
      std::snprintf(buf, sizeof buf, " %.6g", x);
      out << buf;
    }
    out << '\n';
  }
}

struct LoadedEmbedding {
  EmbeddingMatrix matrix;  // context vectors are zero
  std::vector<std::string> tokens;
};

inline LoadedEmbedding load_word2vec(std::istream& in) {
  std::size_t rows = 0, dim = 0;
  if (!(in >> rows >> dim) || dim == 0) throw InputError("bad embedding header");
  LoadedEmbedding out{EmbeddingMatrix(rows, dim), {}};
  for (std::size_t r = 0; r < rows; ++r) {
    std::string tok;
    if (!(in >> tok)) throw InputError("embedding file truncated at row " + std::to_string(r + 1));
    out.tokens.push_back(tok);
    for (double& x : out.matrix.row(r))
      if (!(in >> x)) throw InputError("bad value in embedding row " + std::to_string(r + 1));
  }
  return out;
}

}  // namespace degwalk
