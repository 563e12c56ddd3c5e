// Always-on acceptance suite: one PASS/FAIL line per criterion. Criteria that
// need the citation datasets are reported by acceptance_datasets.

#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "degwalk/degwalk.hpp"
#include "support/quadrature.hpp"

using namespace degwalk;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(const std::string& id, bool ok, const std::string& detail) {
  std::printf("[%s] criterion %s: %s\n", ok ? "PASS" : "FAIL", id.c_str(), detail.c_str());
  std::fflush(stdout);
  failures += !ok;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Graph random_graph(std::size_t n, std::size_t m, Rng& rng) {
  std::vector<Edge> edges;
  while (edges.size() < m) {
    const auto u = static_cast<NodeId>(rng.below(n)), v = static_cast<NodeId>(rng.below(n));
    if (u != v) edges.push_back({u, v});
  }
  return Graph::from_edges(n, edges);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void criterion_1() {
  const auto t0 = std::chrono::steady_clock::now();
  const Graph k = karate_club();
  const bool ok = total_walk_count(DegreeWalks{5}, k) == 780 && total_walk_count(FixedWalks{40}, k) == 1360 &&
                  k.degree_sum() == 156;
  const double secs = seconds_since(t0);
  report("1", ok && secs < 1.0,
         fmt("karate degree-5 TNW = %zu (expected 780), %.3f s; CORA/CiteSeer parts run in acceptance_datasets",
             total_walk_count(DegreeWalks{5}, k), secs));
}

void criterion_2() {
  const std::size_t tnw[] = {10138, 20276, 30414, 40552};
  const double expected[] = {79.6, 59, 38.8, 18.4};
  std::vector<EvalReport> rows{make_report("nc", FixedWalks{20}, 49700, 30, 0.0)};
  for (std::size_t i = 0; i < 4; ++i) rows.push_back(make_report("nc", DegreeWalks{i + 1}, tnw[i], 30, 0.0));
  apply_baseline(rows);
  bool ok = true;
  std::string got;
  for (std::size_t i = 0; i < 4; ++i) {
    const double d = *rows[i + 1].decrease_pct;
    // The reference value 59 is given to integer precision.
    const double tol = expected[i] == std::round(expected[i]) ? 0.5 : 0.1;
    ok = ok && std::abs(d - expected[i]) <= tol;
    got += fmt("%s%.2f", i ? ", " : "", d);
  }
  report("2", ok, "decrease % from reference TNW: " + got + " vs 79.6, 59, 38.8, 18.4");
}

void criterion_3() {
  namespace sf = scale_free;
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  int points = 0;
  for (double gamma : {2.1, 2.3, 2.5, 2.7, 2.9})
    for (double kmin : {1.0, 3.0})
      for (double span : {1e2, 1e4}) {
        ++points;
        const double kmax = kmin * span;
        const sf::Params p{gamma, kmin, std::pow(span, gamma - 1.0)};
        auto pdf = [&](double k) { return sf::degree_pdf(k, p); };
        // The mass above k_max is 1/N.
        const double mass = quad::log_simpson(pdf, kmin, sf::expected_max_degree(p));
        worst = std::max(worst, std::abs(mass - (1.0 - 1.0 / p.n)));
        // Normalization: truncated mass matches the analytic tail.
        const double far = kmin * std::pow(1e-10, 1.0 / (1.0 - gamma));
        worst = std::max(worst, std::abs(quad::log_simpson(pdf, kmin, far) - 1.0) - 1e-10);
        // Finite-size mean degree.
        const double mean = quad::log_simpson([&](double k) { return k * pdf(k); }, kmin, kmax);
        worst = std::max(worst, std::abs(mean - sf::expected_avg_degree(p, kmax).value) / std::max(1.0, mean));
        // Asymptotic mean: integrate until the analytic tail is below 1e-9.
        const double upper = kmin * std::pow(1e-9, 1.0 / (2.0 - gamma));
        const double tail = (gamma - 1.0) / (gamma - 2.0) * kmin * std::pow(kmin / upper, gamma - 2.0);
        const double limit = quad::log_simpson([&](double k) { return k * pdf(k); }, kmin, upper) + tail;
        worst = std::max(worst, std::abs(limit - sf::asymptotic_avg_degree(p)) / std::max(1.0, limit));
      }
  const double secs = seconds_since(t0);
  report("3", worst < 1e-6 && secs < 1.0,
         fmt("%d grid points, worst deviation from quadrature %.2e, %.3f s", points, worst, secs));
}

void criterion_4() {
  const auto t0 = std::chrono::steady_clock::now();
  const Graph g = karate_club();
  int good = 0;
  std::string per_seed;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    WalkConfig wc;
    wc.strategy = DegreeWalks{5};
    wc.walk_length = 10;
    wc.seed = seed;
    TrainConfig tc;
    tc.dim = 32;
    tc.window = 5;
    tc.seed = seed;
    const auto emb = train(generate_corpus(g, wc), tc, g.num_nodes());
    const auto res = recover_communities(emb, g, seed);
    good += res.correct >= 32;
    per_seed += fmt("%s%zu", seed > 1 ? "," : "", res.correct);
  }
  const double secs = seconds_since(t0);
  report("4", good >= 8 && secs < 30.0,
         fmt("karate factions recovered with >= 32/34 in %d/10 seeds (per seed: %s), %.1f s", good, per_seed.c_str(),
             secs));
}

void criterion_9() {
  Rng rng(9);
  double worst = 0.0;
  for (int c = 0; c < 50; ++c) {
    const Graph g = random_graph(12 + rng.below(20), 40 + rng.below(60), rng);
    const double p = 0.1 + 4 * rng.uniform(), q = 0.1 + 4 * rng.uniform();
    const TransitionModel m(g, p, q, c % 2 ? SamplerKind::Rejection : SamplerKind::Alias);
    NodeId t;
    do t = static_cast<NodeId>(rng.below(g.num_nodes()));
    while (g.degree(t) == 0);
    const auto tn = g.neighbors(t);
    const NodeId v = tn[rng.below(tn.size())];
    // Analytic law computed from adjacency directly.
    const auto vn = g.neighbors(v);
    std::vector<double> law(vn.size());
    double total = 0.0;
    for (std::size_t i = 0; i < vn.size(); ++i) {
      const NodeId x = vn[i];
      bool adjacent = false;
      for (NodeId y : tn) adjacent = adjacent || y == x;
      law[i] = x == t ? 1.0 / p : adjacent ? 1.0 : 1.0 / q;
      total += law[i];
    }
    std::map<NodeId, double> freq;
    Rng draws(Rng::stream(99, static_cast<std::uint64_t>(c)));
    const int n = 100000;
    for (int i = 0; i < n; ++i) freq[m.next(t, v, draws)] += 1.0 / n;
    double tv = 0.0;
    for (std::size_t i = 0; i < vn.size(); ++i) tv += std::abs(freq[vn[i]] - law[i] / total);
    worst = std::max(worst, tv / 2);
  }
  report("9", worst < 0.01, fmt("50 cases x 1e5 draws, worst TV distance %.4f", worst));
}

double sgns_reference(const std::vector<double>& v, const std::vector<std::vector<double>>& u) {
  auto dotp = [](const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
  };
  double loss = std::log1p(std::exp(-dotp(u[0], v)));
  for (std::size_t j = 1; j < u.size(); ++j) loss += std::log1p(std::exp(dotp(u[j], v)));
  return loss;
}

void criterion_10() {
  Rng rng(10);
  const double eps = 1e-5;
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t d = 4 + rng.below(12), rows = 8;
    EmbeddingMatrix m(rows, d);
    for (double& x : m.input) x = 2 * rng.uniform() - 1;
    for (double& x : m.context) x = 2 * rng.uniform() - 1;
    const auto center = static_cast<NodeId>(rng.below(rows));
    const auto context = static_cast<NodeId>(rng.below(rows));
    std::vector<NodeId> negs;
    while (negs.size() < 5) {
      const auto n = static_cast<NodeId>(rng.below(rows));
      if (n != context && std::find(negs.begin(), negs.end(), n) == negs.end()) negs.push_back(n);
    }
    const auto grad = sgns_gradient(m, center, context, negs);
    std::vector<double> v(m.row(center).begin(), m.row(center).end());
    std::vector<std::vector<double>> u{{m.context_row(context).begin(), m.context_row(context).end()}};
    for (auto n : negs) u.emplace_back(m.context_row(n).begin(), m.context_row(n).end());

    double diff = 0, norm = 0;
    auto acc = [&](double analytic, double numeric) {
      diff += (analytic - numeric) * (analytic - numeric);
      norm += numeric * numeric;
    };
    for (std::size_t k = 0; k < d; ++k) {
      auto vp = v, vm = v;
      vp[k] += eps;
      vm[k] -= eps;
      acc(grad.center[k], (sgns_reference(vp, u) - sgns_reference(vm, u)) / (2 * eps));
    }
    for (std::size_t j = 0; j < u.size(); ++j)
      for (std::size_t k = 0; k < d; ++k) {
        auto up = u, um = u;
        up[j][k] += eps;
        um[j][k] -= eps;
        acc(grad.output[j][k], (sgns_reference(v, up) - sgns_reference(v, um)) / (2 * eps));
      }
    worst = std::max(worst, std::sqrt(diff / norm));
  }
  report("10", worst < 1e-4, fmt("100 random states, worst relative gradient error %.2e", worst));
}

void criterion_11() {
  const Graph g = karate_club();
  WalkConfig cfg;
  cfg.strategy = DegreeWalks{100};
  cfg.walk_length = 1;
  cfg.seed = 11;
  const auto c = generate_corpus(g, cfg);
  std::map<std::pair<NodeId, NodeId>, double> first;
  for (std::size_t i = 0; i < c.size(); ++i) first[{c.walk(i)[0], c.walk(i)[1]}] += 1;
  std::size_t outside = 0, edges = 0;
  for (NodeId i = 0; i < g.num_nodes(); ++i)
    for (NodeId j : g.neighbors(i)) {
      ++edges;
      // Binomial(100 k_i, 1/k_i) per directed edge.
      const double k = static_cast<double>(g.degree(i));
      const double sigma = std::sqrt(100.0 * (1.0 - 1.0 / k));
      outside += std::abs(first[{i, j}] - 100.0) > std::max(4 * sigma, 0.0);
    }
  report("11", outside == 0, fmt("%zu/%zu directed edges outside the 4-sigma band", outside, edges));
}

void criterion_12() {
  const Graph g = karate_club();
  bool corpus_ok = true;
  std::string reference;
  for (std::size_t threads : {1, 2, 4, 7}) {
    for (int rep = 0; rep < 2; ++rep) {
      WalkConfig wc;
      wc.walk_length = 20;
      wc.strategy = DegreeWalks{3};
      wc.seed = 12;
      wc.threads = threads;
      std::ostringstream out;
      write_corpus(generate_corpus(g, wc), g.tokens(), out);
      if (reference.empty()) reference = out.str();
      corpus_ok = corpus_ok && out.str() == reference;
    }
  }

  bool emb_ok = true;
  std::string emb_ref;
  for (int rep = 0; rep < 2; ++rep) {
    std::istringstream in(reference);
    std::vector<std::string> tokens;
    const auto corpus = read_corpus(in, tokens);
    TrainConfig tc;
    tc.dim = 16;
    tc.seed = 12;
    std::ostringstream out;
    save_word2vec(train(corpus, tc, tokens.size()), tokens, out);
    if (emb_ref.empty()) emb_ref = out.str();
    emb_ok = emb_ok && out.str() == emb_ref;
  }

  const fs::path base = fs::temp_directory_path() / ("degwalk_acceptance_" + std::to_string(::getpid()));
  BenchmarkPlan plan;
  plan.strategies = {FixedWalks{5}, DegreeWalks{1}};
  plan.walk_lengths = {8};
  plan.tasks = {"nc", "lp", "cd"};
  plan.seeds = {1, 2};
  plan.train.dim = 8;
  plan.train.epochs = 1;
  std::vector<std::string> outputs;
  for (std::size_t workers : {1, 4}) {
    plan.workers = workers;
    plan.output = (base / std::to_string(workers)).string();
    run_bench(plan);
    std::string all;
    for (const char* f : {"cells.csv", "table_nc.csv", "table_lp.csv", "table_cd.csv", "sweep_nc.csv",
                          "sweep_lp.csv", "sweep_cd.csv", "report.json"})
      all += slurp(fs::path(plan.output) / f);
    outputs.push_back(all);
  }
  fs::remove_all(base);
  const bool reports_ok = outputs[0] == outputs[1] && !outputs[0].empty();
  report("12", corpus_ok && emb_ok && reports_ok,
         fmt("corpus across 1/2/4/7 threads %s, embedding reruns %s, reports across 1/4 workers %s",
             corpus_ok ? "identical" : "DIFFER", emb_ok ? "identical" : "DIFFER",
             reports_ok ? "identical" : "DIFFER"));
}

double normal(Rng& rng) {
  const double u1 = 1.0 - rng.uniform(), u2 = rng.uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

void criterion_13() {
  Rng rng(13);
  // k-means inertia
  bool inertia_ok = true;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    Dense pts(200, 3);
    for (auto& x : pts.data) x = normal(rng);
    const auto km = kmeans(pts, 5, seed);
    for (std::size_t i = 1; i < km.inertia.size(); ++i) inertia_ok = inertia_ok && km.inertia[i] <= km.inertia[i - 1] + 1e-9;
  }

  // MDS on rank-2 fixtures: pairwise distances preserved.
  double mds_err = 0.0;
  for (int f = 0; f < 5; ++f) {
    std::vector<double> e1(12), e2(12), shift(12);
    for (auto& x : e1) x = normal(rng);
    for (auto& x : e2) x = normal(rng);
    for (auto& x : shift) x = normal(rng);
    Dense pts(25, 12);
    for (std::size_t i = 0; i < 25; ++i) {
      const double a = normal(rng), b = normal(rng);
      for (std::size_t t = 0; t < 12; ++t) pts(i, t) = a * e1[t] + b * e2[t] + shift[t];
    }
    const auto res = reduce_2d(pts, static_cast<std::uint64_t>(f + 1));
    for (std::size_t i = 0; i < 25; ++i)
      for (std::size_t j = i + 1; j < 25; ++j)
        mds_err = std::max(mds_err, std::abs(std::sqrt(squared_distance(res.coords.row(i), res.coords.row(j))) -
                                             std::sqrt(squared_distance(pts.row(i), pts.row(j)))));
  }

  // Logistic regression: separable and shuffled-label fixtures.
  Dense xs(150, 5);
  std::vector<std::uint32_t> ys(150);
  for (std::size_t i = 0; i < 150; ++i) {
    ys[i] = static_cast<std::uint32_t>(i % 5);
    for (std::size_t j = 0; j < 5; ++j) xs(i, j) = 0.3 * normal(rng) + (j == ys[i] ? 4.0 : 0.0);
  }
  const double separable = classify_nodes(xs, ys, 5, 0.8, 1).accuracy;
  double chance = 0.0;
  for (std::uint64_t s = 1; s <= 20; ++s) {
    std::vector<std::uint32_t> shuffled = ys;
    Rng r(Rng::stream(1313, s));
    r.shuffle(shuffled.begin(), shuffled.end());
    chance += classify_nodes(xs, shuffled, 5, 0.8, s).accuracy / 20.0;
  }
  const bool ok = inertia_ok && mds_err < 1e-6 && separable == 100.0 && std::abs(chance - 20.0) <= 5.0;
  report("13", ok,
         fmt("k-means inertia monotone %s; MDS max distance error %.1e; logistic separable %.1f%%, shuffled %.1f%% "
             "(chance 20%%)",
             inertia_ok ? "yes" : "NO", mds_err, separable, chance));
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<void()>>> criteria = {
      {"1", criterion_1},   {"2", criterion_2},   {"3", criterion_3},   {"4", criterion_4},
      {"9", criterion_9},   {"10", criterion_10}, {"11", criterion_11}, {"12", criterion_12},
      {"13", criterion_13}};
  for (const auto& [id, run] : criteria) {
    try {
      run();
    } catch (const std::exception& e) {
      report(id, false, std::string("threw: ") + e.what());
    }
  }
  std::printf("criteria 5-8 and the dataset parts of 1 need CORA/CiteSeer: see acceptance_datasets\n");
  std::printf("%d failure(s)\n", failures);
  return failures == 0 ? 0 : 1;
}
