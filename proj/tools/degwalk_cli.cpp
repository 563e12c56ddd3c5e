// degwalk command-line front end.
//
//   degwalk walk --dataset karate --strategy degree --walks-per-degree 5 --walk-length 10
//   degwalk embed --corpus walks.txt --dim 32 --window 5
//   degwalk eval nc --embedding emb.txt --dataset cora.cites --labels cora.content
//   degwalk eval lp --embedding emb.txt --dataset citeseer.cites --split-seed 1 --op hadamard
//   degwalk bench --plan cora.plan
//   degwalk analyze scalefree --gamma 2.5 --kmin 1 --n 1e3,1e5,1e7
//   degwalk fetch-instructions

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "degwalk/degwalk.hpp"

namespace {

using namespace degwalk;
namespace fs = std::filesystem;

// Output files default into $DEGWALK_OUTPUT_DIR when it is set.
std::string default_output(const std::string& name) {
  if (const char* dir = std::getenv("DEGWALK_OUTPUT_DIR"); dir && *dir) return (fs::path(dir) / name).string();
  return name;
}

std::ofstream open_out(const std::string& path) {
  if (auto parent = fs::path(path).parent_path(); !parent.empty()) fs::create_directories(parent);
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  return out;
}

struct GraphArgs {
  std::string dataset = "karate";
  std::string labels;
  bool lcc = true;
  double split_fraction = 0.0;  // > 0: walk on the link-prediction train graph
  std::uint64_t split_seed = 1;

  void add(CLI::App* app, bool with_split) {
    app->add_option("--dataset", dataset, "karate or an edge-list path")->capture_default_str();
    app->add_option("--labels", labels, "label file (<node> <class> or .content rows)");
    app->add_flag("--lcc,!--no-lcc", lcc, "restrict to the largest connected component")->capture_default_str();
    if (with_split) {
      app->add_option("--link-split", split_fraction, "hold out this edge fraction and walk the remaining graph")
          ->check(CLI::Range(0.0, 0.5));
      app->add_option("--split-seed", split_seed, "seed of the held-out edge split")->capture_default_str();
    }
  }

  Graph load() const {
    if (dataset != "karate" && !fs::exists(dataset)) throw InputError("dataset not found: " + dataset);
    return load_dataset(dataset, labels, lcc);
  }
};

struct WalkArgs {
  std::string strategy = "degree";
  std::size_t walks_per_node = 20;
  std::size_t walks_per_degree = 1;
  std::size_t walk_length = 30;
  double p = 1.0;
  double q = 1.0;
  std::uint64_t seed = 1;

  void add(CLI::App* app) {
    app->add_option("--strategy", strategy)->check(CLI::IsMember({"fixed", "degree"}))->capture_default_str();
    app->add_option("--walks-per-node", walks_per_node)->check(CLI::PositiveNumber)->capture_default_str();
    app->add_option("--walks-per-degree", walks_per_degree)->check(CLI::PositiveNumber)->capture_default_str();
    app->add_option("--walk-length", walk_length, "steps per walk")->check(CLI::PositiveNumber)->capture_default_str();
    app->add_option("--p", p, "return weight")->check(CLI::PositiveNumber)->capture_default_str();
    app->add_option("--q", q, "in-out weight")->check(CLI::PositiveNumber)->capture_default_str();
    app->add_option("--seed", seed)->capture_default_str();
  }

  WalkStrategy to_strategy() const {
    if (strategy == "fixed") return FixedWalks{walks_per_node};
    return DegreeWalks{walks_per_degree};
  }
};

int cmd_walk(const GraphArgs& ga, const WalkArgs& wa, const std::string& out_path, std::size_t threads,
             const std::string& sampler) {
  Graph g = ga.load();
  if (ga.split_fraction > 0.0) g = make_link_split(g, ga.split_fraction, ga.split_seed).train_graph;
  WalkConfig cfg;
  cfg.strategy = wa.to_strategy();
  cfg.walk_length = wa.walk_length;
  cfg.p = wa.p;
  cfg.q = wa.q;
  cfg.seed = wa.seed;
  cfg.threads = threads;
  cfg.sampler = sampler == "rejection" ? SamplerKind::Rejection : SamplerKind::Alias;

  const auto t0 = std::chrono::steady_clock::now();
  const auto corpus = generate_corpus(g, cfg);
  const auto elapsed = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  auto out = open_out(out_path);
  write_corpus(corpus, g.tokens(), out);

  nlohmann::json summary = {{"corpus", out_path},
                            {"nodes", g.num_nodes()},
                            {"edges", g.num_edges()},
                            {"strategy", strategy_label(cfg.strategy)},
                            {"walk_length", cfg.walk_length},
                            {"total_walks", corpus.size()},
                            {"tokens", corpus.token_count()},
                            {"elapsed_ms", elapsed}};
  std::cout << summary.dump() << '\n';
  return 0;
}

int cmd_embed(const std::string& corpus_path, const std::string& out_path, TrainConfig cfg) {
  cfg.validate();
  std::ifstream in(corpus_path);
  if (!in) throw InputError("cannot read corpus: " + corpus_path);
  std::vector<std::string> tokens;
  const auto corpus = read_corpus(in, tokens);
  if (corpus.empty()) throw InputError("empty corpus: " + corpus_path);
  TrainStats stats;
  const auto emb = train(corpus, cfg, tokens.size(), &stats);
  for (std::size_t e = 0; e < stats.epoch_loss.size(); ++e)
    std::cerr << "epoch " << e + 1 << " mean loss " << stats.epoch_loss[e] << '\n';
  auto out = open_out(out_path);
  save_word2vec(emb, tokens, out);
  std::cout << nlohmann::json{{"embedding", out_path}, {"rows", emb.rows}, {"dim", emb.dim}, {"pairs", stats.pairs}}.dump()
            << '\n';
  return 0;
}

// Embedding rows reordered to graph node ids. Graph nodes missing from the
// file keep zero rows and are treated as isolated.
EmbeddingMatrix align_embedding(const LoadedEmbedding& loaded, const Graph& g, std::size_t* missing) {
  EmbeddingMatrix m(g.num_nodes(), loaded.matrix.dim);
  std::vector<bool> seen(g.num_nodes(), false);
  for (std::size_t r = 0; r < loaded.tokens.size(); ++r)
    if (auto id = g.find(loaded.tokens[r])) {
      auto src = loaded.matrix.row(r);
      std::copy(src.begin(), src.end(), m.row(*id).begin());
      seen[*id] = true;
    }
  *missing = 0;
  for (NodeId i = 0; i < g.num_nodes(); ++i) *missing += !seen[i] && g.degree(i) > 0;
  return m;
}

LoadedEmbedding read_embedding(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read embedding: " + path);
  return load_word2vec(in);
}

void emit_report(EvalReport r, const std::string& json_path) {
  EvalReport rows[] = {std::move(r)};
  write_report_csv(rows, std::cout);
  if (!json_path.empty()) open_out(json_path) << to_json(std::span<const EvalReport>(rows)).dump(1) << '\n';
}

int cmd_eval_nc(const GraphArgs& ga, const WalkArgs& wa, const std::string& emb_path, double train_fraction,
                std::uint64_t seed, const std::string& json_path) {
  if (ga.labels.empty() && ga.dataset != "karate") throw InputError("eval nc needs --labels");
  const Graph g = ga.load();
  if (!g.has_labels()) throw InputError("eval nc needs labels");
  std::size_t missing = 0;
  const auto emb = align_embedding(read_embedding(emb_path), g, &missing);
  if (missing) std::cerr << "warning: " << missing << " non-isolated nodes have no embedding row\n";
  const auto res = classify_nodes(emb, g, train_fraction, seed);
  const auto s = wa.to_strategy();
  emit_report(make_report("nc", s, total_walk_count(s, g), wa.walk_length, res.accuracy), json_path);
  return 0;
}

int cmd_eval_lp(const GraphArgs& ga, const WalkArgs& wa, const std::string& emb_path, const std::string& op_name,
                std::uint64_t seed, const std::string& json_path) {
  const EdgeOperator op = parse_edge_operator(op_name);
  const Graph g = ga.load();
  const double fraction = ga.split_fraction > 0.0 ? ga.split_fraction : 0.2;
  const auto split = make_link_split(g, fraction, ga.split_seed);
  std::size_t missing = 0;
  const auto emb = align_embedding(read_embedding(emb_path), split.train_graph, &missing);
  if (missing) std::cerr << "warning: " << missing << " non-isolated nodes have no embedding row\n";
  const auto res = predict_links(emb, split, op, seed);
  const auto s = wa.to_strategy();
  EvalReport r = make_report("lp", s, total_walk_count(s, split.train_graph), wa.walk_length, res.accuracy);
  r.op = to_string(op);
  r.auc = res.auc;
  emit_report(std::move(r), json_path);
  return 0;
}

int cmd_bench(const std::string& plan_path, std::optional<std::size_t> workers, const std::string& output) {
  auto plan = load_plan(plan_path);
  if (workers) plan.workers = *workers;
  if (!output.empty()) plan.output = output;
  else if (const char* dir = std::getenv("DEGWALK_OUTPUT_DIR"); dir && *dir && fs::path(plan.output).is_relative())
    plan.output = (fs::path(dir) / plan.output).string();
  const auto summary = run_bench(plan);
  std::cout << nlohmann::json{{"output", plan.output},
                              {"cells", summary.cells},
                              {"computed", summary.computed},
                              {"failed", summary.failed}}
                   .dump()
            << '\n';
  return 0;
}

int cmd_analyze_scalefree(const std::vector<double>& gammas, const std::vector<double>& kmins,
                          const std::vector<double>& ns) {
  std::ostringstream out;
  scale_free::write_csv_header(out);
  for (double g : gammas)
    for (double k : kmins)
      for (double n : ns) scale_free::write_csv_row(out, {g, k, n});
  std::cout << out.str();
  return 0;
}

int cmd_fetch_instructions() {
  std::cout << R"(degwalk does not download datasets. Fetch the LINQS citation datasets
(cora.tgz, citeseer.tgz) and unpack them as:

  $DEGWALK_DATA_DIR/cora/cora.cites          5,429 lines, 2 tokens each
  $DEGWALK_DATA_DIR/cora/cora.content        2,708 rows, 7 classes (last field)
  $DEGWALK_DATA_DIR/citeseer/citeseer.cites  4,732 lines, 2 tokens each
  $DEGWALK_DATA_DIR/citeseer/citeseer.content 3,312 rows, 6 classes (last field)

Fingerprints to check after loading (degwalk info --dataset <cites>):
  cora      full graph 2,708 nodes; largest component 2,485 nodes, degree sum 10,138
  citeseer  full graph 3,327 nodes; largest component 2,110 nodes, degree sum 7,388

Verify file integrity with `sha256sum` against the checksums published with
the archive you downloaded.
)";
  return 0;
}

int cmd_info(const GraphArgs& ga) {
  LoadStats stats;
  Graph g;
  if (ga.dataset == "karate") {
    g = karate_club();
  } else {
    g = load_edge_list(ga.dataset, {}, &stats);
    if (!ga.labels.empty()) g = load_labels(ga.labels, std::move(g));
  }
  if (ga.lcc) g = largest_connected_component(g).graph;
  auto j = summary_json(g);
  j["edge_lines"] = stats.edges_read;
  j["self_loops_dropped"] = stats.self_loops_dropped;
  j["duplicates_dropped"] = stats.duplicates_dropped;
  std::cout << j.dump() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Degree-proportional random-walk embeddings and benchmarks"};
  app.require_subcommand(1);

  GraphArgs walk_graph;
  WalkArgs walk_args;
  std::string corpus_out = default_output("corpus.txt");
  std::size_t walk_threads = 1;
  std::string sampler = "alias";
  auto* walk = app.add_subcommand("walk", "generate a random-walk corpus");
  walk_graph.add(walk, true);
  walk_args.add(walk);
  walk->add_option("-o,--output", corpus_out)->capture_default_str();
  walk->add_option("--threads", walk_threads, "0 = all cores; output is identical for any value")->capture_default_str();
  walk->add_option("--sampler", sampler)->check(CLI::IsMember({"alias", "rejection"}))->capture_default_str();

  std::string corpus_in, emb_out = default_output("embedding.txt");
  TrainConfig tc;
  bool no_shrink = false;
  auto* embed = app.add_subcommand("embed", "train skip-gram embeddings on a corpus");
  embed->add_option("--corpus", corpus_in)->required();
  embed->add_option("-o,--output", emb_out)->capture_default_str();
  embed->add_option("--dim", tc.dim)->check(CLI::PositiveNumber)->capture_default_str();
  embed->add_option("--window", tc.window)->check(CLI::PositiveNumber)->capture_default_str();
  embed->add_option("--negatives", tc.negatives)->check(CLI::PositiveNumber)->capture_default_str();
  embed->add_option("--epochs", tc.epochs)->check(CLI::PositiveNumber)->capture_default_str();
  embed->add_option("--lr", tc.learning_rate)->check(CLI::PositiveNumber)->capture_default_str();
  embed->add_option("--lr-floor", tc.lr_floor)->check(CLI::PositiveNumber)->capture_default_str();
  embed->add_option("--seed", tc.seed)->capture_default_str();
  embed->add_option("--threads", tc.threads, ">1 trains in parallel (nondeterministic)")->capture_default_str();
  embed->add_flag("--no-shrink", no_shrink, "use the full window at every position");

  auto* eval = app.add_subcommand("eval", "evaluate an embedding");
  eval->require_subcommand(1);
  GraphArgs eval_graph;
  WalkArgs eval_walk;
  std::string eval_emb, eval_json, op_name = "hadamard";
  double train_fraction = 0.8;
  std::uint64_t eval_seed = 1;
  auto* nc = eval->add_subcommand("nc", "node classification");
  auto* lp = eval->add_subcommand("lp", "link prediction");
  for (auto* sub : {nc, lp}) {
    eval_graph.add(sub, sub == lp);
    eval_walk.add(sub);
    sub->add_option("--embedding", eval_emb)->required();
    sub->add_option("--json", eval_json, "also write the report as JSON");
    sub->add_option("--eval-seed", eval_seed)->capture_default_str();
  }
  nc->add_option("--train-fraction", train_fraction)->check(CLI::Range(0.0, 1.0))->capture_default_str();
  lp->add_option("--op", op_name)->check(CLI::IsMember({"hadamard", "average", "l1", "l2"}))->capture_default_str();

  std::string plan_path, bench_out;
  std::optional<std::size_t> bench_workers;
  auto* bench = app.add_subcommand("bench", "run a benchmark plan");
  bench->add_option("--plan", plan_path)->required();
  bench->add_option("--workers", bench_workers, "parallel grid cells");
  bench->add_option("--output", bench_out, "override the plan's output directory");

  auto* analyze = app.add_subcommand("analyze", "analytic models");
  analyze->require_subcommand(1);
  std::vector<double> gammas{2.5}, kmins{1.0}, ns{1e3, 1e5, 1e7};
  auto* sf = analyze->add_subcommand("scalefree", "power-law degree model CSV");
  sf->add_option("--gamma", gammas)->delimiter(',')->check(CLI::Range(1.0, 1e9).description("> 1"));
  sf->add_option("--kmin", kmins)->delimiter(',')->check(CLI::Range(1.0, 1e300));
  sf->add_option("--n", ns)->delimiter(',')->check(CLI::Range(1.0, 1e300));

  auto* fetch = app.add_subcommand("fetch-instructions", "describe the expected dataset layout");

  GraphArgs info_graph;
  auto* info = app.add_subcommand("info", "graph summary as JSON");
  info_graph.add(info, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*walk) return cmd_walk(walk_graph, walk_args, corpus_out, walk_threads, sampler);
    if (*embed) {
      tc.shrink_window = !no_shrink;
      return cmd_embed(corpus_in, emb_out, tc);
    }
    if (*nc) return cmd_eval_nc(eval_graph, eval_walk, eval_emb, train_fraction, eval_seed, eval_json);
    if (*lp) return cmd_eval_lp(eval_graph, eval_walk, eval_emb, op_name, eval_seed, eval_json);
    if (*bench) return cmd_bench(plan_path, bench_workers, bench_out);
    if (*sf) {
      for (double g : gammas)
        if (!(g > 1.0)) throw InputError("gamma must be > 1");
      return cmd_analyze_scalefree(gammas, kmins, ns);
    }
    if (*fetch) return cmd_fetch_instructions();
    if (*info) return cmd_info(info_graph);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
