#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "degwalk/embedding.hpp"
#include "degwalk/error.hpp"
#include "degwalk/evaluation.hpp"
#include "degwalk/graph.hpp"
#include "degwalk/report.hpp"
#include "degwalk/walk.hpp"

namespace degwalk {

struct BenchmarkPlan {
  std::string dataset = "karate";  // "karate" or an edge-list path
  std::string labels;              // label file; unused for karate
  bool use_lcc = true;
  std::vector<WalkStrategy> strategies;
  std::vector<std::size_t> walk_lengths;
  std::vector<std::string> tasks = {"nc"};  // nc, lp, cd
  std::vector<std::uint64_t> seeds;
  std::string output = "bench_out";
  double p = 1.0;
  double q = 1.0;
  TrainConfig train;
  double train_fraction = 0.8;  // nc
  double test_fraction = 0.2;   // lp
  EdgeOperator op = EdgeOperator::Hadamard;
  std::size_t workers = 1;

  void validate() const {
    if (strategies.empty()) throw InputError("plan: strategies is empty");
    if (walk_lengths.empty()) throw InputError("plan: walk_lengths is empty");
    if (seeds.empty()) throw InputError("plan: seeds is empty");
    if (tasks.empty()) throw InputError("plan: tasks is empty");
    for (const auto& s : strategies) degwalk::validate(s);
    for (auto wl : walk_lengths)
      if (wl < 1) throw InputError("plan: walk length must be >= 1");
    for (const auto& t : tasks)
      if (t != "nc" && t != "lp" && t != "cd") throw InputError("plan: unknown task " + t);
    if (!(p > 0) || !(q > 0)) throw InputError("plan: p and q must be positive");
    TrainConfig tc = train;
    tc.validate();
  }
};

// "fixed:20" or "degree:3"
inline WalkStrategy parse_strategy(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw InputError("strategy must look like fixed:N or degree:N: " + text);
  const std::string kind = text.substr(0, colon);
  std::size_t n = 0;
  try {
    n = std::stoul(text.substr(colon + 1));
  } catch (const std::exception&) {
    throw InputError("bad strategy multiplier: " + text);
  }
  if (kind == "fixed") return FixedWalks{n};
  if (kind == "degree") return DegreeWalks{n};
  throw InputError("unknown strategy kind: " + kind);
}

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

inline std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(v);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

inline bool parse_bool(const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw InputError("plan: bad boolean " + v);
}

}  // namespace detail

// Flat `key = value` lines; lists are comma separated; '#' starts a comment.
inline BenchmarkPlan parse_plan(std::istream& in) {
  BenchmarkPlan plan;
  plan.train.dim = 128;
  std::string line;
  std::size_t lineno = 0;
  auto num = [&](const std::string& v) {
    try {
      std::size_t used = 0;
      double d = std::stod(v, &used);
      if (used != v.size()) throw std::invalid_argument(v);
      return d;
    } catch (const std::exception&) {
      throw InputError("plan line " + std::to_string(lineno) + ": not a number: " + v);
    }
  };
  auto count = [&](const std::string& v) {
    const double d = num(v);
    if (d < 0 || d != std::floor(d)) throw InputError("plan line " + std::to_string(lineno) + ": not a count: " + v);
    return static_cast<std::size_t>(d);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw InputError("plan line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    const auto list = detail::split_list(value);

    if (key == "dataset") plan.dataset = value;
    else if (key == "labels") plan.labels = value;
    else if (key == "use_lcc") plan.use_lcc = detail::parse_bool(value);
    else if (key == "strategies") {
      plan.strategies.clear();
      for (const auto& s : list) plan.strategies.push_back(parse_strategy(s));
    } else if (key == "walk_lengths") {
      plan.walk_lengths.clear();
      for (const auto& s : list) plan.walk_lengths.push_back(count(s));
    } else if (key == "tasks") plan.tasks = list;
    else if (key == "seeds") {
      plan.seeds.clear();
      for (const auto& s : list) plan.seeds.push_back(count(s));
    } else if (key == "output") plan.output = value;
    else if (key == "p") plan.p = num(value);
    else if (key == "q") plan.q = num(value);
    else if (key == "dim") plan.train.dim = count(value);
    else if (key == "window") plan.train.window = count(value);
    else if (key == "negatives") plan.train.negatives = count(value);
    else if (key == "epochs") plan.train.epochs = count(value);
    else if (key == "lr") plan.train.learning_rate = num(value);
    else if (key == "lr_floor") plan.train.lr_floor = num(value);
    else if (key == "shrink_window") plan.train.shrink_window = detail::parse_bool(value);
    else if (key == "train_fraction") plan.train_fraction = num(value);
    else if (key == "test_fraction") plan.test_fraction = num(value);
    else if (key == "operator") plan.op = parse_edge_operator(value);
    else if (key == "workers") plan.workers = count(value);
    else throw InputError("plan line " + std::to_string(lineno) + ": unknown key " + key);
  }
  plan.validate();
  return plan;
}

inline BenchmarkPlan load_plan(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read plan: " + path);
  return parse_plan(in);
}

// Graph named by a plan: builtin karate or an edge list (+ labels), reduced
// to its largest component when requested.
inline Graph load_dataset(const std::string& dataset, const std::string& labels, bool use_lcc) {
  Graph g;
  if (dataset == "karate") {
    g = karate_club();
  } else {
    g = load_edge_list(dataset);
    if (!labels.empty()) g = load_labels(labels, std::move(g));
  }
  if (use_lcc) g = largest_connected_component(g).graph;
  return g;
}

struct CellKey {
  std::string task;
  WalkStrategy strategy;
  std::size_t walk_length;
  std::uint64_t seed;

  std::string id() const {
    return task + "_" + strategy_name(strategy) + "-" + std::to_string(strategy_multiplier(strategy)) + "_wl" +
           std::to_string(walk_length) + "_s" + std::to_string(seed);
  }
};

struct CellResult {
  std::string status = "ok";  // ok | failed
  std::string error;
  std::size_t total_walks = 0;
  double accuracy = 0.0;  // percent
  std::optional<double> auc;
  double walk_ms = 0.0;
  double train_ms = 0.0;
  double eval_ms = 0.0;
};

inline nlohmann::json to_json(const CellResult& r) {
  nlohmann::json j = {{"status", r.status},     {"error", r.error},       {"total_walks", r.total_walks},
                      {"accuracy", r.accuracy}, {"walk_ms", r.walk_ms},   {"train_ms", r.train_ms},
                      {"eval_ms", r.eval_ms},   {"auc", nullptr}};
  if (r.auc) j["auc"] = *r.auc;
  return j;
}

inline CellResult cell_from_json(const nlohmann::json& j) {
  CellResult r;
  r.status = j.at("status");
  r.error = j.at("error");
  r.total_walks = j.at("total_walks");
  r.accuracy = j.at("accuracy");
  r.walk_ms = j.at("walk_ms");
  r.train_ms = j.at("train_ms");
  r.eval_ms = j.at("eval_ms");
  if (!j.at("auc").is_null()) r.auc = j.at("auc").get<double>();
  return r;
}

// Corpus -> embedding -> metric for one grid cell. Training is single-threaded.
inline CellResult run_cell(const Graph& g, const BenchmarkPlan& plan, const CellKey& key) {
  using clock = std::chrono::steady_clock;
  auto ms = [](clock::duration d) { return std::chrono::duration<double, std::milli>(d).count(); };
  CellResult r;
  try {
    WalkConfig wc;
    wc.strategy = key.strategy;
    wc.walk_length = key.walk_length;
    wc.p = plan.p;
    wc.q = plan.q;
    wc.seed = key.seed;
    TrainConfig tc = plan.train;
    tc.seed = key.seed;
    tc.threads = 1;

    std::optional<LinkSplit> split;
    if (key.task == "lp") split = make_link_split(g, plan.test_fraction, key.seed);
    const Graph& walk_graph = split ? split->train_graph : g;

    auto t0 = clock::now();
    const auto corpus = generate_corpus(walk_graph, wc);
    auto t1 = clock::now();
    const auto emb = train(corpus, tc, walk_graph.num_nodes());
    auto t2 = clock::now();
    r.total_walks = corpus.size();
    if (key.task == "nc") {
      r.accuracy = classify_nodes(emb, g, plan.train_fraction, key.seed).accuracy;
    } else if (key.task == "lp") {
      const auto lr = predict_links(emb, *split, plan.op, key.seed);
      r.accuracy = lr.accuracy;
      r.auc = lr.auc;
    } else {
      const auto cr = recover_communities(emb, g, key.seed);
      r.accuracy = 100.0 * static_cast<double>(cr.correct) / static_cast<double>(cr.total);
    }
    auto t3 = clock::now();
    r.walk_ms = ms(t1 - t0);
    r.train_ms = ms(t2 - t1);
    r.eval_ms = ms(t3 - t2);
  } catch (const std::exception& e) {
    r.status = "failed";
    r.error = e.what();
  }
  return r;
}

struct BenchSummary {
  std::size_t cells = 0;
  std::size_t computed = 0;  // cells run in this invocation
  std::size_t failed = 0;
  std::vector<EvalReport> rows;
};

// Runs (or resumes) the full task x strategy x walk length x seed grid.
// Each finished cell leaves cells/<id>.json; existing markers are reused.
//
// Outputs in plan.output:
//   table_<task>.csv  mean accuracy per (strategy, walk length) with
//                     decrease_pct and gain against the fixed row
//   sweep_<task>.csv  walk_length, strategy, nwpd_or_fixed, mean, stddev, n
//   cells.csv         one line per cell with status
//   timings.csv       wall-clock per stage per cell
//   report.json       the table rows as EvalReport objects
inline BenchSummary run_bench(const BenchmarkPlan& plan) {
  plan.validate();
  namespace fs = std::filesystem;
  const fs::path out(plan.output);
  fs::create_directories(out / "cells");
  const Graph g = load_dataset(plan.dataset, plan.labels, plan.use_lcc);

  std::vector<CellKey> keys;
  for (const auto& task : plan.tasks)
    for (const auto& s : plan.strategies)
      for (auto wl : plan.walk_lengths)
        for (auto seed : plan.seeds) keys.push_back({task, s, wl, seed});

  BenchSummary summary;
  summary.cells = keys.size();
  std::vector<CellResult> results(keys.size());
  std::atomic<std::size_t> computed{0};
  parallel_for(keys.size(), plan.workers, [&](std::size_t i) {
    const fs::path marker = out / "cells" / (keys[i].id() + ".json");
    if (std::ifstream in(marker); in) {
      try {
        results[i] = cell_from_json(nlohmann::json::parse(in));
        return;
      } catch (const std::exception&) {
        // Unreadable marker: recompute.
      }
    }
    results[i] = run_cell(g, plan, keys[i]);
    ++computed;
    const fs::path tmp = marker.string() + ".tmp";
    {
      std::ofstream o(tmp);
      o << to_json(results[i]).dump(1) << '\n';
    }
    fs::rename(tmp, marker);
  });
  summary.computed = computed;

  std::ofstream cells(out / "cells.csv"), timings(out / "timings.csv");
  cells << "task,strategy,nwpd_or_fixed,walk_length,seed,status,total_walks,accuracy,auc,error\n";
  timings << "task,strategy,nwpd_or_fixed,walk_length,seed,walk_ms,train_ms,eval_ms\n";
  for (std::size_t i = 0; i < keys.size(); ++i) {
    const auto& k = keys[i];
    const auto& r = results[i];
    summary.failed += r.status != "ok";
    std::string err = r.error;
    for (char& c : err)
      if (c == ',' || c == '\n') c = ';';
    cells << k.task << ',' << strategy_name(k.strategy) << ',' << strategy_multiplier(k.strategy) << ','
          << k.walk_length << ',' << k.seed << ',' << r.status << ',' << r.total_walks << ','
          << detail::fmt(r.accuracy, 4) << ',' << (r.auc ? detail::fmt(*r.auc, 6) : "") << ',' << err << '\n';
    timings << k.task << ',' << strategy_name(k.strategy) << ',' << strategy_multiplier(k.strategy) << ','
            << k.walk_length << ',' << k.seed << ',' << detail::fmt(r.walk_ms, 3) << ',' << detail::fmt(r.train_ms, 3)
            << ',' << detail::fmt(r.eval_ms, 3) << '\n';
  }

  for (const auto& task : plan.tasks) {
    std::vector<EvalReport> rows;
    std::ofstream sweep(out / ("sweep_" + task + ".csv"));
    sweep << "walk_length,strategy,nwpd_or_fixed,mean_accuracy,stddev,n\n";
    for (auto wl : plan.walk_lengths)
      for (const auto& s : plan.strategies) {
        std::vector<double> acc, auc;
        std::size_t walks = 0;
        for (std::size_t i = 0; i < keys.size(); ++i) {
          const auto& k = keys[i];
          if (k.task != task || k.walk_length != wl || k.strategy != s || results[i].status != "ok") continue;
          acc.push_back(results[i].accuracy);
          if (results[i].auc) auc.push_back(*results[i].auc);
          walks = results[i].total_walks;
        }
        if (acc.empty()) continue;
        double mean = 0.0, var = 0.0;
        for (double a : acc) mean += a;
        mean /= static_cast<double>(acc.size());
        for (double a : acc) var += (a - mean) * (a - mean);
        const double sd = acc.size() > 1 ? std::sqrt(var / static_cast<double>(acc.size() - 1)) : 0.0;
        sweep << wl << ',' << strategy_name(s) << ',' << strategy_multiplier(s) << ',' << detail::fmt(mean, 4) << ','
              << detail::fmt(sd, 4) << ',' << acc.size() << '\n';
        EvalReport r = make_report(task, s, walks, wl, round_to(mean, 4));
        if (task == "lp") r.op = to_string(plan.op);
        if (!auc.empty()) {
          double m = 0.0;
          for (double a : auc) m += a;
          r.auc = m / static_cast<double>(auc.size());
        }
        rows.push_back(r);
      }
    apply_baseline(rows);
    std::ofstream table(out / ("table_" + task + ".csv"));
    write_report_csv(rows, table);
    summary.rows.insert(summary.rows.end(), rows.begin(), rows.end());
  }
  std::ofstream(out / "report.json") << to_json(std::span<const EvalReport>(summary.rows)).dump(1) << '\n';
  return summary;
}

}  // namespace degwalk
