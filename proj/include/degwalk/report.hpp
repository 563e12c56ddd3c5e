#pragma once

#include <cmath>
#include <cstddef>
#include <cstdio>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "degwalk/walk.hpp"

namespace degwalk {

// One row of a fixed-vs-degree comparison table.
struct EvalReport {
  std::string task;      // "nc" or "lp"
  std::string strategy;  // "fixed" or "degree"
  std::size_t multiplier = 0;
  std::string op;        // edge operator for lp, empty for nc
  std::size_t total_walks = 0;
  std::size_t walk_length = 0;
  double accuracy = 0.0;  // percent
  std::optional<double> auc;
  std::optional<double> decrease_pct;
  std::optional<double> gain;
};

inline double round_to(double x, int decimals) {
  const double s = std::pow(10.0, decimals);
  return std::round(x * s) / s;
}

// decrease_pct = 100 (1 - TNW / TNW_fixed); gain = accuracy - accuracy_fixed.
// Each row is compared with the fixed-strategy row of the same task and walk
// length; the baseline row itself gets no values.
inline void apply_baseline(std::span<EvalReport> rows) {
  for (auto& r : rows) {
    r.decrease_pct.reset();
    r.gain.reset();
    if (r.strategy == "fixed") continue;
    for (const auto& b : rows)
      if (b.strategy == "fixed" && b.task == r.task && b.op == r.op && b.walk_length == r.walk_length &&
          b.total_walks > 0) {
        r.decrease_pct = 100.0 * (1.0 - static_cast<double>(r.total_walks) / static_cast<double>(b.total_walks));
        r.gain = r.accuracy - b.accuracy;
        break;
      }
  }
}

namespace detail {
inline std::string fmt(double x, int decimals) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, x);
  std::string s(buf);
  return s == "-0.0000" ? "0.0000" : s;
}
}  // namespace detail

inline void write_report_csv(std::span<const EvalReport> rows, std::ostream& out) {
  out << "strategy,nwpd_or_fixed,walk_length,total_walks,decrease_pct,accuracy,gain\n";
  for (const auto& r : rows) {
    out << r.strategy << ',' << r.multiplier << ',' << r.walk_length << ',' << r.total_walks << ','
        << (r.decrease_pct ? detail::fmt(*r.decrease_pct, 4) : "") << ',' << detail::fmt(r.accuracy, 4) << ','
        << (r.gain ? detail::fmt(*r.gain, 4) : "") << '\n';
  }
}

inline nlohmann::json to_json(const EvalReport& r) {
  nlohmann::json j = {{"task", r.task},
                      {"strategy", r.strategy},
                      {"nwpd_or_fixed", r.multiplier},
                      {"total_walks", r.total_walks},
                      {"walk_length", r.walk_length},
                      {"accuracy", r.accuracy},
                      {"decrease_pct", nullptr},
                      {"gain", nullptr}};
  if (!r.op.empty()) j["operator"] = r.op;
  if (r.auc) j["auc"] = *r.auc;
  if (r.decrease_pct) j["decrease_pct"] = *r.decrease_pct;
  if (r.gain) j["gain"] = *r.gain;
  return j;
}

inline nlohmann::json to_json(std::span<const EvalReport> rows) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : rows) arr.push_back(to_json(r));
  return arr;
}

inline EvalReport make_report(std::string task, const WalkStrategy& s, std::size_t total_walks,
                              std::size_t walk_length, double accuracy) {
  EvalReport r;
  r.task = std::move(task);
  r.strategy = strategy_name(s);
  r.multiplier = strategy_multiplier(s);
  r.total_walks = total_walks;
  r.walk_length = walk_length;
  r.accuracy = accuracy;
  return r;
}

}  // namespace degwalk
