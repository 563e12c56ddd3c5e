#pragma once

#include <cmath>
#include <cstdio>
#include <cstddef>
#include <ostream>
#include <span>
#include <string>

#include "degwalk/error.hpp"
#include "degwalk/graph.hpp"

// Continuum power-law degree model P(k) = (g-1) kmin^(g-1) k^(-g) on
// [kmin, inf) and the walk budgets it implies.
namespace degwalk::scale_free {

struct Params {
  double gamma = 2.5;
  double k_min = 1.0;
  double n = 1.0;  // node count

  void validate() const {
    if (!(gamma > 1.0)) throw InputError("gamma must be > 1");
    if (!(k_min >= 1.0)) throw InputError("k_min must be >= 1");
    if (!(n >= 1.0)) throw InputError("N must be >= 1");
  }
};

inline double degree_pdf(double k, const Params& p) {
  if (!(p.gamma > 1.0)) throw InputError("gamma must be > 1");
  if (k < p.k_min) throw InputError("k below k_min");
  return (p.gamma - 1.0) * std::pow(p.k_min, p.gamma - 1.0) * std::pow(k, -p.gamma);
}

// Closed-form CDF mass on [k_min, k].
inline double degree_cdf(double k, const Params& p) { return 1.0 - std::pow(p.k_min / k, p.gamma - 1.0); }

inline double expected_max_degree(const Params& p) {
  if (!(p.gamma > 1.0)) throw InputError("gamma must be > 1");
  return p.k_min * std::pow(p.n, 1.0 / (p.gamma - 1.0));
}

struct AvgDegree {
  double value = 0.0;
  bool logarithmic = false;  // gamma == 2 branch
};

// Mean of k over [k_min, k_max] under the (unnormalized-on-this-interval) pdf.
// At gamma == 2 the power antiderivative degenerates to a logarithm.
inline AvgDegree expected_avg_degree(const Params& p, double k_max) {
  if (!(p.gamma > 1.0)) throw InputError("gamma must be > 1");
  const double pref = (p.gamma - 1.0) * std::pow(p.k_min, p.gamma - 1.0);
  if (std::abs(p.gamma - 2.0) < 1e-12) return {pref * std::log(k_max / p.k_min), true};
  const double e = 2.0 - p.gamma;
  return {pref * (std::pow(k_max, e) - std::pow(p.k_min, e)) / e, false};
}

// N -> infinity limit (g-1)/(g-2) kmin; defined for gamma > 2, the usual
// regime being 2 < gamma < 3.
inline double asymptotic_avg_degree(const Params& p) {
  if (!(p.gamma > 2.0)) throw InputError("asymptotic mean degree requires gamma > 2");
  return (p.gamma - 1.0) / (p.gamma - 2.0) * p.k_min;
}

inline bool in_scale_free_regime(const Params& p) { return p.gamma > 2.0 && p.gamma < 3.0; }

// Walks per unit of walks-per-degree implied by the model: N <k>.
inline double model_walks_per_nwpd(const Params& p) {
  return p.n * expected_avg_degree(p, expected_max_degree(p)).value;
}

// Degree-based walk total on a concrete graph: NWPD * N * <k> = NWPD * 2|E|.
inline std::size_t predicted_total_walks(std::size_t walks_per_degree, const Graph& g) {
  return walks_per_degree * g.degree_sum();
}

inline void write_csv_header(std::ostream& out) {
  out << "N,gamma,k_min,k_max_pred,avg_k_finite,avg_k_asymptotic,tnw_per_nwpd,log_form\n";
}

// One analysis row. avg_k_asymptotic is empty outside gamma > 2.
inline void write_csv_row(std::ostream& out, const Params& p) {
  p.validate();
  const double kmax = expected_max_degree(p);
  const AvgDegree avg = expected_avg_degree(p, kmax);
  auto num = [](double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return std::string(buf);
  };
  out << num(p.n) << ',' << num(p.gamma) << ',' << num(p.k_min) << ',' << num(kmax) << ',' << num(avg.value) << ','
      << (p.gamma > 2.0 ? num(asymptotic_avg_degree(p)) : std::string()) << ',' << num(p.n * avg.value) << ','
      << (avg.logarithmic ? 1 : 0) << '\n';
}

}  // namespace degwalk::scale_free
