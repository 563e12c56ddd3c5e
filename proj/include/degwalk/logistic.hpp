#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <span>
#include <vector>

#include "degwalk/error.hpp"
#include "degwalk/matrix.hpp"
#include "degwalk/rng.hpp"

namespace degwalk {

inline constexpr double kDefaultCGrid[] = {0.01, 0.1, 1.0, 10.0, 100.0};

struct LogisticOptions {
  double grad_tol = 1e-5;
  std::size_t max_iter = 2000;
  std::size_t history = 10;  // L-BFGS memory
};

// Multinomial logistic regression, softmax over `classes` outputs with an
// unpenalized intercept. Weights are stored per class as [w_0..w_{d-1}, b].
class LogisticModel {
 public:
  LogisticModel() = default;
  LogisticModel(std::size_t classes, std::size_t dim) : classes_(classes), dim_(dim), theta_(classes * (dim + 1), 0.0) {}

  std::size_t classes() const noexcept { return classes_; }
  std::size_t dim() const noexcept { return dim_; }
  std::span<double> parameters() noexcept { return theta_; }
  std::span<const double> parameters() const noexcept { return theta_; }
  std::size_t iterations = 0;
  double final_grad_norm = 0.0;

  void scores(std::span<const double> x, std::span<double> z) const noexcept {
    for (std::size_t c = 0; c < classes_; ++c) {
      const double* w = theta_.data() + c * (dim_ + 1);
      double s = w[dim_];
      for (std::size_t j = 0; j < dim_; ++j) s += w[j] * x[j];
      z[c] = s;
    }
  }

  std::vector<double> predict_proba(std::span<const double> x) const {
    std::vector<double> z(classes_);
    scores(x, z);
    softmax(z);
    return z;
  }

  std::uint32_t predict(std::span<const double> x) const {
    std::vector<double> z(classes_);
    scores(x, z);
    return static_cast<std::uint32_t>(std::max_element(z.begin(), z.end()) - z.begin());
  }

  static void softmax(std::span<double> z) noexcept {
    const double m = *std::max_element(z.begin(), z.end());
    double total = 0.0;
    for (double& v : z) total += (v = std::exp(v - m));
    for (double& v : z) v /= total;
  }

 private:
  std::size_t classes_ = 0;
  std::size_t dim_ = 0;
  std::vector<double> theta_;
};

// Mean cross-entropy plus ||W||^2 / (2 C n), and its gradient.
inline double logistic_objective(const LogisticModel& model, const Dense& x, std::span<const std::uint32_t> y,
                                 double c, std::span<double> grad) {
  const std::size_t n = x.rows, d = model.dim(), k = model.classes();
  const auto theta = model.parameters();
  std::fill(grad.begin(), grad.end(), 0.0);
  std::vector<double> z(k);
  double loss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto xi = x.row(i);
    model.scores(xi, z);
    const double m = *std::max_element(z.begin(), z.end());
    double total = 0.0;
    for (double v : z) total += std::exp(v - m);
    loss += m + std::log(total) - z[y[i]];
    for (std::size_t cl = 0; cl < k; ++cl) {
      const double r = std::exp(z[cl] - m) / total - (cl == y[i] ? 1.0 : 0.0);
      double* g = grad.data() + cl * (d + 1);
      for (std::size_t j = 0; j < d; ++j) g[j] += r * xi[j];
      g[d] += r;
    }
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  const double reg = 1.0 / (c * static_cast<double>(n));
  loss *= inv_n;
  for (std::size_t cl = 0; cl < k; ++cl) {
    double* g = grad.data() + cl * (d + 1);
    const double* w = theta.data() + cl * (d + 1);
    for (std::size_t j = 0; j < d; ++j) {
      g[j] = g[j] * inv_n + reg * w[j];
      loss += 0.5 * reg * w[j] * w[j];
    }
    g[d] *= inv_n;
  }
  return loss;
}

// Full-batch L-BFGS with Armijo backtracking, from zero weights, until the
// gradient 2-norm drops below grad_tol or max_iter is reached.
inline LogisticModel fit_logistic(const Dense& x, std::span<const std::uint32_t> y, std::size_t classes, double c,
                                  const LogisticOptions& opts = {}) {
  if (x.rows == 0) throw InputError("logistic regression needs training rows");
  if (y.size() != x.rows) throw InputError("label count does not match feature rows");
  LogisticModel model(classes, x.cols);
  const std::size_t p = model.parameters().size();
  std::vector<double> g(p), g_new(p), dir(p), theta_old(p);
  struct Pair {
    std::vector<double> s, y;
    double rho;
  };
  std::deque<Pair> mem;
  std::vector<double> alpha(opts.history);

  double f = logistic_objective(model, x, y, c, g);
  auto norm = [](std::span<const double> v) { return std::sqrt(dot(v, v)); };
  std::size_t iter = 0;
  for (; iter < opts.max_iter && norm(g) >= opts.grad_tol; ++iter) {
    // Two-loop recursion.
    for (std::size_t i = 0; i < p; ++i) dir[i] = -g[i];
    for (std::size_t m = mem.size(); m-- > 0;) {
      alpha[m] = mem[m].rho * dot(mem[m].s, dir);
      for (std::size_t i = 0; i < p; ++i) dir[i] -= alpha[m] * mem[m].y[i];
    }
    if (!mem.empty()) {
      const auto& last = mem.back();
      const double scale = dot(last.s, last.y) / dot(last.y, last.y);
      for (double& v : dir) v *= scale;
    } else {
      const double gn = norm(g);
      for (double& v : dir) v /= std::max(1.0, gn);
    }
    for (std::size_t m = 0; m < mem.size(); ++m) {
      const double beta = mem[m].rho * dot(mem[m].y, dir);
      for (std::size_t i = 0; i < p; ++i) dir[i] += (alpha[m] - beta) * mem[m].s[i];
    }
    double slope = dot(g, dir);
    if (slope >= 0.0) {
      // Not a descent direction; restart from steepest descent.
      mem.clear();
      for (std::size_t i = 0; i < p; ++i) dir[i] = -g[i];
      slope = dot(g, dir);
    }

    auto theta = model.parameters();
    std::copy(theta.begin(), theta.end(), theta_old.begin());
    double step = 1.0, f_new = f;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      for (std::size_t i = 0; i < p; ++i) theta[i] = theta_old[i] + step * dir[i];
      f_new = logistic_objective(model, x, y, c, g_new);
      if (f_new <= f + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      std::copy(theta_old.begin(), theta_old.end(), theta.begin());
      break;
    }

    Pair pr{std::vector<double>(p), std::vector<double>(p), 0.0};
    for (std::size_t i = 0; i < p; ++i) {
      pr.s[i] = theta[i] - theta_old[i];
      pr.y[i] = g_new[i] - g[i];
    }
    const double sy = dot(pr.s, pr.y);
    if (sy > 1e-16) {
      pr.rho = 1.0 / sy;
      mem.push_back(std::move(pr));
      if (mem.size() > opts.history) mem.pop_front();
    }
    g.swap(g_new);
    f = f_new;
  }
  model.iterations = iter;
  model.final_grad_norm = norm(g);
  return model;
}

inline double accuracy(const LogisticModel& model, const Dense& x, std::span<const std::uint32_t> y) {
  if (x.rows == 0) throw InputError("accuracy of an empty set");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < x.rows; ++i) hits += model.predict(x.row(i)) == y[i];
  return static_cast<double>(hits) / static_cast<double>(x.rows);
}

inline Dense select_rows(const Dense& x, std::span<const std::size_t> rows) {
  Dense out(rows.size(), x.cols);
  for (std::size_t i = 0; i < rows.size(); ++i) std::copy_n(x.row(rows[i]).begin(), x.cols, out.row(i).begin());
  return out;
}

// Stratified fold id per row: each class is shuffled and dealt round-robin.
inline std::vector<std::size_t> stratified_folds(std::span<const std::uint32_t> y, std::size_t classes,
                                                 std::size_t folds, Rng& rng) {
  std::vector<std::size_t> fold(y.size());
  std::size_t offset = 0;
  for (std::size_t c = 0; c < classes; ++c) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < y.size(); ++i)
      if (y[i] == c) members.push_back(i);
    rng.shuffle(members.begin(), members.end());
    // Continue dealing where the previous class stopped to balance fold sizes.
    for (std::size_t j = 0; j < members.size(); ++j) fold[members[j]] = (offset + j) % folds;
    offset += members.size();
  }
  return fold;
}

struct CvFit {
  LogisticModel model;
  double c = 1.0;
  std::vector<double> cv_accuracy;  // per grid value
};

// Picks C from `grid` by k-fold stratified cross-validated accuracy (first
// best wins), then refits on all rows.
inline CvFit fit_logistic_cv(const Dense& x, std::span<const std::uint32_t> y, std::size_t classes,
                             std::span<const double> grid, std::uint64_t seed, std::size_t folds = 5,
                             const LogisticOptions& opts = {}) {
  Rng rng(Rng::stream(seed, 0x6376));
  const auto fold = stratified_folds(y, classes, folds, rng);
  CvFit out;
  double best = -1.0;
  for (double c : grid) {
    double hits = 0.0, total = 0.0;
    for (std::size_t f = 0; f < folds; ++f) {
      std::vector<std::size_t> train, test;
      for (std::size_t i = 0; i < y.size(); ++i) (fold[i] == f ? test : train).push_back(i);
      if (train.empty() || test.empty()) continue;
      std::vector<std::uint32_t> ytr, yte;
      for (auto i : train) ytr.push_back(y[i]);
      for (auto i : test) yte.push_back(y[i]);
      const Dense xte = select_rows(x, test);
      const auto model = fit_logistic(select_rows(x, train), ytr, classes, c, opts);
      hits += accuracy(model, xte, yte) * static_cast<double>(test.size());
      total += static_cast<double>(test.size());
    }
    const double acc = total > 0 ? hits / total : 0.0;
    out.cv_accuracy.push_back(acc);
    if (acc > best) {
      best = acc;
      out.c = c;
    }
  }
  out.model = fit_logistic(x, y, classes, out.c, opts);
  return out;
}

}  // namespace degwalk
