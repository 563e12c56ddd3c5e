#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "degwalk/error.hpp"
#include "degwalk/matrix.hpp"
#include "degwalk/rng.hpp"

namespace degwalk {

struct MdsResult {
  Dense coords;                     // rows x 2
  double eigenvalues[2] = {0.0, 0.0};
  bool degenerate = false;          // all points coincide
};

// Classical (Torgerson) MDS to two dimensions: double-center the squared
// Euclidean distance matrix, take its top two eigenpairs by power iteration
// with deflation, and scale each eigenvector by sqrt(eigenvalue).
inline MdsResult reduce_2d(const Dense& points, std::uint64_t seed = 1) {
  const std::size_t n = points.rows;
  if (n < 3) throw InputError("reduce_2d needs at least 3 points");

  Dense b(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) b(i, j) = b(j, i) = squared_distance(points.row(i), points.row(j));
  std::vector<double> row_mean(n, 0.0);
  double grand = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) row_mean[i] += b(i, j);
    grand += row_mean[i];
    row_mean[i] /= static_cast<double>(n);
  }
  grand /= static_cast<double>(n * n);
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      b(i, j) = -0.5 * (b(i, j) - row_mean[i] - row_mean[j] + grand);
      scale = std::max(scale, std::abs(b(i, j)));
    }

  MdsResult out;
  out.coords = Dense(n, 2);
  if (scale == 0.0) {
    out.degenerate = true;
    return out;
  }

  Rng rng(Rng::stream(seed, 0x6d6473));
  std::vector<double> x(n), y(n);
  for (int comp = 0; comp < 2; ++comp) {
    for (double& v : x) v = rng.uniform() - 0.5;
    double lambda = 0.0;
    double norm = std::sqrt(dot(x, x));
    for (double& v : x) v /= norm;
    for (int iter = 0; iter < 20000; ++iter) {
      for (std::size_t i = 0; i < n; ++i) y[i] = dot(b.row(i), x);
      lambda = dot(x, y);
      double resid = 0.0;
      for (std::size_t i = 0; i < n; ++i) resid += (y[i] - lambda * x[i]) * (y[i] - lambda * x[i]);
      if (std::sqrt(resid) <= 1e-14 * scale * static_cast<double>(n)) break;
      norm = std::sqrt(dot(y, y));
      if (norm == 0.0) break;
      for (std::size_t i = 0; i < n; ++i) x[i] = y[i] / norm;
    }
    out.eigenvalues[comp] = lambda;
    if (lambda > 0.0) {
      const double s = std::sqrt(lambda);
      for (std::size_t i = 0; i < n; ++i) out.coords(i, static_cast<std::size_t>(comp)) = x[i] * s;
    }
    // Deflate.
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) b(i, j) -= lambda * x[i] * x[j];
  }
  return out;
}

}  // namespace degwalk
