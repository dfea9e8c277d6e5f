#pragma once

// Strictly diagonally dominant matrices with nonpositive off-diagonal
// entries have entrywise-nonnegative inverses whose row sums are bounded
// by 1/delta. Verified here by dense inversion over random corpora, plus
// an explicit-Euler probe of the semigroup route (solutions of
// y' = -A y started in the nonnegative orthant stay there).

#include <cmath>
#include <cstdint>
#include <vector>

#include "spinlab/linalg.hpp"
#include "spinlab/parallel.hpp"
#include "spinlab/rng.hpp"

namespace spinlab {

struct SddMatrix {
  Matrix a;
  double delta = 0.0;
  bool m_matrix = true;  // require nonpositive off-diagonal entries

  void validate() const {
    const std::size_t n = a.rows();
    require(n == a.cols(), "matrix", "matrix must be square");
    require(delta > 0.0, "delta", "margin must be positive");
    for (std::size_t i = 0; i < n; ++i) {
      double off = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        off += std::abs(a(i, j));
        if (m_matrix && a(i, j) > 0.0)
          throw Error("matrix", "off-diagonal entries must be nonpositive");
      }
      if (a(i, i) - off < delta * (1.0 - 1e-12))
        throw Error("delta", "matrix is not diagonally dominant with the stated margin");
    }
  }
};

struct InversePositivityReport {
  double min_entry = 0.0;
  double max_row_sum = 0.0;
  double residual_inf = 0.0;  // ||A A^{-1} - I||_inf
  double tol = 0.0;
  double row_sum_limit = 0.0;  // 1/delta
  bool pass = false;
};

inline InversePositivityReport verify_inverse_positivity(const SddMatrix& m, double tol = 1e-10) {
  m.validate();
  const std::size_t n = m.a.rows();
  Matrix inv = inverse(m.a);
  InversePositivityReport rep;
  rep.tol = tol;
  rep.row_sum_limit = 1.0 / m.delta;
  rep.min_entry = inv(0, 0);
  rep.max_row_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      rep.min_entry = std::min(rep.min_entry, inv(i, j));
      row += inv(i, j);
    }
    rep.max_row_sum = std::max(rep.max_row_sum, row);
  }
  rep.residual_inf = inf_norm_diff(m.a * inv, Matrix::identity(n));
  rep.pass = rep.min_entry >= -tol && rep.max_row_sum <= rep.row_sum_limit + tol;
  return rep;
}

struct SemigroupProbeReport {
  double min_over_time = 0.0;
  int steps = 0;
  bool pass = false;
};

inline SemigroupProbeReport semigroup_invariance_probe(const SddMatrix& m,
                                                       const std::vector<double>& y0,
                                                       double t_max, double dt,
                                                       double tol = 1e-12) {
  m.validate();
  const std::size_t n = m.a.rows();
  require(y0.size() == n, "y0", "initial vector length mismatch");
  for (double v : y0) require(v >= 0.0, "y0", "initial vector must be nonnegative");
  double dmax = 0.0;
  for (std::size_t i = 0; i < n; ++i) dmax = std::max(dmax, m.a(i, i));
  require(dt > 0.0 && dt <= 1.0 / (2.0 * dmax), "dt", "explicit Euler step too large");

  std::vector<double> y = y0, ynext(n);
  SemigroupProbeReport rep;
  rep.min_over_time = 0.0;
  for (double v : y0) rep.min_over_time = std::min(rep.min_over_time, v);
  for (double t = 0.0; t < t_max; t += dt) {
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += m.a(i, j) * y[j];
      ynext[i] = y[i] - dt * s;
      rep.min_over_time = std::min(rep.min_over_time, ynext[i]);
    }
    y.swap(ynext);
    ++rep.steps;
  }
  rep.pass = rep.min_over_time >= -tol;
  return rep;
}

// Random strictly diagonally dominant M-matrix with the margin pinned exactly.
inline SddMatrix random_sdd_matrix(CounterRng& rng, int size, double delta) {
  SddMatrix m;
  m.delta = delta;
  m.a = Matrix(size, size);
  for (int i = 0; i < size; ++i)
    for (int j = 0; j < size; ++j) {
      if (i == j) continue;
      // sparse-ish rows keep the corpus from being all diagonally tiny
      double v = rng.uniform() < 0.7 ? rng.uniform(0.0, 1.0) : 0.0;
      m.a(i, j) = -v;
    }
  for (int i = 0; i < size; ++i) {
    double off = 0.0;
    for (int j = 0; j < size; ++j)
      if (j != i) off += std::abs(m.a(i, j));
    m.a(i, i) = off + delta;
  }
  return m;
}

struct CorpusRow {
  int index = 0;
  int size = 0;
  double delta = 0.0;
  double min_entry = 0.0;
  double max_row_sum = 0.0;
  double residual_inf = 0.0;
  bool pass = false;
};

inline std::vector<CorpusRow> run_matrix_corpus(int count, int max_size, std::uint64_t seed,
                                                double tol = 1e-10, int threads = 1) {
  std::vector<CorpusRow> rows(count);
  parallel_for(count, threads, [&](std::size_t idx) {
    CounterRng rng(seed, idx);
    int size = 2 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_size - 1)));
    double delta = rng.uniform(0.1, 2.0);
    SddMatrix m = random_sdd_matrix(rng, size, delta);
    auto rep = verify_inverse_positivity(m, tol);
    rows[idx] = {static_cast<int>(idx), size,       delta,   rep.min_entry,
                 rep.max_row_sum,       rep.residual_inf, rep.pass};
  });
  return rows;
}

}  // namespace spinlab
