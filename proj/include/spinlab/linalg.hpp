#pragma once

// Small dense linear algebra: row-major matrices, LU with partial pivoting,
// solves and explicit inverses. Sized for the lattice windows used here
// (n up to a few thousand); no attempt at blocking or sparsity.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace spinlab {

class Error : public std::runtime_error {
 public:
  Error(std::string field, const std::string& what)
      : std::runtime_error(what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

inline void require(bool ok, const char* field, const char* what) {
  if (!ok) throw Error(field, what);
}

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), a_(rows * cols, fill) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

  const double* row(std::size_t i) const { return a_.data() + i * cols_; }
  double* row(std::size_t i) { return a_.data() + i * cols_; }

  const std::vector<double>& data() const { return a_; }

  bool operator==(const Matrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_;
  }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> a_;
};

inline Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw Error("shape", "matrix product shape mismatch");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

// ||A - B||_inf (max absolute row sum of the difference)
inline double inf_norm_diff(const Matrix& a, const Matrix& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) s += std::abs(a(i, j) - b(i, j));
    worst = std::max(worst, s);
  }
  return worst;
}

struct LuDecomposition {
  Matrix lu;
  std::vector<std::size_t> piv;
  bool singular = false;
};

inline LuDecomposition lu_factor(Matrix a) {
  const std::size_t n = a.rows();
  if (n != a.cols()) throw Error("shape", "lu_factor needs a square matrix");
  LuDecomposition d;
  d.piv.resize(n);
  for (std::size_t i = 0; i < n; ++i) d.piv[i] = i;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    double best = std::abs(a(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      double v = std::abs(a(i, k));
      if (v > best) { best = v; p = i; }
    }
    if (best == 0.0) { d.singular = true; d.lu = std::move(a); return d; }
    if (p != k) {
      std::swap(d.piv[p], d.piv[k]);
      for (std::size_t j = 0; j < n; ++j) std::swap(a(p, j), a(k, j));
    }
    const double pivot = a(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      double f = a(i, k) / pivot;
      a(i, k) = f;
      if (f == 0.0) continue;
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= f * a(k, j);
    }
  }
  d.lu = std::move(a);
  return d;
}

inline std::vector<double> lu_solve(const LuDecomposition& d, const std::vector<double>& b) {
  const std::size_t n = d.lu.rows();
  if (d.singular) throw Error("matrix", "singular matrix in lu_solve");
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = b[d.piv[i]];
  for (std::size_t i = 1; i < n; ++i) {
    double s = x[i];
    for (std::size_t j = 0; j < i; ++j) s -= d.lu(i, j) * x[j];
    x[i] = s;
  }
  for (std::size_t ii = n; ii-- > 0;) {
    double s = x[ii];
    for (std::size_t j = ii + 1; j < n; ++j) s -= d.lu(ii, j) * x[j];
    x[ii] = s / d.lu(ii, ii);
  }
  return x;
}

inline Matrix lu_inverse(const LuDecomposition& d) {
  const std::size_t n = d.lu.rows();
  Matrix inv(n, n);
  std::vector<double> e(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    e.assign(n, 0.0);
    e[j] = 1.0;
    std::vector<double> col = lu_solve(d, e);
    for (std::size_t i = 0; i < n; ++i) inv(i, j) = col[i];
  }
  return inv;
}

inline Matrix inverse(const Matrix& a) { return lu_inverse(lu_factor(a)); }

// Pairwise (cascade) summation; result does not depend on how callers chunk work.
inline long double pairwise_sum(const long double* v, std::size_t n) {
  if (n == 0) return 0.0L;
  if (n <= 8) {
    long double s = 0.0L;
    for (std::size_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  std::size_t h = n / 2;
  return pairwise_sum(v, h) + pairwise_sum(v + h, n - h);
}

inline long double pairwise_sum(const std::vector<long double>& v) {
  return pairwise_sum(v.data(), v.size());
}

}  // namespace spinlab
