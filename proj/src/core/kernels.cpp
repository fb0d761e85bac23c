// Copyright 2026 The RoVF Authors
// SPDX-License-Identifier: Apache-2.0

#include "rovf/core/kernels.hpp"

#include <cmath>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace rovf::kernels {

namespace {

void check_mm(const Matrix& a, const Matrix& b, std::size_t inner_a, std::size_t inner_b,
              const char* what) {
  if (inner_a != inner_b) {
    throw std::invalid_argument(std::string(what) + ": inner dimension mismatch " +
                                shape_string(a) + " vs " + shape_string(b));
  }
}

// Row kernels shared by the serial and parallel variants. Each output element
// accumulates over k in increasing order.
inline void matmul_row(const Matrix& a, const Matrix& b, Matrix& c, std::size_t i) {
  const std::size_t n = b.cols();
  const std::size_t kk = a.cols();
  double* crow = c.data() + i * n;
  for (std::size_t j = 0; j < n; ++j) crow[j] = 0.0;
  const double* arow = a.data() + i * kk;
  for (std::size_t k = 0; k < kk; ++k) {
    const double aik = arow[k];
    const double* brow = b.data() + k * n;
    for (std::size_t j = 0; j < n; ++j) crow[j] += aik * brow[j];
  }
}

inline void matmul_nt_row(const Matrix& a, const Matrix& b, Matrix& c, std::size_t i) {
  const std::size_t n = b.rows();
  const std::size_t kk = a.cols();
  const double* arow = a.data() + i * kk;
  double* crow = c.data() + i * n;
  for (std::size_t j = 0; j < n; ++j) {
    const double* brow = b.data() + j * kk;
    double s = 0.0;
    for (std::size_t k = 0; k < kk; ++k) s += arow[k] * brow[k];
    crow[j] = s;
  }
}

// Row i of a^T b: sum_k a(k, i) * b(k, :)
inline void matmul_tn_row(const Matrix& a, const Matrix& b, Matrix& c, std::size_t i) {
  const std::size_t n = b.cols();
  const std::size_t kk = a.rows();
  const std::size_t m = a.cols();
  double* crow = c.data() + i * n;
  for (std::size_t j = 0; j < n; ++j) crow[j] = 0.0;
  for (std::size_t k = 0; k < kk; ++k) {
    const double aki = a.data()[k * m + i];
    const double* brow = b.data() + k * n;
    for (std::size_t j = 0; j < n; ++j) crow[j] += aki * brow[j];
  }
}

inline void pairwise_row(const Matrix& x, const Matrix& y, Matrix& out, std::size_t i) {
  for (std::size_t j = 0; j < y.rows(); ++j) out(i, j) = squared_euclidean(x.row(i), y.row(j));
}

void prepare(Matrix& c, std::size_t rows, std::size_t cols) {
  if (c.rows() != rows || c.cols() != cols) c = Matrix(rows, cols);
}

bool in_parallel() {
#ifdef _OPENMP
  return omp_in_parallel() != 0;
#else
  return true;
#endif
}

bool go_parallel(long long work) { return work >= kParallelThreshold && !in_parallel(); }

}  // namespace

double squared_euclidean(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("euclidean: dimension mismatch " + std::to_string(a.size()) +
                                " vs " + std::to_string(b.size()));
  }
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

double euclidean(std::span<const double> a, std::span<const double> b) {
  return std::sqrt(squared_euclidean(a, b));
}

namespace serial {

void matmul(const Matrix& a, const Matrix& b, Matrix& c) {
  check_mm(a, b, a.cols(), b.rows(), "matmul");
  prepare(c, a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) matmul_row(a, b, c, i);
}

void matmul_nt(const Matrix& a, const Matrix& b, Matrix& c) {
  check_mm(a, b, a.cols(), b.cols(), "matmul_nt");
  prepare(c, a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) matmul_nt_row(a, b, c, i);
}

void matmul_tn(const Matrix& a, const Matrix& b, Matrix& c) {
  check_mm(a, b, a.rows(), b.rows(), "matmul_tn");
  prepare(c, a.cols(), b.cols());
  for (std::size_t i = 0; i < a.cols(); ++i) matmul_tn_row(a, b, c, i);
}

void pairwise_sq_dist(const Matrix& x, const Matrix& y, Matrix& out) {
  check_mm(x, y, x.cols(), y.cols(), "pairwise_sq_dist");
  prepare(out, x.rows(), y.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) pairwise_row(x, y, out, i);
}

}  // namespace serial

namespace parallel {

void matmul(const Matrix& a, const Matrix& b, Matrix& c) {
  check_mm(a, b, a.cols(), b.rows(), "matmul");
  prepare(c, a.rows(), b.cols());
  const auto rows = static_cast<long long>(a.rows());
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < rows; ++i) matmul_row(a, b, c, static_cast<std::size_t>(i));
}

void matmul_nt(const Matrix& a, const Matrix& b, Matrix& c) {
  check_mm(a, b, a.cols(), b.cols(), "matmul_nt");
  prepare(c, a.rows(), b.rows());
  const auto rows = static_cast<long long>(a.rows());
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < rows; ++i) matmul_nt_row(a, b, c, static_cast<std::size_t>(i));
}

void matmul_tn(const Matrix& a, const Matrix& b, Matrix& c) {
  check_mm(a, b, a.rows(), b.rows(), "matmul_tn");
  prepare(c, a.cols(), b.cols());
  const auto rows = static_cast<long long>(a.cols());
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < rows; ++i) matmul_tn_row(a, b, c, static_cast<std::size_t>(i));
}

void pairwise_sq_dist(const Matrix& x, const Matrix& y, Matrix& out) {
  check_mm(x, y, x.cols(), y.cols(), "pairwise_sq_dist");
  prepare(out, x.rows(), y.rows());
  const auto rows = static_cast<long long>(x.rows());
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < rows; ++i) pairwise_row(x, y, out, static_cast<std::size_t>(i));
}

}  // namespace parallel

void matmul(const Matrix& a, const Matrix& b, Matrix& c) {
  const auto work = static_cast<long long>(a.rows() * a.cols() * b.cols());
  go_parallel(work) ? parallel::matmul(a, b, c) : serial::matmul(a, b, c);
}

void matmul_nt(const Matrix& a, const Matrix& b, Matrix& c) {
  const auto work = static_cast<long long>(a.rows() * a.cols() * b.rows());
  go_parallel(work) ? parallel::matmul_nt(a, b, c) : serial::matmul_nt(a, b, c);
}

void matmul_tn(const Matrix& a, const Matrix& b, Matrix& c) {
  const auto work = static_cast<long long>(a.rows() * a.cols() * b.cols());
  go_parallel(work) ? parallel::matmul_tn(a, b, c) : serial::matmul_tn(a, b, c);
}

void pairwise_sq_dist(const Matrix& x, const Matrix& y, Matrix& out) {
  const auto work = static_cast<long long>(x.rows() * y.rows() * x.cols());
  go_parallel(work) ? parallel::pairwise_sq_dist(x, y, out)
                    : serial::pairwise_sq_dist(x, y, out);
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  Matrix c;
  matmul(a, b, c);
  return c;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
  Matrix c;
  matmul_nt(a, b, c);
  return c;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
  Matrix c;
  matmul_tn(a, b, c);
  return c;
}

void set_num_threads(int n) {
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace rovf::kernels
