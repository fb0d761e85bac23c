// Copyright 2026 The RoVF Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>

#include "rovf/core/matrix.hpp"

// Dense kernels used by the model and the distance computations.
//
// Every kernel exists twice: a serial reference in `kernels::serial` and an
// OpenMP version in `kernels::parallel`. Both compute each output element with
// the same summation order, so their results are bitwise identical; the tests
// rely on that. The unqualified functions dispatch to the parallel version for
// large problems when not already inside a parallel region.
namespace rovf::kernels {

namespace serial {
// c = a * b
void matmul(const Matrix& a, const Matrix& b, Matrix& c);
// c = a * b^T
void matmul_nt(const Matrix& a, const Matrix& b, Matrix& c);
// c = a^T * b
void matmul_tn(const Matrix& a, const Matrix& b, Matrix& c);
// out(i, j) = ||x_i - y_j||^2
void pairwise_sq_dist(const Matrix& x, const Matrix& y, Matrix& out);
}  // namespace serial

namespace parallel {
void matmul(const Matrix& a, const Matrix& b, Matrix& c);
void matmul_nt(const Matrix& a, const Matrix& b, Matrix& c);
void matmul_tn(const Matrix& a, const Matrix& b, Matrix& c);
void pairwise_sq_dist(const Matrix& x, const Matrix& y, Matrix& out);
}  // namespace parallel

void matmul(const Matrix& a, const Matrix& b, Matrix& c);
void matmul_nt(const Matrix& a, const Matrix& b, Matrix& c);
void matmul_tn(const Matrix& a, const Matrix& b, Matrix& c);
void pairwise_sq_dist(const Matrix& x, const Matrix& y, Matrix& out);

Matrix matmul(const Matrix& a, const Matrix& b);
Matrix matmul_nt(const Matrix& a, const Matrix& b);
Matrix matmul_tn(const Matrix& a, const Matrix& b);

/// Euclidean distance. Shared by mining, the loss and gallery ranking.
double euclidean(std::span<const double> a, std::span<const double> b);
double squared_euclidean(std::span<const double> a, std::span<const double> b);

/// Work (multiply-adds) above which dispatch goes parallel.
inline constexpr long long kParallelThreshold = 1 << 18;

/// Sets the thread count used by parallel regions (<= 0 keeps the runtime default).
void set_num_threads(int n);
int max_threads();

}  // namespace rovf::kernels
