#pragma once

#include <cstddef>

// Dense row-major f64 compute kernels, OpenMP-parallel.
//
// Determinism contract: every output element is produced by exactly one
// thread and its reduction runs in an order fixed by the code, never by the
// schedule. Results are bit-identical for any thread count.
//
// The `serial` namespace holds plain textbook implementations kept as the
// reference for tests and for the bench_kernels comparison. Parallel and
// serial paths may differ by float rounding (different summation order);
// tests compare them at ~1e-12 relative.
//
// The gemm entry points use internal packing scratch shared across calls and
// must be invoked from one thread at a time (all parallelism lives inside).

namespace inkmotion::kernels {

// C[m x n] = A[m x k] * B[n x k]^T   (C += ... when accumulate)
void gemm_nt(const double* a, const double* b, double* c,
             std::size_t m, std::size_t n, std::size_t k,
             bool accumulate = false);

// C[m x n] = A[m x k] * B[k x n]
void gemm_nn(const double* a, const double* b, double* c,
             std::size_t m, std::size_t n, std::size_t k,
             bool accumulate = false);

// C[m x n] = A[k x m]^T * B[k x n]
void gemm_tn(const double* a, const double* b, double* c,
             std::size_t m, std::size_t n, std::size_t k,
             bool accumulate = false);

// AT[cols x rows] = A[rows x cols]^T
void transpose(const double* a, double* at, std::size_t rows, std::size_t cols);

// out[j] = sum_i A[i][j]
void col_sums(const double* a, double* out, std::size_t rows, std::size_t cols,
              bool accumulate = false);

// Y[i][j] += bias[j]
void add_bias_rows(double* y, const double* bias, std::size_t rows, std::size_t cols);

namespace serial {

void gemm_nt(const double* a, const double* b, double* c,
             std::size_t m, std::size_t n, std::size_t k,
             bool accumulate = false);

void gemm_nn(const double* a, const double* b, double* c,
             std::size_t m, std::size_t n, std::size_t k,
             bool accumulate = false);

void gemm_tn(const double* a, const double* b, double* c,
             std::size_t m, std::size_t n, std::size_t k,
             bool accumulate = false);

void transpose(const double* a, double* at, std::size_t rows, std::size_t cols);

void col_sums(const double* a, double* out, std::size_t rows, std::size_t cols,
              bool accumulate = false);

}  // namespace serial

}  // namespace inkmotion::kernels
