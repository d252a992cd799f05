#include "inkmotion/kernels.hpp"

#include <algorithm>
#include <cstring>
#include <vector>

namespace inkmotion::kernels {

namespace {

// Blocked outer-product GEMM. B is packed whole into k-major micro-panels of
// NR columns; A is packed per (row panel, k chunk) into k-major strips of MR
// rows. The 8x16 micro-kernel broadcasts A and carries one accumulator per
// output element, so the reduction order is k-ascending everywhere.
constexpr std::size_t MR = 8;
constexpr std::size_t NR = 16;
constexpr std::size_t KC = 512;   // k chunk; A panel stays L2-resident
constexpr std::size_t MC = 128;   // rows of C per task
constexpr std::size_t NC = 768;   // cols of C per task

typedef double v8d __attribute__((vector_size(64), aligned(8)));

inline v8d splat(double x) {
  return v8d{x, x, x, x, x, x, x, x};
}

// aligned(8) relaxes the type's alignment so a plain dereference emits an
// unaligned vector load instead of bouncing through the stack
inline v8d loadu(const double* p) { return *reinterpret_cast<const v8d*>(p); }

inline void storeu(double* p, v8d v) { *reinterpret_cast<v8d*>(p) = v; }

// ct[MR][NR] = Apanel[kc x MR] * Bpanel[kc x NR]
void micro_kernel(const double* __restrict ap, const double* __restrict bp,
                  std::size_t kc, double* __restrict ct) {
  v8d acc00 = {}, acc01 = {}, acc10 = {}, acc11 = {}, acc20 = {}, acc21 = {},
      acc30 = {}, acc31 = {}, acc40 = {}, acc41 = {}, acc50 = {}, acc51 = {},
      acc60 = {}, acc61 = {}, acc70 = {}, acc71 = {};
  for (std::size_t kk = 0; kk < kc; ++kk) {
    const v8d b0 = loadu(bp + kk * NR);
    const v8d b1 = loadu(bp + kk * NR + 8);
    const double* ar = ap + kk * MR;
    v8d av;
    av = splat(ar[0]); acc00 += av * b0; acc01 += av * b1;
    av = splat(ar[1]); acc10 += av * b0; acc11 += av * b1;
    av = splat(ar[2]); acc20 += av * b0; acc21 += av * b1;
    av = splat(ar[3]); acc30 += av * b0; acc31 += av * b1;
    av = splat(ar[4]); acc40 += av * b0; acc41 += av * b1;
    av = splat(ar[5]); acc50 += av * b0; acc51 += av * b1;
    av = splat(ar[6]); acc60 += av * b0; acc61 += av * b1;
    av = splat(ar[7]); acc70 += av * b0; acc71 += av * b1;
  }
  storeu(ct + 0 * NR, acc00);  storeu(ct + 0 * NR + 8, acc01);
  storeu(ct + 1 * NR, acc10);  storeu(ct + 1 * NR + 8, acc11);
  storeu(ct + 2 * NR, acc20);  storeu(ct + 2 * NR + 8, acc21);
  storeu(ct + 3 * NR, acc30);  storeu(ct + 3 * NR + 8, acc31);
  storeu(ct + 4 * NR, acc40);  storeu(ct + 4 * NR + 8, acc41);
  storeu(ct + 5 * NR, acc50);  storeu(ct + 5 * NR + 8, acc51);
  storeu(ct + 6 * NR, acc60);  storeu(ct + 6 * NR + 8, acc61);
  storeu(ct + 7 * NR, acc70);  storeu(ct + 7 * NR + 8, acc71);
}

struct PackedB {
  // strips of NR columns, each strip k-major: bp[strip][kk][jj]
  std::vector<double> data;
  std::size_t n_strips = 0;
  std::size_t k = 0;

  const double* strip(std::size_t s, std::size_t k0) const {
    return data.data() + (s * k + k0) * NR;
  }
};

enum class BLayout { NT, NN };  // NT: B[n x k]; NN: B[k x n]

void pack_b_tile(PackedB& pb, const double* b, std::size_t n, std::size_t k,
                 BLayout layout, std::size_t k_chunks, std::size_t t);

// Packs all of B; parallel over (strip, k chunk) tiles.
void pack_b(PackedB& pb, const double* b, std::size_t n, std::size_t k,
            BLayout layout, bool parallel) {
  pb.n_strips = (n + NR - 1) / NR;
  pb.k = k;
  pb.data.resize(pb.n_strips * k * NR);
  const std::size_t k_chunks = (k + KC - 1) / KC;
  const std::size_t tiles = pb.n_strips * k_chunks;
  if (!parallel) {
    for (std::size_t t = 0; t < tiles; ++t)
      pack_b_tile(pb, b, n, k, layout, k_chunks, t);
    return;
  }
#pragma omp parallel for schedule(static)
  for (std::size_t t = 0; t < tiles; ++t)
    pack_b_tile(pb, b, n, k, layout, k_chunks, t);
}

void pack_b_tile(PackedB& pb, const double* b, std::size_t n, std::size_t k,
                 BLayout layout, std::size_t k_chunks, std::size_t t) {
  {
    const std::size_t s = t / k_chunks;
    const std::size_t k0 = (t % k_chunks) * KC;
    const std::size_t k1 = std::min(k0 + KC, k);
    const std::size_t j0 = s * NR;
    const std::size_t jw = std::min(NR, n - j0);
    double* dst = pb.data.data() + (s * k + k0) * NR;
    if (layout == BLayout::NT) {
      for (std::size_t kk = k0; kk < k1; ++kk) {
        double* d = dst + (kk - k0) * NR;
        for (std::size_t jj = 0; jj < jw; ++jj) d[jj] = b[(j0 + jj) * k + kk];
        for (std::size_t jj = jw; jj < NR; ++jj) d[jj] = 0.0;
      }
    } else {
      for (std::size_t kk = k0; kk < k1; ++kk) {
        double* d = dst + (kk - k0) * NR;
        const double* src = b + kk * n + j0;
        for (std::size_t jj = 0; jj < jw; ++jj) d[jj] = src[jj];
        for (std::size_t jj = jw; jj < NR; ++jj) d[jj] = 0.0;
      }
    }
  }
}

enum class ALayout { NM, TN };  // NM: A[m x k]; TN: A[k x m]

// Packs a (MC x KC) panel of A into k-major strips of MR rows.
void pack_a(double* dst, const double* a, std::size_t m, std::size_t k,
            std::size_t i0, std::size_t iw, std::size_t k0, std::size_t kw,
            ALayout layout) {
  const std::size_t strips = (iw + MR - 1) / MR;
  for (std::size_t s = 0; s < strips; ++s) {
    const std::size_t r0 = s * MR;
    const std::size_t rw = std::min(MR, iw - r0);
    double* d = dst + s * kw * MR;
    if (layout == ALayout::NM) {
      for (std::size_t kk = 0; kk < kw; ++kk)
        for (std::size_t r = 0; r < MR; ++r)
          d[kk * MR + r] =
              r < rw ? a[(i0 + r0 + r) * k + k0 + kk] : 0.0;
    } else {
      for (std::size_t kk = 0; kk < kw; ++kk) {
        const double* src = a + (k0 + kk) * m + i0 + r0;
        for (std::size_t r = 0; r < MR; ++r)
          d[kk * MR + r] = r < rw ? src[r] : 0.0;
      }
    }
  }
}

void gemm_task(const double* a, const PackedB& pb, double* c, std::size_t m,
               std::size_t n, std::size_t k, bool accumulate, ALayout a_layout,
               std::size_t m_panels, std::size_t task, double* apanel) {
  alignas(64) double ct[MR * NR];
  const std::size_t strips_per_panel = NC / NR;
  const std::size_t ip = task % m_panels;
  const std::size_t jp = task / m_panels;
  const std::size_t i0 = ip * MC;
  const std::size_t iw = std::min(MC, m - i0);
  const std::size_t s0 = jp * strips_per_panel;
  const std::size_t s1 = std::min(s0 + strips_per_panel, pb.n_strips);
  if (!accumulate)
    for (std::size_t i = i0; i < i0 + iw; ++i)
      std::memset(c + i * n + s0 * NR, 0,
                  (std::min(s1 * NR, n) - s0 * NR) * sizeof(double));
  for (std::size_t k0 = 0; k0 < k; k0 += KC) {
    const std::size_t kw = std::min(KC, k - k0);
    pack_a(apanel, a, m, k, i0, iw, k0, kw, a_layout);
    const std::size_t a_strips = (iw + MR - 1) / MR;
    for (std::size_t s = s0; s < s1; ++s) {
      const double* bp = pb.strip(s, k0);
      const std::size_t j0 = s * NR;
      const std::size_t jw = std::min(NR, n - j0);
      for (std::size_t as = 0; as < a_strips; ++as) {
        micro_kernel(apanel + as * kw * MR, bp, kw, ct);
        const std::size_t r0 = i0 + as * MR;
        const std::size_t rw = std::min(MR, m - r0);
        for (std::size_t r = 0; r < rw; ++r) {
          double* crow = c + (r0 + r) * n + j0;
          const double* trow = ct + r * NR;
          for (std::size_t j = 0; j < jw; ++j) crow[j] += trow[j];
        }
      }
    }
  }
}

void gemm_packed(const double* a, const double* b, double* c, std::size_t m,
                 std::size_t n, std::size_t k, bool accumulate,
                 ALayout a_layout, BLayout b_layout) {
  if (m == 0 || n == 0) return;
  if (k == 0) {
    if (!accumulate) std::memset(c, 0, m * n * sizeof(double));
    return;
  }
  // Small problems skip the OpenMP fork; identical packing and summation
  // order, so the result does not depend on which path ran.
  const bool small = 2.0 * static_cast<double>(m) * n * k < 4e6;

  static PackedB pb;  // scratch reused across calls; gemm is single-entrant
  pack_b(pb, b, n, k, b_layout, !small);

  const std::size_t m_panels = (m + MC - 1) / MC;
  const std::size_t n_panels = (n + NC - 1) / NC;
  const std::size_t tasks = m_panels * n_panels;

  if (small) {
    static std::vector<double> apanel(MC * KC);
    for (std::size_t task = 0; task < tasks; ++task)
      gemm_task(a, pb, c, m, n, k, accumulate, a_layout, m_panels, task,
                apanel.data());
    return;
  }

#pragma omp parallel
  {
    std::vector<double> apanel(MC * KC);
#pragma omp for schedule(dynamic)
    for (std::size_t task = 0; task < tasks; ++task)
      gemm_task(a, pb, c, m, n, k, accumulate, a_layout, m_panels, task,
                apanel.data());
  }
}

}  // namespace

void gemm_nt(const double* a, const double* b, double* c, std::size_t m,
             std::size_t n, std::size_t k, bool accumulate) {
  gemm_packed(a, b, c, m, n, k, accumulate, ALayout::NM, BLayout::NT);
}

void gemm_nn(const double* a, const double* b, double* c, std::size_t m,
             std::size_t n, std::size_t k, bool accumulate) {
  gemm_packed(a, b, c, m, n, k, accumulate, ALayout::NM, BLayout::NN);
}

void gemm_tn(const double* a, const double* b, double* c, std::size_t m,
             std::size_t n, std::size_t k, bool accumulate) {
  gemm_packed(a, b, c, m, n, k, accumulate, ALayout::TN, BLayout::NN);
}

void transpose(const double* a, double* at, std::size_t rows, std::size_t cols) {
  constexpr std::size_t T = 32;
  const std::size_t rb = (rows + T - 1) / T;
  const std::size_t cb = (cols + T - 1) / T;
#pragma omp parallel for schedule(static)
  for (std::size_t t = 0; t < rb * cb; ++t) {
    const std::size_t r0 = (t / cb) * T, c0 = (t % cb) * T;
    const std::size_t r1 = std::min(r0 + T, rows), c1 = std::min(c0 + T, cols);
    for (std::size_t i = r0; i < r1; ++i)
      for (std::size_t j = c0; j < c1; ++j) at[j * rows + i] = a[i * cols + j];
  }
}

void col_sums(const double* a, double* out, std::size_t rows, std::size_t cols,
              bool accumulate) {
  constexpr std::size_t CB = 512;
  const std::size_t blocks = (cols + CB - 1) / CB;
#pragma omp parallel for schedule(static)
  for (std::size_t jb = 0; jb < blocks; ++jb) {
    const std::size_t j0 = jb * CB, j1 = std::min(j0 + CB, cols);
    if (!accumulate)
      std::memset(out + j0, 0, (j1 - j0) * sizeof(double));
    for (std::size_t i = 0; i < rows; ++i) {
      const double* __restrict row = a + i * cols;
      for (std::size_t j = j0; j < j1; ++j) out[j] += row[j];
    }
  }
}

void add_bias_rows(double* y, const double* bias, std::size_t rows,
                   std::size_t cols) {
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < rows; ++i) {
    double* __restrict row = y + i * cols;
    for (std::size_t j = 0; j < cols; ++j) row[j] += bias[j];
  }
}

namespace serial {

void gemm_nt(const double* a, const double* b, double* c, std::size_t m,
             std::size_t n, std::size_t k, bool accumulate) {
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double s = accumulate ? c[i * n + j] : 0.0;
      for (std::size_t kk = 0; kk < k; ++kk) s += a[i * k + kk] * b[j * k + kk];
      c[i * n + j] = s;
    }
}

void gemm_nn(const double* a, const double* b, double* c, std::size_t m,
             std::size_t n, std::size_t k, bool accumulate) {
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double s = accumulate ? c[i * n + j] : 0.0;
      for (std::size_t kk = 0; kk < k; ++kk) s += a[i * k + kk] * b[kk * n + j];
      c[i * n + j] = s;
    }
}

void gemm_tn(const double* a, const double* b, double* c, std::size_t m,
             std::size_t n, std::size_t k, bool accumulate) {
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double s = accumulate ? c[i * n + j] : 0.0;
      for (std::size_t kk = 0; kk < k; ++kk) s += a[kk * m + i] * b[kk * n + j];
      c[i * n + j] = s;
    }
}

void transpose(const double* a, double* at, std::size_t rows, std::size_t cols) {
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) at[j * rows + i] = a[i * cols + j];
}

void col_sums(const double* a, double* out, std::size_t rows, std::size_t cols,
              bool accumulate) {
  for (std::size_t j = 0; j < cols; ++j) {
    double s = accumulate ? out[j] : 0.0;
    for (std::size_t i = 0; i < rows; ++i) s += a[i * cols + j];
    out[j] = s;
  }
}

}  // namespace serial

}  // namespace inkmotion::kernels
