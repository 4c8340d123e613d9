#include "sortline/nn/kernels.hpp"

#include <algorithm>
#include <cstddef>
#include <vector>

namespace sortline::nn {

namespace {

// Below this many multiply-adds a parallel region costs more than it saves.
constexpr long kParallelWork = 1L << 16;

inline bool worth_parallel(int a, int b, int c) {
  return static_cast<long>(a) * b * c >= kParallelWork;
}

}  // namespace

namespace kernels {

namespace {

constexpr int kTileRows = 8;
constexpr int kLane = 8;
constexpr int kSparseTenths = 4;  // sparse path below 40% non-zeros

// 8 doubles; tiles keep their accumulators in registers.
typedef double Lane __attribute__((vector_size(64)));

inline Lane load(const double* p) {
  Lane v;
  __builtin_memcpy(&v, p, sizeof v);
  return v;
}

inline void store(double* p, Lane v) { __builtin_memcpy(p, &v, sizeof v); }

// C[m][n] += sum_k A(m, k) * B[k][n] for a Rows x (8 * Lanes) tile, with
// A(m, k) = a[m * a_row + k * a_col]. Each element of C accumulates over k
// in ascending order.
template <int Rows, int Lanes>
inline void tile(int depth, const double* a, std::ptrdiff_t a_row, std::ptrdiff_t a_col,
                 const double* b, std::ptrdiff_t ldb, double* c, std::ptrdiff_t ldc) {
  Lane acc[Rows][Lanes];
  for (int m = 0; m < Rows; ++m)
    for (int l = 0; l < Lanes; ++l) acc[m][l] = load(c + m * ldc + kLane * l);
  for (int k = 0; k < depth; ++k) {
    Lane bv[Lanes];
    for (int l = 0; l < Lanes; ++l) bv[l] = load(b + k * ldb + kLane * l);
    for (int m = 0; m < Rows; ++m) {
      const double am = a[m * a_row + k * a_col];
      for (int l = 0; l < Lanes; ++l) acc[m][l] += am * bv[l];
    }
  }
  for (int m = 0; m < Rows; ++m)
    for (int l = 0; l < Lanes; ++l) store(c + m * ldc + kLane * l, acc[m][l]);
}

template <int Rows>
inline void row_strip(int cols, int depth, const double* a, std::ptrdiff_t a_row,
                      std::ptrdiff_t a_col, const double* b, std::ptrdiff_t ldb, double* c,
                      std::ptrdiff_t ldc) {
  int n0 = 0;
  for (; n0 + 2 * kLane <= cols; n0 += 2 * kLane)
    tile<Rows, 2>(depth, a, a_row, a_col, b + n0, ldb, c + n0, ldc);
  if (n0 < cols) tile<Rows, 1>(depth, a, a_row, a_col, b + n0, ldb, c + n0, ldc);
}

// cols must be a multiple of kLane.
void gemm_lanes(int rows, int cols, int depth, const double* a, std::ptrdiff_t a_row,
                std::ptrdiff_t a_col, const double* b, std::ptrdiff_t ldb, double* c,
                std::ptrdiff_t ldc) {
  const int row_tiles = (rows + kTileRows - 1) / kTileRows;
#pragma omp parallel for schedule(static) if (worth_parallel(rows, cols, depth))
  for (int rt = 0; rt < row_tiles; ++rt) {
    const int m0 = rt * kTileRows;
    const double* at = a + m0 * a_row;
    double* ct = c + m0 * ldc;
    switch (std::min(kTileRows, rows - m0)) {
      case 8: row_strip<8>(cols, depth, at, a_row, a_col, b, ldb, ct, ldc); break;
      case 7: row_strip<7>(cols, depth, at, a_row, a_col, b, ldb, ct, ldc); break;
      case 6: row_strip<6>(cols, depth, at, a_row, a_col, b, ldb, ct, ldc); break;
      case 5: row_strip<5>(cols, depth, at, a_row, a_col, b, ldb, ct, ldc); break;
      case 4: row_strip<4>(cols, depth, at, a_row, a_col, b, ldb, ct, ldc); break;
      case 3: row_strip<3>(cols, depth, at, a_row, a_col, b, ldb, ct, ldc); break;
      case 2: row_strip<2>(cols, depth, at, a_row, a_col, b, ldb, ct, ldc); break;
      default: row_strip<1>(cols, depth, at, a_row, a_col, b, ldb, ct, ldc); break;
    }
  }
}

// C += A B. Widths that are not a multiple of the lane run on zero-padded
// copies of B and C; the padding columns are discarded.
void gemm_accumulate(int rows, int cols, int depth, const double* a, std::ptrdiff_t a_row,
                     std::ptrdiff_t a_col, const double* b, std::ptrdiff_t ldb, double* c,
                     std::ptrdiff_t ldc) {
  if (cols % kLane == 0) return gemm_lanes(rows, cols, depth, a, a_row, a_col, b, ldb, c, ldc);
  const int pc = (cols + kLane - 1) / kLane * kLane;
  thread_local std::vector<double> bp, cp;
  bp.assign(static_cast<size_t>(depth) * static_cast<size_t>(pc), 0.0);
  cp.assign(static_cast<size_t>(rows) * static_cast<size_t>(pc), 0.0);
  for (int k = 0; k < depth; ++k) std::copy(b + k * ldb, b + k * ldb + cols, bp.data() + k * pc);
  for (int m = 0; m < rows; ++m) std::copy(c + m * ldc, c + m * ldc + cols, cp.data() + m * pc);
  gemm_lanes(rows, pc, depth, a, a_row, a_col, bp.data(), pc, cp.data(), pc);
  for (int m = 0; m < rows; ++m) std::copy(cp.data() + m * pc, cp.data() + m * pc + cols, c + m * ldc);
}

// Inputs that are mostly zero (one-hot observations) skip the dense tiles.
// Skipped terms are exact zeros, so both paths give identical sums.
bool mostly_zero(const double* x, std::ptrdiff_t n) {
  std::ptrdiff_t nz = 0;
  for (std::ptrdiff_t k = 0; k < n; ++k) nz += x[k] != 0.0;
  return nz * 10 < n * kSparseTenths;
}

// c[n] += s * b[n]
inline void axpy(int n, double s, const double* b, double* c) {
#pragma omp simd
  for (int k = 0; k < n; ++k) c[k] += s * b[k];
}

}  // namespace

void dense_forward(const double* x, int batch, int in, const double* w, const double* b, int out,
                   double* y) {
  for (int r = 0; r < batch; ++r) std::copy(b, b + out, y + static_cast<std::ptrdiff_t>(r) * out);
  if (!mostly_zero(x, static_cast<std::ptrdiff_t>(batch) * in)) {
    gemm_accumulate(batch, out, in, x, in, 1, w, out, y, out);
    return;
  }
#pragma omp parallel for schedule(static) if (worth_parallel(batch, out, in))
  for (int r = 0; r < batch; ++r) {
    const double* xr = x + static_cast<std::ptrdiff_t>(r) * in;
    double* yr = y + static_cast<std::ptrdiff_t>(r) * out;
    for (int i = 0; i < in; ++i)
      if (xr[i] != 0.0) axpy(out, xr[i], w + static_cast<std::ptrdiff_t>(i) * out, yr);
  }
}

void dense_backward_input(const double* dy, int batch, int out, const double* w, int in,
                          double* dx) {
  // dx = dy W^T, computed against an output-major copy of W.
  thread_local std::vector<double> wt;
  wt.resize(static_cast<size_t>(in) * static_cast<size_t>(out));
  for (int i = 0; i < in; ++i)
    for (int o = 0; o < out; ++o)
      wt[static_cast<size_t>(o) * static_cast<size_t>(in) + static_cast<size_t>(i)] =
          w[static_cast<std::ptrdiff_t>(i) * out + o];
  std::fill(dx, dx + static_cast<std::ptrdiff_t>(batch) * in, 0.0);
  gemm_accumulate(batch, in, out, dy, out, 1, wt.data(), in, dx, in);
}

void dense_backward_params(const double* x, const double* dy, int batch, int in, int out,
                           double* dw, double* db) {
  if (mostly_zero(x, static_cast<std::ptrdiff_t>(batch) * in)) {
    // serial over samples keeps the per-element summation order ascending
    for (int r = 0; r < batch; ++r) {
      const double* xr = x + static_cast<std::ptrdiff_t>(r) * in;
      const double* dyr = dy + static_cast<std::ptrdiff_t>(r) * out;
      for (int i = 0; i < in; ++i)
        if (xr[i] != 0.0) axpy(out, xr[i], dyr, dw + static_cast<std::ptrdiff_t>(i) * out);
    }
  } else {
    gemm_accumulate(in, out, batch, x, 1, in, dy, out, dw, out);
  }
  for (int r = 0; r < batch; ++r) {
    const double* dyr = dy + static_cast<std::ptrdiff_t>(r) * out;
#pragma omp simd
    for (int o = 0; o < out; ++o) db[o] += dyr[o];
  }
}

void relu(double* y, int n) {
#pragma omp simd
  for (int k = 0; k < n; ++k) y[k] = y[k] > 0.0 ? y[k] : 0.0;
}

void relu_backward(const double* activation, double* dy, int n) {
#pragma omp simd
  for (int k = 0; k < n; ++k) dy[k] = activation[k] > 0.0 ? dy[k] : 0.0;
}

}  // namespace kernels

namespace reference {

void dense_forward(const double* x, int batch, int in, const double* w, const double* b, int out,
                   double* y) {
  for (int r = 0; r < batch; ++r)
    for (int o = 0; o < out; ++o) {
      double s = b[o];
      for (int i = 0; i < in; ++i) s += x[r * in + i] * w[i * out + o];
      y[r * out + o] = s;
    }
}

void dense_backward_input(const double* dy, int batch, int out, const double* w, int in,
                          double* dx) {
  for (int r = 0; r < batch; ++r)
    for (int i = 0; i < in; ++i) {
      double s = 0.0;
      for (int o = 0; o < out; ++o) s += dy[r * out + o] * w[i * out + o];
      dx[r * in + i] = s;
    }
}

void dense_backward_params(const double* x, const double* dy, int batch, int in, int out,
                           double* dw, double* db) {
  for (int i = 0; i < in; ++i)
    for (int o = 0; o < out; ++o) {
      double s = 0.0;
      for (int r = 0; r < batch; ++r) s += x[r * in + i] * dy[r * out + o];
      dw[i * out + o] += s;
    }
  for (int o = 0; o < out; ++o) {
    double s = 0.0;
    for (int r = 0; r < batch; ++r) s += dy[r * out + o];
    db[o] += s;
  }
}

}  // namespace reference

}  // namespace sortline::nn
