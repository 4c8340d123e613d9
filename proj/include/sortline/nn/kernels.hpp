#pragma once

// Dense-layer kernels. Weights are stored input-major: W[i * out + o] is the
// weight from input i to output o. Batches are row-major, one sample per row.
//
// The default kernels parallelise over independent rows with OpenMP and
// vectorise across outputs; every output element is produced by exactly one
// thread with a fixed summation order, so results do not depend on the
// thread count. The `reference` namespace keeps plain serial loops used as
// the oracle in tests and as the benchmark baseline.

namespace sortline::nn {

namespace kernels {

/// y = x W + b
void dense_forward(const double* x, int batch, int in, const double* w, const double* b, int out,
                   double* y);

/// dx = dy W^T
void dense_backward_input(const double* dy, int batch, int out, const double* w, int in,
                          double* dx);

/// dW += x^T dy, db += column sums of dy
void dense_backward_params(const double* x, const double* dy, int batch, int in, int out,
                           double* dw, double* db);

/// y = max(y, 0) in place
void relu(double* y, int n);

/// dy *= (activation > 0)
void relu_backward(const double* activation, double* dy, int n);

}  // namespace kernels

namespace reference {

void dense_forward(const double* x, int batch, int in, const double* w, const double* b, int out,
                   double* y);
void dense_backward_input(const double* dy, int batch, int out, const double* w, int in,
                          double* dx);
void dense_backward_params(const double* x, const double* dy, int batch, int in, int out,
                           double* dw, double* db);

}  // namespace reference

}  // namespace sortline::nn
