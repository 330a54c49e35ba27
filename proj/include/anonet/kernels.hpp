#pragma once

#include "anonet/matrix.hpp"

namespace anonet::kernels {

// Dense kernels behind forward/backward passes. Each kernel exists twice:
// the OpenMP version used everywhere, and a serial reference in
// kernels::serial used by tests and the benchmark. Both accumulate every
// output element in the same index order, so results are bit-identical
// for any thread count.

/// c = a * b
void matmul(const Matrix& a, const Matrix& b, Matrix& c);

/// c = a^T * b  (a: n x r, b: n x c, result r x c). The reduction over the
/// shared leading dimension runs in ascending row order per output element.
void matmul_at_b(const Matrix& a, const Matrix& b, Matrix& c);

/// c = a * b^T  (a: n x k, b: m x k, result n x m)
void matmul_a_bt(const Matrix& a, const Matrix& b, Matrix& c);

/// out[i,:] = in[i,:] + bias[0,:]
void add_bias_rows(const Matrix& in, const Matrix& bias, Matrix& out);

/// Column sums: out (1 x cols) = sum over rows of g.
void column_sums(const Matrix& g, Matrix& out);

void relu(const Matrix& in, Matrix& out);

/// grad_in = grad_out where activation output > 0, else 0.
void relu_backward(const Matrix& activated, const Matrix& grad_out, Matrix& grad_in);

/// Row-wise softmax with max-shift for stability.
void softmax_rows(const Matrix& logits, Matrix& out);

/// Exact softmax Jacobian applied row-wise:
/// grad_in[i,j] = p[i,j] * (grad_out[i,j] - <grad_out[i,:], p[i,:]>).
void softmax_backward(const Matrix& probs, const Matrix& grad_out, Matrix& grad_in);

/// out = in .* mask (elementwise)
void apply_mask(const Matrix& in, const Matrix& mask, Matrix& out);

namespace serial {
void matmul(const Matrix& a, const Matrix& b, Matrix& c);
void matmul_at_b(const Matrix& a, const Matrix& b, Matrix& c);
void matmul_a_bt(const Matrix& a, const Matrix& b, Matrix& c);
void add_bias_rows(const Matrix& in, const Matrix& bias, Matrix& out);
void column_sums(const Matrix& g, Matrix& out);
void relu(const Matrix& in, Matrix& out);
void relu_backward(const Matrix& activated, const Matrix& grad_out, Matrix& grad_in);
void softmax_rows(const Matrix& logits, Matrix& out);
void softmax_backward(const Matrix& probs, const Matrix& grad_out, Matrix& grad_in);
void apply_mask(const Matrix& in, const Matrix& mask, Matrix& out);
}  // namespace serial

}  // namespace anonet::kernels
