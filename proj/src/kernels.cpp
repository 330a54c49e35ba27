#include "anonet/kernels.hpp"

#include <cmath>
#include <cstring>

#include "anonet/errors.hpp"

namespace anonet {

bool Matrix::all_finite() const {
    for (double v : data)
        if (!std::isfinite(v)) return false;
    return true;
}

Matrix transpose(const Matrix& a) {
    Matrix t(a.cols, a.rows);
    for (std::size_t i = 0; i < a.rows; ++i)
        for (std::size_t j = 0; j < a.cols; ++j) t(j, i) = a(i, j);
    return t;
}

}  // namespace anonet

namespace anonet::kernels {

namespace {

void require(bool ok, const char* what) {
    if (!ok) throw ShapeError(what);
}

// Shared element loops. The OpenMP entry points parallelize over the
// outermost index only; each output element is owned by a single thread
// and accumulated in the same order as the serial path.

inline void matmul_row(const Matrix& a, const Matrix& b, Matrix& c, std::size_t i) {
    double* crow = c.row(i);
    std::memset(crow, 0, sizeof(double) * c.cols);
    const double* arow = a.row(i);
    for (std::size_t k = 0; k < a.cols; ++k) {
        const double aik = arow[k];
        const double* brow = b.row(k);
        for (std::size_t j = 0; j < b.cols; ++j) crow[j] += aik * brow[j];
    }
}

inline void at_b_row(const Matrix& a, const Matrix& b, Matrix& c, std::size_t i) {
    double* crow = c.row(i);
    std::memset(crow, 0, sizeof(double) * c.cols);
    for (std::size_t n = 0; n < a.rows; ++n) {
        const double ani = a(n, i);
        const double* brow = b.row(n);
        for (std::size_t j = 0; j < b.cols; ++j) crow[j] += ani * brow[j];
    }
}

inline void a_bt_row(const Matrix& a, const Matrix& b, Matrix& c, std::size_t i) {
    const double* arow = a.row(i);
    double* crow = c.row(i);
    for (std::size_t j = 0; j < b.rows; ++j) {
        const double* brow = b.row(j);
        double acc = 0.0;
        for (std::size_t k = 0; k < a.cols; ++k) acc += arow[k] * brow[k];
        crow[j] = acc;
    }
}

inline void softmax_row(const Matrix& logits, Matrix& out, std::size_t i) {
    const double* in = logits.row(i);
    double* o = out.row(i);
    double mx = in[0];
    for (std::size_t j = 1; j < logits.cols; ++j) mx = std::max(mx, in[j]);
    double sum = 0.0;
    for (std::size_t j = 0; j < logits.cols; ++j) {
        o[j] = std::exp(in[j] - mx);
        sum += o[j];
    }
    const double inv = 1.0 / sum;
    for (std::size_t j = 0; j < logits.cols; ++j) o[j] *= inv;
}

inline void softmax_backward_row(const Matrix& probs, const Matrix& grad_out, Matrix& grad_in,
                                 std::size_t i) {
    const double* p = probs.row(i);
    const double* g = grad_out.row(i);
    double* gi = grad_in.row(i);
    double dot = 0.0;
    for (std::size_t j = 0; j < probs.cols; ++j) dot += g[j] * p[j];
    for (std::size_t j = 0; j < probs.cols; ++j) gi[j] = p[j] * (g[j] - dot);
}

void check_matmul(const Matrix& a, const Matrix& b, Matrix& c) {
    require(a.cols == b.rows, "matmul: inner dimensions differ");
    if (c.rows != a.rows || c.cols != b.cols) c = Matrix(a.rows, b.cols);
}

void check_at_b(const Matrix& a, const Matrix& b, Matrix& c) {
    require(a.rows == b.rows, "matmul_at_b: leading dimensions differ");
    if (c.rows != a.cols || c.cols != b.cols) c = Matrix(a.cols, b.cols);
}

void check_a_bt(const Matrix& a, const Matrix& b, Matrix& c) {
    require(a.cols == b.cols, "matmul_a_bt: trailing dimensions differ");
    if (c.rows != a.rows || c.cols != b.rows) c = Matrix(a.rows, b.rows);
}

}  // namespace

void matmul(const Matrix& a, const Matrix& b, Matrix& c) {
    check_matmul(a, b, c);
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < a.rows; ++i) matmul_row(a, b, c, i);
}

void matmul_at_b(const Matrix& a, const Matrix& b, Matrix& c) {
    check_at_b(a, b, c);
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < a.cols; ++i) at_b_row(a, b, c, i);
}

void matmul_a_bt(const Matrix& a, const Matrix& b, Matrix& c) {
    check_a_bt(a, b, c);
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < a.rows; ++i) a_bt_row(a, b, c, i);
}

void add_bias_rows(const Matrix& in, const Matrix& bias, Matrix& out) {
    require(bias.rows == 1 && bias.cols == in.cols, "add_bias_rows: bias shape");
    if (!out.same_shape(in)) out = Matrix(in.rows, in.cols);
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < in.rows; ++i) {
        const double* r = in.row(i);
        double* o = out.row(i);
        for (std::size_t j = 0; j < in.cols; ++j) o[j] = r[j] + bias.data[j];
    }
}

void column_sums(const Matrix& g, Matrix& out) {
    if (out.rows != 1 || out.cols != g.cols) out = Matrix(1, g.cols);
#pragma omp parallel for schedule(static)
    for (std::size_t j = 0; j < g.cols; ++j) {
        double acc = 0.0;
        for (std::size_t i = 0; i < g.rows; ++i) acc += g(i, j);
        out.data[j] = acc;
    }
}

void relu(const Matrix& in, Matrix& out) {
    if (!out.same_shape(in)) out = Matrix(in.rows, in.cols);
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < in.size(); ++i) out.data[i] = in.data[i] > 0.0 ? in.data[i] : 0.0;
}

void relu_backward(const Matrix& activated, const Matrix& grad_out, Matrix& grad_in) {
    require(activated.same_shape(grad_out), "relu_backward: shape mismatch");
    if (!grad_in.same_shape(grad_out)) grad_in = Matrix(grad_out.rows, grad_out.cols);
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < grad_out.size(); ++i)
        grad_in.data[i] = activated.data[i] > 0.0 ? grad_out.data[i] : 0.0;
}

void softmax_rows(const Matrix& logits, Matrix& out) {
    require(logits.cols > 0, "softmax_rows: empty rows");
    if (!out.same_shape(logits)) out = Matrix(logits.rows, logits.cols);
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < logits.rows; ++i) softmax_row(logits, out, i);
}

void softmax_backward(const Matrix& probs, const Matrix& grad_out, Matrix& grad_in) {
    require(probs.same_shape(grad_out), "softmax_backward: shape mismatch");
    if (!grad_in.same_shape(grad_out)) grad_in = Matrix(grad_out.rows, grad_out.cols);
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < probs.rows; ++i) softmax_backward_row(probs, grad_out, grad_in, i);
}

void apply_mask(const Matrix& in, const Matrix& mask, Matrix& out) {
    require(in.same_shape(mask), "apply_mask: shape mismatch");
    if (!out.same_shape(in)) out = Matrix(in.rows, in.cols);
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < in.size(); ++i) out.data[i] = in.data[i] * mask.data[i];
}

namespace serial {

void matmul(const Matrix& a, const Matrix& b, Matrix& c) {
    check_matmul(a, b, c);
    for (std::size_t i = 0; i < a.rows; ++i) matmul_row(a, b, c, i);
}

void matmul_at_b(const Matrix& a, const Matrix& b, Matrix& c) {
    check_at_b(a, b, c);
    for (std::size_t i = 0; i < a.cols; ++i) at_b_row(a, b, c, i);
}

void matmul_a_bt(const Matrix& a, const Matrix& b, Matrix& c) {
    check_a_bt(a, b, c);
    for (std::size_t i = 0; i < a.rows; ++i) a_bt_row(a, b, c, i);
}

void add_bias_rows(const Matrix& in, const Matrix& bias, Matrix& out) {
    require(bias.rows == 1 && bias.cols == in.cols, "add_bias_rows: bias shape");
    if (!out.same_shape(in)) out = Matrix(in.rows, in.cols);
    for (std::size_t i = 0; i < in.rows; ++i) {
        const double* r = in.row(i);
        double* o = out.row(i);
        for (std::size_t j = 0; j < in.cols; ++j) o[j] = r[j] + bias.data[j];
    }
}

void column_sums(const Matrix& g, Matrix& out) {
    if (out.rows != 1 || out.cols != g.cols) out = Matrix(1, g.cols);
    for (std::size_t j = 0; j < g.cols; ++j) {
        double acc = 0.0;
        for (std::size_t i = 0; i < g.rows; ++i) acc += g(i, j);
        out.data[j] = acc;
    }
}

void relu(const Matrix& in, Matrix& out) {
    if (!out.same_shape(in)) out = Matrix(in.rows, in.cols);
    for (std::size_t i = 0; i < in.size(); ++i) out.data[i] = in.data[i] > 0.0 ? in.data[i] : 0.0;
}

void relu_backward(const Matrix& activated, const Matrix& grad_out, Matrix& grad_in) {
    require(activated.same_shape(grad_out), "relu_backward: shape mismatch");
    if (!grad_in.same_shape(grad_out)) grad_in = Matrix(grad_out.rows, grad_out.cols);
    for (std::size_t i = 0; i < grad_out.size(); ++i)
        grad_in.data[i] = activated.data[i] > 0.0 ? grad_out.data[i] : 0.0;
}

void softmax_rows(const Matrix& logits, Matrix& out) {
    require(logits.cols > 0, "softmax_rows: empty rows");
    if (!out.same_shape(logits)) out = Matrix(logits.rows, logits.cols);
    for (std::size_t i = 0; i < logits.rows; ++i) softmax_row(logits, out, i);
}

void softmax_backward(const Matrix& probs, const Matrix& grad_out, Matrix& grad_in) {
    require(probs.same_shape(grad_out), "softmax_backward: shape mismatch");
    if (!grad_in.same_shape(grad_out)) grad_in = Matrix(grad_out.rows, grad_out.cols);
    for (std::size_t i = 0; i < probs.rows; ++i) softmax_backward_row(probs, grad_out, grad_in, i);
}

void apply_mask(const Matrix& in, const Matrix& mask, Matrix& out) {
    require(in.same_shape(mask), "apply_mask: shape mismatch");
    if (!out.same_shape(in)) out = Matrix(in.rows, in.cols);
    for (std::size_t i = 0; i < in.size(); ++i) out.data[i] = in.data[i] * mask.data[i];
}

}  // namespace serial

}  // namespace anonet::kernels
