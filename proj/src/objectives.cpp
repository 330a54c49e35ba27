#include "anonet/objectives.hpp"

#include <cmath>

#include "anonet/errors.hpp"

namespace anonet::objectives {

void EmpiricalDistribution::validate() const {
    double sum = 0.0;
    for (double p : probs) {
        if (p < 0.0) throw InputError("EmpiricalDistribution: negative probability");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw InputError("EmpiricalDistribution: probabilities do not sum to 1");
}

EmpiricalDistribution empirical_distribution(const std::vector<std::size_t>& labels,
                                             std::size_t alphabet) {
    if (labels.empty()) throw InputError("empirical_distribution: empty dataset");
    EmpiricalDistribution dist;
    dist.sample_count = labels.size();
    dist.probs.assign(alphabet, 0.0);
    for (std::size_t z : labels) {
        if (z >= alphabet) throw InputError("empirical_distribution: label out of range");
        dist.probs[z] += 1.0;
    }
    for (double& p : dist.probs) p /= static_cast<double>(labels.size());
    return dist;
}

namespace {

double mean_neg_log_target(const Matrix& predictions, const std::vector<std::size_t>& labels) {
    if (predictions.rows == 0 || predictions.rows != labels.size())
        throw ShapeError("cross-entropy: prediction/label count mismatch");
    double total = 0.0;
    for (std::size_t i = 0; i < predictions.rows; ++i) {
        if (labels[i] >= predictions.cols) throw InputError("cross-entropy: label out of range");
        total += -std::log(predictions(i, labels[i]));
    }
    return total / static_cast<double>(predictions.rows);
}

}  // namespace

double regular_loss(const Matrix& predictions, const std::vector<std::size_t>& labels) {
    return mean_neg_log_target(predictions, labels);
}

double private_loss(const Matrix& predictions, const std::vector<std::size_t>& labels) {
    return mean_neg_log_target(predictions, labels);
}

double private_objective_loss(const Matrix& predictions, const EmpiricalDistribution& p_hat) {
    if (predictions.cols != p_hat.alphabet())
        throw ShapeError("private_objective_loss: alphabet mismatch");
    if (predictions.rows == 0) throw ShapeError("private_objective_loss: empty predictions");
    double total = 0.0;
    for (std::size_t i = 0; i < predictions.rows; ++i) {
        const double* row = predictions.row(i);
        for (std::size_t z = 0; z < predictions.cols; ++z) {
            if (p_hat.probs[z] > 0.0) total += p_hat.probs[z] * -std::log(row[z]);
        }
    }
    return total / static_cast<double>(predictions.rows);
}

EncoderObjective encoder_objective(double loss_regular, double loss_private,
                                   double loss_private_objective, double lambda) {
    if (lambda < 0.0) throw ConfigError("encoder_objective: lambda must be >= 0");
    const double gap = loss_private_objective - loss_private;
    EncoderObjective result;
    result.sign = gap > 0.0 ? 1 : (gap < 0.0 ? -1 : 0);
    result.value = loss_regular + lambda * std::abs(gap);
    return result;
}

LossBundle loss_bundle(const TriTrace& trace, const std::vector<std::size_t>& labels_regular,
                       const std::vector<std::size_t>& labels_private,
                       const EmpiricalDistribution& p_hat_private, double lambda) {
    LossBundle b;
    b.lambda = lambda;
    b.regular = regular_loss(trace.regular.output(), labels_regular);
    b.private_ = private_loss(trace.private_.output(), labels_private);
    b.private_objective = private_objective_loss(trace.private_.output(), p_hat_private);
    const auto obj = encoder_objective(b.regular, b.private_, b.private_objective, lambda);
    b.encoder_objective = obj.value;
    b.sign = obj.sign;
    return b;
}

Matrix cross_entropy_logit_grad(const Matrix& probs, const std::vector<std::size_t>& labels) {
    if (probs.rows != labels.size()) throw ShapeError("logit grad: prediction/label count mismatch");
    Matrix g = probs;
    const double inv_n = 1.0 / static_cast<double>(probs.rows);
    for (std::size_t i = 0; i < probs.rows; ++i) {
        if (labels[i] >= probs.cols) throw InputError("logit grad: label out of range");
        g(i, labels[i]) -= 1.0;
        for (std::size_t j = 0; j < probs.cols; ++j) g(i, j) *= inv_n;
    }
    return g;
}

Matrix objective_logit_grad(const Matrix& probs, const EmpiricalDistribution& p_hat) {
    if (probs.cols != p_hat.alphabet()) throw ShapeError("objective logit grad: alphabet mismatch");
    Matrix g = probs;
    const double inv_n = 1.0 / static_cast<double>(probs.rows);
    for (std::size_t i = 0; i < probs.rows; ++i)
        for (std::size_t j = 0; j < probs.cols; ++j) g(i, j) = (g(i, j) - p_hat.probs[j]) * inv_n;
    return g;
}

namespace {

// Gradient wrt the (masked) representation of
// L_r + lambda*sign*(L_p_obj - L_p), with branch layer gradients as a
// byproduct. The adversarial term's softmax contributions cancel, leaving
// lambda*sign*(onehot(z) - p_hat)/n at the private logits.
struct BranchBackprop {
    Matrix repr_grad;
    std::vector<nn::LayerParams> regular;
    std::vector<nn::LayerParams> private_;
};

std::vector<nn::LayerParams> zero_like(const nn::NetStack& net) {
    std::vector<nn::LayerParams> z(net.params.size());
    for (std::size_t i = 0; i < net.params.size(); ++i) {
        z[i].weight = Matrix(net.params[i].weight.rows, net.params[i].weight.cols);
        z[i].bias = Matrix(1, net.params[i].bias.cols);
    }
    return z;
}

BranchBackprop branch_backprop(const TriNet& net, const TriTrace& trace,
                               const std::vector<std::size_t>& labels_regular,
                               const std::vector<std::size_t>& labels_private,
                               const EmpiricalDistribution& p_hat_private, double lambda,
                               int sign) {
    if (trace.regular.output().rows != labels_regular.size())
        throw StateError("encoder_gradient: trace does not match batch labels");

    BranchBackprop out;
    const Matrix reg_grad = cross_entropy_logit_grad(trace.regular.output(), labels_regular);
    auto reg_back = nn::backward_from_logits(net.regular_branch, trace.regular, reg_grad);
    out.regular = std::move(reg_back.layers);
    out.repr_grad = std::move(reg_back.input_grad);

    if (lambda > 0.0 && sign != 0) {
        const Matrix obj_grad = objective_logit_grad(trace.private_.output(), p_hat_private);
        const Matrix ce_grad = cross_entropy_logit_grad(trace.private_.output(), labels_private);
        Matrix priv_logit_grad(obj_grad.rows, obj_grad.cols);
        const double scale = lambda * static_cast<double>(sign);
        for (std::size_t i = 0; i < priv_logit_grad.size(); ++i)
            priv_logit_grad.data[i] = scale * (obj_grad.data[i] - ce_grad.data[i]);
        auto priv_back = nn::backward_from_logits(net.private_branch, trace.private_, priv_logit_grad);
        out.private_ = std::move(priv_back.layers);
        for (std::size_t i = 0; i < out.repr_grad.size(); ++i)
            out.repr_grad.data[i] += priv_back.input_grad.data[i];
    } else {
        out.private_ = zero_like(net.private_branch);
    }
    return out;
}

}  // namespace

std::vector<nn::LayerParams> encoder_gradient(const TriNet& net, const TriTrace& trace,
                                              const std::vector<std::size_t>& labels_regular,
                                              const std::vector<std::size_t>& labels_private,
                                              const EmpiricalDistribution& p_hat_private,
                                              double lambda, int sign) {
    auto back = branch_backprop(net, trace, labels_regular, labels_private, p_hat_private, lambda,
                                sign);
    return encoder_backward(net, trace, back.repr_grad);
}

std::vector<nn::LayerParams> encoder_gradient_reversal(const TriNet& net, const TriTrace& trace,
                                                       const std::vector<std::size_t>& labels_regular,
                                                       const std::vector<std::size_t>& labels_private,
                                                       double lambda) {
    if (lambda < 0.0) throw ConfigError("encoder_gradient_reversal: lambda must be >= 0");
    const Matrix reg_grad = cross_entropy_logit_grad(trace.regular.output(), labels_regular);
    auto reg_back = nn::backward_from_logits(net.regular_branch, trace.regular, reg_grad);
    Matrix repr_grad = std::move(reg_back.input_grad);
    if (lambda > 0.0) {
        Matrix priv_grad = cross_entropy_logit_grad(trace.private_.output(), labels_private);
        for (double& v : priv_grad.data) v *= -lambda;
        auto priv_back = nn::backward_from_logits(net.private_branch, trace.private_, priv_grad);
        for (std::size_t i = 0; i < repr_grad.size(); ++i)
            repr_grad.data[i] += priv_back.input_grad.data[i];
    }
    return encoder_backward(net, trace, repr_grad);
}

TriGradients encoder_objective_gradients(const TriNet& net, const TriTrace& trace,
                                         const std::vector<std::size_t>& labels_regular,
                                         const std::vector<std::size_t>& labels_private,
                                         const EmpiricalDistribution& p_hat_private, double lambda,
                                         int sign) {
    auto back = branch_backprop(net, trace, labels_regular, labels_private, p_hat_private, lambda,
                                sign);
    TriGradients out;
    out.regular = std::move(back.regular);
    out.private_ = std::move(back.private_);
    out.encoder = encoder_backward(net, trace, back.repr_grad);
    return out;
}

}  // namespace anonet::objectives
