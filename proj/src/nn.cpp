#include "anonet/nn.hpp"

#include <algorithm>
#include <cmath>

#include "anonet/errors.hpp"
#include "anonet/kernels.hpp"

namespace anonet::nn {

std::string to_string(Activation a) {
    switch (a) {
        case Activation::Identity: return "identity";
        case Activation::Relu: return "relu";
        case Activation::Softmax: return "softmax";
    }
    return "?";
}

Activation activation_from_string(const std::string& s) {
    if (s == "identity") return Activation::Identity;
    if (s == "relu") return Activation::Relu;
    if (s == "softmax") return Activation::Softmax;
    throw ConfigError("unknown activation: " + s);
}

std::size_t NetStack::param_count() const {
    std::size_t n = 0;
    for (const auto& p : params) n += p.weight.size() + p.bias.size();
    return n;
}

void NetStack::validate() const {
    if (layers.size() != params.size()) throw StateError("NetStack: layer/param count mismatch");
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const auto& l = layers[i];
        const auto& p = params[i];
        if (p.weight.rows != l.input_dim || p.weight.cols != l.output_dim)
            throw ShapeError("NetStack: weight shape does not match spec at layer " + std::to_string(i));
        if (p.bias.rows != 1 || p.bias.cols != l.output_dim)
            throw ShapeError("NetStack: bias shape does not match spec at layer " + std::to_string(i));
        if (i + 1 < layers.size()) {
            if (l.output_dim != layers[i + 1].input_dim)
                throw ShapeError("NetStack: dimension chain broken at layer " + std::to_string(i));
            if (l.activation == Activation::Softmax)
                throw ConfigError("NetStack: softmax allowed only as the final layer");
        }
    }
}

NetStack make_stack(const std::vector<std::size_t>& dims, Activation final_act, RngStream& rng) {
    if (dims.size() < 2) throw ConfigError("make_stack: need at least input and output dims");
    NetStack net;
    for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
        const bool last = (i + 2 == dims.size());
        LayerSpec spec{dims[i], dims[i + 1], last ? final_act : Activation::Relu};
        LayerParams p;
        p.weight = Matrix(spec.input_dim, spec.output_dim);
        p.bias = Matrix(1, spec.output_dim);
        const double bound = std::sqrt(6.0 / static_cast<double>(spec.input_dim + spec.output_dim));
        for (double& w : p.weight.data) w = rng.uniform(-bound, bound);
        net.layers.push_back(spec);
        net.params.push_back(std::move(p));
    }
    net.validate();
    return net;
}

namespace {

Matrix draw_mask(std::size_t rows, std::size_t cols, double p_out, RngStream& rng) {
    // Inverted dropout: survivors scaled by 1/(1-p) so eval needs no rescale.
    Matrix mask(rows, cols);
    const double keep = 1.0 - p_out;
    const double scale = 1.0 / keep;
    for (double& m : mask.data) m = rng.uniform01() < keep ? scale : 0.0;
    return mask;
}

void apply_activation(Activation act, const Matrix& pre, Matrix& post) {
    switch (act) {
        case Activation::Identity: post = pre; break;
        case Activation::Relu: kernels::relu(pre, post); break;
        case Activation::Softmax: kernels::softmax_rows(pre, post); break;
    }
}

}  // namespace

ForwardTrace forward(const NetStack& net, const Matrix& batch, const DropoutSpec& dropout,
                     PassMode mode, RngStream& rng) {
    net.validate();
    if (net.layers.empty()) throw StateError("forward: empty stack");
    if (batch.cols != net.input_dim())
        throw ShapeError("forward: batch cols " + std::to_string(batch.cols) + " != input dim " +
                         std::to_string(net.input_dim()));
    if (!batch.all_finite()) throw InputError("forward: non-finite input");

    const bool drop = mode == PassMode::Train && dropout.p_out > 0.0;
    ForwardTrace trace;
    trace.mode = mode;
    trace.inputs.resize(net.layers.size());
    trace.post.resize(net.layers.size());

    Matrix current = batch;
    if (drop && dropout.on_input) {
        trace.input_mask = draw_mask(batch.rows, batch.cols, dropout.p_out, rng);
        kernels::apply_mask(current, trace.input_mask, current);
    }

    Matrix pre;
    for (std::size_t i = 0; i < net.layers.size(); ++i) {
        trace.inputs[i] = current;
        kernels::matmul(trace.inputs[i], net.params[i].weight, pre);
        kernels::add_bias_rows(pre, net.params[i].bias, pre);
        apply_activation(net.layers[i].activation, pre, trace.post[i]);
        current = trace.post[i];
        const bool hidden = i + 1 < net.layers.size();
        if (drop && dropout.between_hidden && hidden) {
            Matrix mask = draw_mask(current.rows, current.cols, dropout.p_out, rng);
            kernels::apply_mask(current, mask, current);
            trace.hidden_masks.push_back(std::move(mask));
        }
    }
    return trace;
}

Matrix evaluate(const NetStack& net, const Matrix& batch) {
    RngStream rng(0);
    return forward(net, batch, DropoutSpec{}, PassMode::Eval, rng).output();
}

namespace {

StackGradients backprop(const NetStack& net, const ForwardTrace& trace, Matrix grad,
                        bool grad_is_logit_grad) {
    if (trace.inputs.size() != net.layers.size() || trace.post.size() != net.layers.size())
        throw StateError("backward: trace does not match net");
    if (!grad.same_shape(trace.post.back()))
        throw StateError("backward: output gradient shape does not match trace output");

    StackGradients out;
    out.layers.resize(net.layers.size());

    const bool dropped_hidden = !trace.hidden_masks.empty();
    Matrix pre_grad;
    for (std::size_t idx = net.layers.size(); idx-- > 0;) {
        const bool last = (idx + 1 == net.layers.size());
        // Through the activation (the fused path arrives as d/d(pre) already).
        if (last && grad_is_logit_grad) {
            pre_grad = std::move(grad);
        } else {
            switch (net.layers[idx].activation) {
                case Activation::Identity: pre_grad = std::move(grad); break;
                case Activation::Relu: kernels::relu_backward(trace.post[idx], grad, pre_grad); break;
                case Activation::Softmax:
                    kernels::softmax_backward(trace.post[idx], grad, pre_grad);
                    break;
            }
        }
        kernels::matmul_at_b(trace.inputs[idx], pre_grad, out.layers[idx].weight);
        kernels::column_sums(pre_grad, out.layers[idx].bias);
        kernels::matmul_a_bt(pre_grad, net.params[idx].weight, grad);
        if (idx > 0 && dropped_hidden) {
            // grad is now wrt layer idx-1's dropped output; undo the mask.
            kernels::apply_mask(grad, trace.hidden_masks[idx - 1], grad);
        }
    }
    if (trace.input_mask.size() > 0) kernels::apply_mask(grad, trace.input_mask, grad);
    out.input_grad = std::move(grad);
    return out;
}

}  // namespace

StackGradients backward(const NetStack& net, const ForwardTrace& trace, const Matrix& output_grad) {
    return backprop(net, trace, output_grad, false);
}

StackGradients backward_from_logits(const NetStack& net, const ForwardTrace& trace,
                                    const Matrix& logit_grad) {
    return backprop(net, trace, logit_grad, true);
}

SoftmaxCrossEntropy softmax_cross_entropy(const std::vector<double>& logits,
                                          const std::vector<double>& target_dist) {
    if (logits.empty() || logits.size() != target_dist.size())
        throw ShapeError("softmax_cross_entropy: empty or mismatched vectors");
    double tsum = 0.0;
    for (double t : target_dist) tsum += t;
    if (std::abs(tsum - 1.0) > 1e-9)
        throw InputError("softmax_cross_entropy: target does not sum to 1");

    const double mx = *std::max_element(logits.begin(), logits.end());
    double lse = 0.0;
    for (double l : logits) lse += std::exp(l - mx);
    lse = std::log(lse) + mx;

    SoftmaxCrossEntropy result;
    result.grad.resize(logits.size());
    for (std::size_t j = 0; j < logits.size(); ++j) {
        result.loss += target_dist[j] * (lse - logits[j]);
        result.grad[j] = std::exp(logits[j] - lse) - target_dist[j];
    }
    return result;
}

OptimizerState OptimizerState::create(const NetStack& net, double learning_rate, double momentum) {
    if (learning_rate <= 0.0) throw ConfigError("OptimizerState: learning rate must be > 0");
    if (momentum < 0.0 || momentum >= 1.0) throw ConfigError("OptimizerState: momentum must be in [0,1)");
    OptimizerState s;
    s.learning_rate = learning_rate;
    s.momentum = momentum;
    s.velocity.resize(net.params.size());
    for (std::size_t i = 0; i < net.params.size(); ++i) {
        s.velocity[i].weight = Matrix(net.params[i].weight.rows, net.params[i].weight.cols);
        s.velocity[i].bias = Matrix(1, net.params[i].bias.cols);
    }
    return s;
}

namespace {
void step_one(Matrix& theta, const Matrix& g, Matrix& v, double lr, double mom) {
    if (!theta.same_shape(g) || !theta.same_shape(v))
        throw ShapeError("nesterov_step: shape mismatch");
    for (std::size_t i = 0; i < theta.size(); ++i) {
        v.data[i] = mom * v.data[i] - lr * g.data[i];
        theta.data[i] += v.data[i];
    }
}
}  // namespace

void nesterov_step(NetStack& net, const std::vector<LayerParams>& grads, OptimizerState& state) {
    if (state.learning_rate <= 0.0) throw ConfigError("nesterov_step: learning rate must be > 0");
    if (grads.size() != net.params.size() || state.velocity.size() != net.params.size())
        throw ShapeError("nesterov_step: gradient/state size mismatch");
    for (std::size_t i = 0; i < net.params.size(); ++i) {
        step_one(net.params[i].weight, grads[i].weight, state.velocity[i].weight,
                 state.learning_rate, state.momentum);
        step_one(net.params[i].bias, grads[i].bias, state.velocity[i].bias, state.learning_rate,
                 state.momentum);
    }
}

NetStack lookahead(const NetStack& net, const OptimizerState& state) {
    NetStack ahead = net;
    if (state.momentum == 0.0) return ahead;
    for (std::size_t i = 0; i < net.params.size(); ++i) {
        for (std::size_t k = 0; k < ahead.params[i].weight.size(); ++k)
            ahead.params[i].weight.data[k] += state.momentum * state.velocity[i].weight.data[k];
        for (std::size_t k = 0; k < ahead.params[i].bias.size(); ++k)
            ahead.params[i].bias.data[k] += state.momentum * state.velocity[i].bias.data[k];
    }
    return ahead;
}

}  // namespace anonet::nn
