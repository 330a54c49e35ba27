#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "anonet/matrix.hpp"
#include "anonet/rng.hpp"

namespace anonet::nn {

enum class Activation { Identity, Relu, Softmax };

std::string to_string(Activation a);
Activation activation_from_string(const std::string& s);

struct LayerSpec {
    std::size_t input_dim = 0;
    std::size_t output_dim = 0;
    Activation activation = Activation::Relu;
};

struct LayerParams {
    Matrix weight;  // input_dim x output_dim
    Matrix bias;    // 1 x output_dim
};

/// A stack of affine+activation layers. Softmax is only allowed as the
/// final layer.
struct NetStack {
    std::vector<LayerSpec> layers;
    std::vector<LayerParams> params;

    std::size_t input_dim() const { return layers.empty() ? 0 : layers.front().input_dim; }
    std::size_t output_dim() const { return layers.empty() ? 0 : layers.back().output_dim; }
    std::size_t param_count() const;

    void validate() const;
};

/// Builds a stack from layer sizes: input -> hidden... -> output, ReLU on
/// hidden layers and `final_act` on the last. Weights drawn uniform in
/// +-sqrt(6/(fan_in+fan_out)), biases zero.
NetStack make_stack(const std::vector<std::size_t>& dims, Activation final_act, RngStream& rng);

struct DropoutSpec {
    double p_out = 0.0;        // drop probability, in [0,1)
    bool on_input = false;     // mask the batch before the first layer
    bool between_hidden = false;  // mask after each non-final activation
    std::uint64_t stream = 0;  // rng stream id, recorded for reproducibility

    bool active() const { return p_out > 0.0 && (on_input || between_hidden); }
};

enum class PassMode { Train, Eval };

/// Everything the matching backward pass needs. `inputs[i]` is what layer i
/// consumed (after any dropout), `post[i]` its activation output. Masks are
/// the inverted-dropout masks actually applied (empty in eval mode).
struct ForwardTrace {
    PassMode mode = PassMode::Eval;
    std::vector<Matrix> inputs;
    std::vector<Matrix> post;
    Matrix input_mask;               // empty when no input dropout
    std::vector<Matrix> hidden_masks;  // one per non-final layer when active

    const Matrix& output() const { return post.back(); }
};

ForwardTrace forward(const NetStack& net, const Matrix& batch, const DropoutSpec& dropout,
                     PassMode mode, RngStream& rng);

/// Eval-mode forward without dropout or rng.
Matrix evaluate(const NetStack& net, const Matrix& batch);

struct StackGradients {
    std::vector<LayerParams> layers;  // same shapes as net.params
    Matrix input_grad;                // gradient wrt the raw batch
};

/// Backpropagation from d(loss)/d(output). The final activation's Jacobian
/// is applied (exact softmax Jacobian for softmax heads).
StackGradients backward(const NetStack& net, const ForwardTrace& trace, const Matrix& output_grad);

/// Backpropagation from d(loss)/d(final pre-activation). Used with the
/// fused softmax cross-entropy gradient.
StackGradients backward_from_logits(const NetStack& net, const ForwardTrace& trace,
                                    const Matrix& logit_grad);

/// Loss and gradient of one softmax cross-entropy row computed from logits
/// via max-shifted log-sum-exp. Gradient is wrt the logits.
struct SoftmaxCrossEntropy {
    double loss = 0.0;
    std::vector<double> grad;
};
SoftmaxCrossEntropy softmax_cross_entropy(const std::vector<double>& logits,
                                          const std::vector<double>& target_dist);

/// Nesterov-momentum SGD state. The caller evaluates gradients at the
/// lookahead point theta + momentum * velocity; the step then applies
/// v <- momentum*v - lr*g, theta <- theta + v.
struct OptimizerState {
    std::vector<LayerParams> velocity;
    double learning_rate = 0.01;
    double momentum = 0.0;

    static OptimizerState create(const NetStack& net, double learning_rate, double momentum);
};

void nesterov_step(NetStack& net, const std::vector<LayerParams>& grads, OptimizerState& state);

/// Parameters shifted to the lookahead point theta + momentum * velocity.
NetStack lookahead(const NetStack& net, const OptimizerState& state);

}  // namespace anonet::nn
