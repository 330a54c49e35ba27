#include "anonet/trinet.hpp"

#include "anonet/errors.hpp"
#include "anonet/kernels.hpp"

namespace anonet {

void TriNet::validate() const {
    encoder.validate();
    regular_branch.validate();
    private_branch.validate();
    if (encoder.output_dim() != regular_branch.input_dim() ||
        encoder.output_dim() != private_branch.input_dim())
        throw ShapeError("TriNet: encoder output dim does not match branch input dims");
    if (regular_branch.layers.back().activation != nn::Activation::Softmax ||
        private_branch.layers.back().activation != nn::Activation::Softmax)
        throw ConfigError("TriNet: branches must end in softmax");
}

std::size_t TriNet::param_count() const {
    return encoder.param_count() + regular_branch.param_count() + private_branch.param_count();
}

TriNet make_trinet(const TriNetShape& shape, RngStream& rng) {
    if (shape.encoder_widths.empty()) throw ConfigError("make_trinet: empty encoder geometry");
    if (shape.regular_classes < 2 || shape.private_classes < 2)
        throw ConfigError("make_trinet: alphabets need at least two classes");

    std::vector<std::size_t> enc{shape.input_dim};
    enc.insert(enc.end(), shape.encoder_widths.begin(), shape.encoder_widths.end());

    const std::size_t repr = shape.encoder_widths.back();
    std::vector<std::size_t> reg{repr};
    reg.insert(reg.end(), shape.branch_widths.begin(), shape.branch_widths.end());
    reg.push_back(shape.regular_classes);
    std::vector<std::size_t> priv{repr};
    priv.insert(priv.end(), shape.branch_widths.begin(), shape.branch_widths.end());
    priv.push_back(shape.private_classes);

    TriNet net;
    net.encoder = nn::make_stack(enc, nn::Activation::Relu, rng);
    net.regular_branch = nn::make_stack(reg, nn::Activation::Softmax, rng);
    net.private_branch = nn::make_stack(priv, nn::Activation::Softmax, rng);
    net.validate();
    return net;
}

TriTrace tri_forward(const TriNet& net, const Matrix& batch, const nn::DropoutSpec& dropout,
                     nn::PassMode mode, RngStream& rng) {
    TriTrace trace;
    trace.encoder = nn::forward(net.encoder, batch, dropout, mode, rng);
    trace.repr = trace.encoder.output();

    const bool drop = mode == nn::PassMode::Train && dropout.p_out > 0.0 && dropout.between_hidden;
    if (drop) {
        trace.repr_mask = Matrix(trace.repr.rows, trace.repr.cols);
        const double keep = 1.0 - dropout.p_out;
        const double scale = 1.0 / keep;
        for (double& m : trace.repr_mask.data) m = rng.uniform01() < keep ? scale : 0.0;
        kernels::apply_mask(trace.repr, trace.repr_mask, trace.repr_dropped);
    } else {
        trace.repr_dropped = trace.repr;
    }

    // Branches never mask their own input; u's mask is shared above.
    nn::DropoutSpec branch_dropout = dropout;
    branch_dropout.on_input = false;
    trace.regular = nn::forward(net.regular_branch, trace.repr_dropped, branch_dropout, mode, rng);
    trace.private_ = nn::forward(net.private_branch, trace.repr_dropped, branch_dropout, mode, rng);
    return trace;
}

std::vector<nn::LayerParams> encoder_backward(const TriNet& net, const TriTrace& trace,
                                              const Matrix& repr_grad) {
    Matrix g = repr_grad;
    if (trace.repr_mask.size() > 0) kernels::apply_mask(g, trace.repr_mask, g);
    return nn::backward(net.encoder, trace.encoder, g).layers;
}

}  // namespace anonet
