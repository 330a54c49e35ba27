#pragma once

#include "anonet/nn.hpp"

namespace anonet {

/// Encoder trunk plus the two classifier branches. The regular branch ends
/// in a softmax over |Y|, the private branch in a softmax over |Z|.
struct TriNet {
    nn::NetStack encoder;
    nn::NetStack regular_branch;
    nn::NetStack private_branch;

    void validate() const;
    std::size_t param_count() const;
};

/// Geometry helper: encoder hidden widths (last entry is the representation
/// dimension), branch hidden widths, alphabet sizes.
struct TriNetShape {
    std::size_t input_dim = 0;
    std::vector<std::size_t> encoder_widths;
    std::vector<std::size_t> branch_widths;
    std::size_t regular_classes = 0;
    std::size_t private_classes = 0;
};

TriNet make_trinet(const TriNetShape& shape, RngStream& rng);

/// One full pass: encoder, a dropout mask shared by both branches on the
/// representation, then each branch. Branch traces see the same masked u.
struct TriTrace {
    nn::ForwardTrace encoder;
    Matrix repr;          // encoder output u
    Matrix repr_mask;     // shared mask on u (empty in eval / no dropout)
    Matrix repr_dropped;  // what the branches consumed
    nn::ForwardTrace regular;
    nn::ForwardTrace private_;
};

TriTrace tri_forward(const TriNet& net, const Matrix& batch, const nn::DropoutSpec& dropout,
                     nn::PassMode mode, RngStream& rng);

/// Gradients of one scalar loss wrt all three parameter groups.
struct TriGradients {
    std::vector<nn::LayerParams> encoder;
    std::vector<nn::LayerParams> regular;
    std::vector<nn::LayerParams> private_;
};

/// Chains a gradient wrt the (masked) representation back through the
/// shared mask and the encoder.
std::vector<nn::LayerParams> encoder_backward(const TriNet& net, const TriTrace& trace,
                                              const Matrix& repr_grad);

}  // namespace anonet
