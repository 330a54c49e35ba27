#pragma once

#include <vector>

#include "anonet/matrix.hpp"
#include "anonet/trinet.hpp"

namespace anonet::objectives {

/// Class probabilities estimated from sample counts.
struct EmpiricalDistribution {
    std::vector<double> probs;
    std::size_t sample_count = 0;

    std::size_t alphabet() const { return probs.size(); }
    void validate() const;
};

EmpiricalDistribution empirical_distribution(const std::vector<std::size_t>& labels,
                                             std::size_t alphabet);

/// Mean over rows of -log p[label]. Rows must be probability vectors.
double regular_loss(const Matrix& predictions, const std::vector<std::size_t>& labels);

/// Same computation over the private alphabet.
double private_loss(const Matrix& predictions, const std::vector<std::size_t>& labels);

/// Mean over rows of <p_hat, -log row>: the loss of a predictor matching
/// the random-guess distribution. Equals H(p_hat) iff every row is p_hat.
double private_objective_loss(const Matrix& predictions, const EmpiricalDistribution& p_hat);

/// L_r + lambda * |L_p_obj - L_p| and the sign of the gap.
struct EncoderObjective {
    double value = 0.0;
    int sign = 0;  // sign(L_p_obj - L_p); 0 exactly at the kink
};

EncoderObjective encoder_objective(double loss_regular, double loss_private,
                                   double loss_private_objective, double lambda);

/// All losses of one pass plus the combined objective.
struct LossBundle {
    double regular = 0.0;
    double private_ = 0.0;
    double private_objective = 0.0;
    double lambda = 0.0;
    double encoder_objective = 0.0;
    int sign = 0;
};

LossBundle loss_bundle(const TriTrace& trace, const std::vector<std::size_t>& labels_regular,
                       const std::vector<std::size_t>& labels_private,
                       const EmpiricalDistribution& p_hat_private, double lambda);

/// Gradient of the encoder objective wrt theta_c:
/// grad L_r + lambda * sign * (grad L_p_obj - grad L_p), chained through
/// both branches into the encoder. Branch parameters receive no update
/// from this path.
std::vector<nn::LayerParams> encoder_gradient(const TriNet& net, const TriTrace& trace,
                                              const std::vector<std::size_t>& labels_regular,
                                              const std::vector<std::size_t>& labels_private,
                                              const EmpiricalDistribution& p_hat_private,
                                              double lambda, int sign);

/// Gradient-reversal variant kept for schedule comparisons: the encoder
/// descends L_r - lambda * L_p, i.e. it maximizes the private cross-entropy
/// with no random-guess anchor.
std::vector<nn::LayerParams> encoder_gradient_reversal(const TriNet& net, const TriTrace& trace,
                                                       const std::vector<std::size_t>& labels_regular,
                                                       const std::vector<std::size_t>& labels_private,
                                                       double lambda);

/// Full gradient of the encoder objective wrt every parameter group, for
/// finite-difference verification. The trainer only ever applies the
/// encoder part.
TriGradients encoder_objective_gradients(const TriNet& net, const TriTrace& trace,
                                         const std::vector<std::size_t>& labels_regular,
                                         const std::vector<std::size_t>& labels_private,
                                         const EmpiricalDistribution& p_hat_private, double lambda,
                                         int sign);

/// d loss / d logits for the batch cross-entropies, already divided by the
/// batch size: (softmax - target) / n.
Matrix cross_entropy_logit_grad(const Matrix& probs, const std::vector<std::size_t>& labels);
Matrix objective_logit_grad(const Matrix& probs, const EmpiricalDistribution& p_hat);

}  // namespace anonet::objectives
