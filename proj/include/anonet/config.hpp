#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace anonet::train {

enum class Schedule { Toggle, Simultaneous };

std::string to_string(Schedule s);
Schedule schedule_from_string(const std::string& s);

/// Encoder adversarial term. Anchor is the random-guess objective
/// lambda*|L_p_obj - L_p|; Reversal is the plain negated cross-entropy
/// -lambda*L_p of earlier domain-adaptation work, kept for schedule
/// comparisons (it has no lower bound and can blow up).
enum class AdversarialLoss { Anchor, Reversal };

std::string to_string(AdversarialLoss a);
AdversarialLoss adversarial_loss_from_string(const std::string& s);

/// Full training configuration; serializes to/from JSON so a config file is
/// a complete record of a run.
struct TrainConfig {
    double lambda = 0.0;
    double lr_encoder = 0.002;  // must be <= lr_branch
    double lr_branch = 0.01;
    double momentum = 0.9;
    std::size_t batch_size = 64;
    std::size_t block_size = 0;  // adversarial block N; 0 means train-set size
    std::size_t pretrain_regular_epochs = 100;
    std::size_t pretrain_private_epochs = 100;
    std::size_t adversarial_blocks = 40;
    std::size_t patience = 10;  // evaluations without val improvement
    double dropout = 0.1;
    std::uint64_t seed = 1;
    Schedule schedule = Schedule::Toggle;
    AdversarialLoss adversarial_loss = AdversarialLoss::Anchor;

    // Geometry. Encoder widths end at the representation dimension; branch
    // widths are the hidden layers before the softmax.
    std::vector<std::size_t> encoder_widths{256, 256, 256, 256};
    std::vector<std::size_t> branch_widths{128, 128};

    // Attacker: hidden widths of the dedicated network retrained on frozen
    // representations; empty mirrors encoder depth + private branch depth.
    std::vector<std::size_t> attacker_widths;
    std::size_t attacker_epochs = 60;

    void validate() const;

    std::string to_json() const;
    static TrainConfig from_json(const std::string& text);

    /// The paper-scale geometry (8x700 encoder, 3-layer branches).
    static TrainConfig paper_preset();
};

std::vector<std::size_t> default_attacker_widths(const std::vector<std::size_t>& encoder_widths,
                                                 const std::vector<std::size_t>& branch_widths);

}  // namespace anonet::train
