#include "anonet/config.hpp"

#include "anonet/errors.hpp"

#include <json.hpp>

namespace anonet::train {

std::string to_string(Schedule s) {
    return s == Schedule::Toggle ? "toggle" : "simultaneous";
}

Schedule schedule_from_string(const std::string& s) {
    if (s == "toggle") return Schedule::Toggle;
    if (s == "simultaneous") return Schedule::Simultaneous;
    throw ConfigError("unknown schedule: " + s);
}

std::string to_string(AdversarialLoss a) {
    return a == AdversarialLoss::Anchor ? "anchor" : "reversal";
}

AdversarialLoss adversarial_loss_from_string(const std::string& s) {
    if (s == "anchor") return AdversarialLoss::Anchor;
    if (s == "reversal") return AdversarialLoss::Reversal;
    throw ConfigError("unknown adversarial loss: " + s);
}

void TrainConfig::validate() const {
    if (lambda < 0.0) throw ConfigError("config: lambda must be >= 0");
    if (lr_encoder <= 0.0 || lr_branch <= 0.0) throw ConfigError("config: learning rates must be > 0");
    if (lr_encoder > lr_branch)
        throw ConfigError("config: encoder learning rate must not exceed the branch rate");
    if (momentum < 0.0 || momentum >= 1.0) throw ConfigError("config: momentum must be in [0,1)");
    if (batch_size == 0) throw ConfigError("config: batch size must be positive");
    if (dropout < 0.0 || dropout >= 1.0) throw ConfigError("config: dropout must be in [0,1)");
    if (encoder_widths.empty()) throw ConfigError("config: encoder geometry is empty");
}

std::string TrainConfig::to_json() const {
    nlohmann::ordered_json j;
    j["lambda"] = lambda;
    j["lr_encoder"] = lr_encoder;
    j["lr_branch"] = lr_branch;
    j["momentum"] = momentum;
    j["batch_size"] = batch_size;
    j["block_size"] = block_size;
    j["pretrain_regular_epochs"] = pretrain_regular_epochs;
    j["pretrain_private_epochs"] = pretrain_private_epochs;
    j["adversarial_blocks"] = adversarial_blocks;
    j["patience"] = patience;
    j["dropout"] = dropout;
    j["seed"] = seed;
    j["schedule"] = to_string(schedule);
    j["adversarial_loss"] = to_string(adversarial_loss);
    j["encoder_widths"] = encoder_widths;
    j["branch_widths"] = branch_widths;
    j["attacker_widths"] = attacker_widths;
    j["attacker_epochs"] = attacker_epochs;
    return j.dump(2);
}

TrainConfig TrainConfig::from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    TrainConfig c;
    std::vector<std::string> unknown;
    for (const auto& [key, value] : j.items()) {
        try {
            if (key == "lambda") c.lambda = value.get<double>();
            else if (key == "lr_encoder") c.lr_encoder = value.get<double>();
            else if (key == "lr_branch") c.lr_branch = value.get<double>();
            else if (key == "momentum") c.momentum = value.get<double>();
            else if (key == "batch_size") c.batch_size = value.get<std::size_t>();
            else if (key == "block_size") c.block_size = value.get<std::size_t>();
            else if (key == "pretrain_regular_epochs") c.pretrain_regular_epochs = value.get<std::size_t>();
            else if (key == "pretrain_private_epochs") c.pretrain_private_epochs = value.get<std::size_t>();
            else if (key == "adversarial_blocks") c.adversarial_blocks = value.get<std::size_t>();
            else if (key == "patience") c.patience = value.get<std::size_t>();
            else if (key == "dropout") c.dropout = value.get<double>();
            else if (key == "seed") c.seed = value.get<std::uint64_t>();
            else if (key == "schedule") c.schedule = schedule_from_string(value.get<std::string>());
            else if (key == "adversarial_loss")
                c.adversarial_loss = adversarial_loss_from_string(value.get<std::string>());
            else if (key == "encoder_widths") c.encoder_widths = value.get<std::vector<std::size_t>>();
            else if (key == "branch_widths") c.branch_widths = value.get<std::vector<std::size_t>>();
            else if (key == "attacker_widths") c.attacker_widths = value.get<std::vector<std::size_t>>();
            else if (key == "attacker_epochs") c.attacker_epochs = value.get<std::size_t>();
            else unknown.push_back(key);
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError("config: bad value for '" + key + "': " + e.what());
        }
    }
    if (!unknown.empty()) {
        std::string msg = "config: unknown keys:";
        for (const auto& k : unknown) msg += " " + k;
        throw ConfigError(msg);
    }
    c.validate();
    return c;
}

TrainConfig TrainConfig::paper_preset() {
    TrainConfig c;
    c.encoder_widths.assign(8, 700);
    c.branch_widths.assign(2, 700);
    return c;
}

std::vector<std::size_t> default_attacker_widths(const std::vector<std::size_t>& encoder_widths,
                                                 const std::vector<std::size_t>& branch_widths) {
    // Mirrors cascading an encoder-deep stack with a private branch.
    std::vector<std::size_t> widths = encoder_widths;
    widths.insert(widths.end(), branch_widths.begin(), branch_widths.end());
    return widths;
}

}  // namespace anonet::train
