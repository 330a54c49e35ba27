#pragma once

#include <functional>
#include <optional>
#include <string>

#include "anonet/config.hpp"
#include "anonet/dataset.hpp"
#include "anonet/evalreport.hpp"
#include "anonet/trinet.hpp"

namespace anonet::train {

/// Serializable training state: everything needed to continue a run
/// bit-identically from where it stopped.
struct TrainerState {
    TrainConfig config;
    TriNet net;
    nn::OptimizerState opt_encoder;
    nn::OptimizerState opt_regular;
    nn::OptimizerState opt_private;

    // 0 = pretrain regular, 1 = pretrain private, 2 = adversarial, 3 = done.
    std::size_t phase = 0;
    std::size_t progress = 0;  // completed epochs/blocks in the current phase
    double best_val_loss = 0.0;
    bool has_best = false;
    std::size_t evals_since_best = 0;

    std::string order_rng;    // serialized streams
    std::string dropout_rng;

    std::size_t feature_dim = 0;
    std::size_t y_alphabet = 0;
    std::size_t z_alphabet = 0;
};

struct BlockMetrics {
    std::size_t block = 0;
    double loss_regular = 0.0;
    double loss_private = 0.0;
    double loss_private_objective = 0.0;
    double gap = 0.0;  // |L_p_obj - L_p|
    int sign = 0;
};

/// Runs the three-phase procedure of one configuration over fixed train and
/// validation splits. Deterministic given (config, data); serializable at
/// epoch/block boundaries.
class Trainer {
public:
    Trainer(const TrainConfig& config, const data::Dataset& train_set, const data::Dataset& val_set);
    Trainer(TrainerState state, const data::Dataset& train_set, const data::Dataset& val_set);

    /// Phase drivers. Each runs its phase to completion (epoch cap or
    /// validation plateau) and advances `state().phase`. Calling a driver
    /// for an already-finished phase is a no-op.
    void pretrain_regular();
    void pretrain_private();
    void adversarial();  // toggle or simultaneous, per config

    void run_all();

    /// One epoch/block of the current phase; false when the phase is done
    /// before the step happens. Used by resumable loops.
    bool step_current_phase();

    const TrainerState& state() const { return state_; }
    TrainerState& mutable_state() { return state_; }
    const TriNet& net() const { return state_.net; }
    const std::vector<BlockMetrics>& block_metrics() const { return block_metrics_; }

    /// Deterministic representations of a dataset (eval-mode encoder).
    Matrix encode(const data::Dataset& set) const;

private:
    void epoch_pretrain_regular();
    void epoch_pretrain_private();
    void block_toggle();
    void block_simultaneous();
    bool plateau_update(double val_loss);
    void check_finite_or_rollback(const TrainerState& snapshot);
    double val_loss_current_phase();

    TrainerState state_;
    const data::Dataset& train_;
    const data::Dataset& val_;
    objectives::EmpiricalDistribution p_hat_z_;
    Matrix frozen_repr_;  // cached eval-mode representations for phase 1
    bool frozen_repr_valid_ = false;
    std::vector<BlockMetrics> block_metrics_;
};

/// Trains a fresh dedicated network on (encoder(x), z) pairs and reports
/// its held-out accuracy: the primary anonymization metric.
struct AttackerResult {
    nn::NetStack net;
    double test_accuracy = 0.0;
    double test_cross_entropy = 0.0;
    Matrix test_predictions;
};

AttackerResult train_attacker(const Matrix& repr_train, const std::vector<std::size_t>& z_train,
                              const Matrix& repr_val, const std::vector<std::size_t>& z_val,
                              const Matrix& repr_test, const std::vector<std::size_t>& z_test,
                              std::size_t z_alphabet, const TrainConfig& config);

/// One row of a lambda sweep.
struct SweepRecord {
    int schema_version = 1;
    double lambda = 0.0;
    std::uint64_t seed = 0;
    std::string schedule;
    double regular_acc_train = 0.0;
    double regular_acc_val = 0.0;
    double regular_acc_test = 0.0;
    double private_branch_acc_test = 0.0;
    double private_attacker_acc_test = 0.0;
    double loss_regular_test = 0.0;
    double loss_private_test = 0.0;
    double loss_private_objective_test = 0.0;
    double loss_attacker_test = 0.0;
    double bound_lower_attacker = 0.0;   // g^{-1}(min(L_attacker, log|Z|))
    double bound_lower_empirical = 0.0;  // H(P_Z)-corrected variant
    double bound_upper_regular = 0.0;    // 1 - exp(-L_r)
    double gap_final = 0.0;              // |L_p_obj - L_p| at the end of training
    double wall_time_s = 0.0;
    std::string data_hash;
    std::string error;  // non-empty when this lambda failed

    static std::string csv_header();
    std::string to_csv_row() const;
    std::string to_json_line() const;
    static SweepRecord from_json_line(const std::string& line);
};

struct SweepResult {
    std::vector<SweepRecord> records;
    bool any_failed = false;
};

/// Full pipeline per lambda: pretrain, adversarial phase, attacker retrain,
/// bound estimates. `emit` is called after each record so partial results
/// survive interruption; per-lambda failures are recorded and the sweep
/// continues.
SweepResult lambda_sweep(const data::Dataset& train_set, const data::Dataset& val_set,
                         const data::Dataset& test_set, const TrainConfig& base_config,
                         const std::vector<double>& lambdas, const std::string& data_hash,
                         const std::function<void(const SweepRecord&)>& emit = nullptr,
                         const std::function<bool(double)>& skip_lambda = nullptr);

/// Evaluation of a trained TriNet plus optional attacker on one dataset.
eval::EvalReport evaluate_trinet(const TriNet& net, const data::Dataset& set,
                                 const objectives::EmpiricalDistribution& p_hat_z,
                                 const Matrix* attacker_predictions = nullptr);

}  // namespace anonet::train
