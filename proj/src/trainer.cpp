#include "anonet/trainer.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "anonet/errors.hpp"
#include "anonet/infotheory.hpp"
#include "anonet/kernels.hpp"

#include <json.hpp>

namespace anonet::train {

namespace {

std::vector<std::size_t> iota_indices(std::size_t n) {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    return idx;
}

std::vector<std::vector<std::size_t>> chunks(const std::vector<std::size_t>& indices,
                                             std::size_t batch, std::size_t limit) {
    std::vector<std::vector<std::size_t>> out;
    const std::size_t n = std::min(limit, indices.size());
    for (std::size_t start = 0; start < n; start += batch) {
        const std::size_t end = std::min(start + batch, n);
        out.emplace_back(indices.begin() + static_cast<std::ptrdiff_t>(start),
                         indices.begin() + static_cast<std::ptrdiff_t>(end));
    }
    return out;
}

nn::DropoutSpec encoder_dropout(const TrainConfig& cfg) {
    return nn::DropoutSpec{cfg.dropout, true, true, 0};
}

nn::DropoutSpec branch_dropout(const TrainConfig& cfg) {
    return nn::DropoutSpec{cfg.dropout, false, true, 0};
}

// Shared mask on the representation, as in tri_forward, for phases that
// touch only the encoder and the regular branch.
struct DuoTrace {
    nn::ForwardTrace encoder;
    Matrix repr_mask;
    Matrix repr_dropped;
    nn::ForwardTrace branch;
};

DuoTrace duo_forward(const nn::NetStack& encoder, const nn::NetStack& branch, const Matrix& batch,
                     const TrainConfig& cfg, nn::PassMode mode, RngStream& rng) {
    DuoTrace t;
    t.encoder = nn::forward(encoder, batch, encoder_dropout(cfg), mode, rng);
    const Matrix& u = t.encoder.output();
    if (mode == nn::PassMode::Train && cfg.dropout > 0.0) {
        t.repr_mask = Matrix(u.rows, u.cols);
        const double keep = 1.0 - cfg.dropout;
        const double scale = 1.0 / keep;
        for (double& m : t.repr_mask.data) m = rng.uniform01() < keep ? scale : 0.0;
        kernels::apply_mask(u, t.repr_mask, t.repr_dropped);
    } else {
        t.repr_dropped = u;
    }
    t.branch = nn::forward(branch, t.repr_dropped, branch_dropout(cfg), mode, rng);
    return t;
}

}  // namespace

Trainer::Trainer(const TrainConfig& config, const data::Dataset& train_set,
                 const data::Dataset& val_set)
    : train_(train_set), val_(val_set) {
    config.validate();
    train_set.validate();
    state_.config = config;
    state_.feature_dim = train_set.feature_dim;
    state_.y_alphabet = train_set.y_alphabet;
    state_.z_alphabet = train_set.z_alphabet;

    RngStream init_rng(config.seed, 0);
    TriNetShape shape;
    shape.input_dim = train_set.feature_dim;
    shape.encoder_widths = config.encoder_widths;
    shape.branch_widths = config.branch_widths;
    shape.regular_classes = train_set.y_alphabet;
    shape.private_classes = train_set.z_alphabet;
    state_.net = make_trinet(shape, init_rng);

    state_.opt_encoder = nn::OptimizerState::create(state_.net.encoder, config.lr_encoder, config.momentum);
    state_.opt_regular = nn::OptimizerState::create(state_.net.regular_branch, config.lr_branch, config.momentum);
    state_.opt_private = nn::OptimizerState::create(state_.net.private_branch, config.lr_branch, config.momentum);

    state_.order_rng = RngStream(config.seed, 1).serialize();
    state_.dropout_rng = RngStream(config.seed, 2).serialize();
    p_hat_z_ = train_set.p_hat_z();
}

Trainer::Trainer(TrainerState state, const data::Dataset& train_set, const data::Dataset& val_set)
    : state_(std::move(state)), train_(train_set), val_(val_set) {
    state_.config.validate();
    if (train_set.feature_dim != state_.feature_dim || train_set.y_alphabet != state_.y_alphabet ||
        train_set.z_alphabet != state_.z_alphabet)
        throw StateError("Trainer: dataset does not match checkpoint dimensions");
    p_hat_z_ = train_set.p_hat_z();
}

Matrix Trainer::encode(const data::Dataset& set) const {
    return nn::evaluate(state_.net.encoder, set.all_features());
}

bool Trainer::plateau_update(double val_loss) {
    if (!state_.has_best || val_loss < state_.best_val_loss - 1e-9) {
        state_.best_val_loss = val_loss;
        state_.has_best = true;
        state_.evals_since_best = 0;
        return false;
    }
    ++state_.evals_since_best;
    return state_.evals_since_best >= state_.config.patience;
}

void Trainer::check_finite_or_rollback(const TrainerState& snapshot) {
    bool ok = true;
    for (const auto& p : state_.net.encoder.params)
        ok = ok && p.weight.all_finite() && p.bias.all_finite();
    for (const auto& p : state_.net.regular_branch.params)
        ok = ok && p.weight.all_finite() && p.bias.all_finite();
    for (const auto& p : state_.net.private_branch.params)
        ok = ok && p.weight.all_finite() && p.bias.all_finite();
    if (!ok) {
        state_ = snapshot;
        throw NumericError("training diverged (non-finite parameters); state rolled back to the "
                           "last completed step");
    }
}

double Trainer::val_loss_current_phase() {
    if (val_.size() == 0) return 0.0;
    if (state_.phase == 0) {
        RngStream rng(0);
        auto t = duo_forward(state_.net.encoder, state_.net.regular_branch, val_.all_features(),
                             state_.config, nn::PassMode::Eval, rng);
        return objectives::regular_loss(t.branch.output(), val_.all_y());
    }
    if (state_.phase == 1) {
        Matrix repr = encode(val_);
        Matrix probs = nn::evaluate(state_.net.private_branch, repr);
        return objectives::private_loss(probs, val_.all_z());
    }
    return 0.0;
}

void Trainer::epoch_pretrain_regular() {
    RngStream order = RngStream::deserialize(state_.order_rng);
    RngStream dropout = RngStream::deserialize(state_.dropout_rng);

    auto indices = iota_indices(train_.size());
    order.shuffle(indices);
    for (const auto& chunk : chunks(indices, state_.config.batch_size, indices.size())) {
        const Matrix batch = train_.features_of(chunk);
        const auto labels = train_.labels_y_of(chunk);

        const nn::NetStack enc_ahead = nn::lookahead(state_.net.encoder, state_.opt_encoder);
        const nn::NetStack reg_ahead = nn::lookahead(state_.net.regular_branch, state_.opt_regular);
        auto trace = duo_forward(enc_ahead, reg_ahead, batch, state_.config, nn::PassMode::Train, dropout);

        const Matrix logit_grad = objectives::cross_entropy_logit_grad(trace.branch.output(), labels);
        auto branch_back = nn::backward_from_logits(reg_ahead, trace.branch, logit_grad);
        Matrix repr_grad = std::move(branch_back.input_grad);
        if (trace.repr_mask.size() > 0) kernels::apply_mask(repr_grad, trace.repr_mask, repr_grad);
        auto enc_grads = nn::backward(enc_ahead, trace.encoder, repr_grad).layers;

        nn::nesterov_step(state_.net.encoder, enc_grads, state_.opt_encoder);
        nn::nesterov_step(state_.net.regular_branch, branch_back.layers, state_.opt_regular);
    }

    state_.order_rng = order.serialize();
    state_.dropout_rng = dropout.serialize();
}

void Trainer::epoch_pretrain_private() {
    if (!frozen_repr_valid_) {
        frozen_repr_ = encode(train_);
        frozen_repr_valid_ = true;
    }
    RngStream order = RngStream::deserialize(state_.order_rng);
    RngStream dropout = RngStream::deserialize(state_.dropout_rng);

    auto indices = iota_indices(train_.size());
    order.shuffle(indices);
    const auto all_z = train_.all_z();
    for (const auto& chunk : chunks(indices, state_.config.batch_size, indices.size())) {
        Matrix batch(chunk.size(), frozen_repr_.cols);
        std::vector<std::size_t> labels(chunk.size());
        for (std::size_t i = 0; i < chunk.size(); ++i) {
            std::copy(frozen_repr_.row(chunk[i]), frozen_repr_.row(chunk[i]) + frozen_repr_.cols,
                      batch.row(i));
            labels[i] = all_z[chunk[i]];
        }
        const nn::NetStack priv_ahead = nn::lookahead(state_.net.private_branch, state_.opt_private);
        auto trace = nn::forward(priv_ahead, batch, branch_dropout(state_.config),
                                 nn::PassMode::Train, dropout);
        const Matrix logit_grad = objectives::cross_entropy_logit_grad(trace.output(), labels);
        auto back = nn::backward_from_logits(priv_ahead, trace, logit_grad);
        nn::nesterov_step(state_.net.private_branch, back.layers, state_.opt_private);
    }

    state_.order_rng = order.serialize();
    state_.dropout_rng = dropout.serialize();
}

void Trainer::block_toggle() {
    RngStream order = RngStream::deserialize(state_.order_rng);
    RngStream dropout = RngStream::deserialize(state_.dropout_rng);
    const std::size_t block_n =
        state_.config.block_size == 0 ? train_.size() : std::min(state_.config.block_size, train_.size());

    // (a) Branch updates only: both predictors minimize their own
    // cross-entropy; the encoder is never stepped in this sub-block.
    auto indices = iota_indices(train_.size());
    order.shuffle(indices);
    for (const auto& chunk : chunks(indices, state_.config.batch_size, block_n)) {
        const Matrix batch = train_.features_of(chunk);
        const auto y = train_.labels_y_of(chunk);
        const auto z = train_.labels_z_of(chunk);

        TriNet view;
        view.encoder = state_.net.encoder;
        view.regular_branch = nn::lookahead(state_.net.regular_branch, state_.opt_regular);
        view.private_branch = nn::lookahead(state_.net.private_branch, state_.opt_private);
        auto trace = tri_forward(view, batch, encoder_dropout(state_.config), nn::PassMode::Train, dropout);

        const Matrix reg_grad = objectives::cross_entropy_logit_grad(trace.regular.output(), y);
        const Matrix priv_grad = objectives::cross_entropy_logit_grad(trace.private_.output(), z);
        auto reg_back = nn::backward_from_logits(view.regular_branch, trace.regular, reg_grad);
        auto priv_back = nn::backward_from_logits(view.private_branch, trace.private_, priv_grad);
        nn::nesterov_step(state_.net.regular_branch, reg_back.layers, state_.opt_regular);
        nn::nesterov_step(state_.net.private_branch, priv_back.layers, state_.opt_private);
    }

    // (b) Encoder updates only. The sign of the gap comes from each
    // minibatch's current forward losses; freezing it across a block makes
    // large-lambda runs overshoot the random-guess anchor and oscillate.
    order.shuffle(indices);
    BlockMetrics metrics;
    metrics.block = state_.progress;
    {
        std::vector<std::size_t> block_indices(indices.begin(),
                                               indices.begin() + static_cast<std::ptrdiff_t>(block_n));
        RngStream eval_rng(0);
        auto trace = tri_forward(state_.net, train_.features_of(block_indices),
                                 nn::DropoutSpec{}, nn::PassMode::Eval, eval_rng);
        auto bundle = objectives::loss_bundle(trace, train_.labels_y_of(block_indices),
                                              train_.labels_z_of(block_indices), p_hat_z_,
                                              state_.config.lambda);
        metrics.loss_regular = bundle.regular;
        metrics.loss_private = bundle.private_;
        metrics.loss_private_objective = bundle.private_objective;
        metrics.gap = std::abs(bundle.private_objective - bundle.private_);
        metrics.sign = bundle.sign;
    }
    for (const auto& chunk : chunks(indices, state_.config.batch_size, block_n)) {
        const Matrix batch = train_.features_of(chunk);
        const auto y = train_.labels_y_of(chunk);
        const auto z = train_.labels_z_of(chunk);

        TriNet view;
        view.encoder = nn::lookahead(state_.net.encoder, state_.opt_encoder);
        view.regular_branch = state_.net.regular_branch;
        view.private_branch = state_.net.private_branch;
        auto trace = tri_forward(view, batch, encoder_dropout(state_.config), nn::PassMode::Train, dropout);

        auto enc_grads =
            state_.config.adversarial_loss == AdversarialLoss::Reversal
                ? objectives::encoder_gradient_reversal(view, trace, y, z, state_.config.lambda)
                : objectives::encoder_gradient(
                      view, trace, y, z, p_hat_z_, state_.config.lambda,
                      objectives::loss_bundle(trace, y, z, p_hat_z_, state_.config.lambda).sign);
        nn::nesterov_step(state_.net.encoder, enc_grads, state_.opt_encoder);
    }
    block_metrics_.push_back(metrics);

    state_.order_rng = order.serialize();
    state_.dropout_rng = dropout.serialize();
}

void Trainer::block_simultaneous() {
    RngStream order = RngStream::deserialize(state_.order_rng);
    RngStream dropout = RngStream::deserialize(state_.dropout_rng);
    const std::size_t block_n =
        state_.config.block_size == 0 ? train_.size() : std::min(state_.config.block_size, train_.size());

    auto indices = iota_indices(train_.size());
    order.shuffle(indices);
    BlockMetrics metrics;
    metrics.block = state_.progress;
    for (const auto& chunk : chunks(indices, state_.config.batch_size, block_n)) {
        const Matrix batch = train_.features_of(chunk);
        const auto y = train_.labels_y_of(chunk);
        const auto z = train_.labels_z_of(chunk);

        TriNet view;
        view.encoder = nn::lookahead(state_.net.encoder, state_.opt_encoder);
        view.regular_branch = nn::lookahead(state_.net.regular_branch, state_.opt_regular);
        view.private_branch = nn::lookahead(state_.net.private_branch, state_.opt_private);
        auto trace = tri_forward(view, batch, encoder_dropout(state_.config), nn::PassMode::Train, dropout);

        // Branches follow their own losses; the encoder follows the
        // adversarial objective with the minibatch's own sign.
        auto bundle = objectives::loss_bundle(trace, y, z, p_hat_z_, state_.config.lambda);
        const Matrix reg_grad = objectives::cross_entropy_logit_grad(trace.regular.output(), y);
        const Matrix priv_grad = objectives::cross_entropy_logit_grad(trace.private_.output(), z);
        auto reg_back = nn::backward_from_logits(view.regular_branch, trace.regular, reg_grad);
        auto priv_back = nn::backward_from_logits(view.private_branch, trace.private_, priv_grad);
        auto enc_grads =
            state_.config.adversarial_loss == AdversarialLoss::Reversal
                ? objectives::encoder_gradient_reversal(view, trace, y, z, state_.config.lambda)
                : objectives::encoder_gradient(view, trace, y, z, p_hat_z_, state_.config.lambda,
                                               bundle.sign);

        nn::nesterov_step(state_.net.encoder, enc_grads, state_.opt_encoder);
        nn::nesterov_step(state_.net.regular_branch, reg_back.layers, state_.opt_regular);
        nn::nesterov_step(state_.net.private_branch, priv_back.layers, state_.opt_private);

        metrics.loss_regular = bundle.regular;
        metrics.loss_private = bundle.private_;
        metrics.loss_private_objective = bundle.private_objective;
        metrics.gap = std::abs(bundle.private_objective - bundle.private_);
        metrics.sign = bundle.sign;
    }
    block_metrics_.push_back(metrics);

    state_.order_rng = order.serialize();
    state_.dropout_rng = dropout.serialize();
}

bool Trainer::step_current_phase() {
    const TrainerState snapshot = state_;
    switch (state_.phase) {
        case 0: {
            if (state_.progress >= state_.config.pretrain_regular_epochs) break;
            epoch_pretrain_regular();
            ++state_.progress;
            check_finite_or_rollback(snapshot);
            if (val_.size() > 0 && plateau_update(val_loss_current_phase())) {
                state_.phase = 1;
                state_.progress = 0;
                state_.has_best = false;
                state_.evals_since_best = 0;
            }
            return true;
        }
        case 1: {
            if (state_.progress >= state_.config.pretrain_private_epochs) break;
            epoch_pretrain_private();
            ++state_.progress;
            check_finite_or_rollback(snapshot);
            if (val_.size() > 0 && plateau_update(val_loss_current_phase())) {
                state_.phase = 2;
                state_.progress = 0;
                state_.has_best = false;
                state_.evals_since_best = 0;
            }
            return true;
        }
        case 2: {
            if (state_.progress >= state_.config.adversarial_blocks) break;
            if (state_.config.schedule == Schedule::Toggle)
                block_toggle();
            else
                block_simultaneous();
            ++state_.progress;
            check_finite_or_rollback(snapshot);
            return true;
        }
        default: return false;
    }
    // Phase cap reached: advance.
    if (state_.phase < 3) {
        ++state_.phase;
        state_.progress = 0;
        state_.has_best = false;
        state_.evals_since_best = 0;
        frozen_repr_valid_ = false;
        return false;
    }
    return false;
}

void Trainer::pretrain_regular() {
    while (state_.phase == 0 && step_current_phase()) {
    }
}

void Trainer::pretrain_private() {
    if (state_.phase < 1) throw StateError("pretrain_private: regular pretraining not finished");
    while (state_.phase == 1 && step_current_phase()) {
    }
}

void Trainer::adversarial() {
    if (state_.phase < 2) throw StateError("adversarial: pretraining not finished");
    while (state_.phase == 2 && step_current_phase()) {
    }
}

void Trainer::run_all() {
    pretrain_regular();
    pretrain_private();
    adversarial();
}

AttackerResult train_attacker(const Matrix& repr_train, const std::vector<std::size_t>& z_train,
                              const Matrix& repr_val, const std::vector<std::size_t>& z_val,
                              const Matrix& repr_test, const std::vector<std::size_t>& z_test,
                              std::size_t z_alphabet, const TrainConfig& config) {
    if (repr_train.rows != z_train.size() || repr_train.rows == 0)
        throw InputError("train_attacker: representation/label mismatch");

    std::vector<std::size_t> widths = config.attacker_widths.empty()
                                          ? default_attacker_widths(config.encoder_widths,
                                                                    config.branch_widths)
                                          : config.attacker_widths;
    std::vector<std::size_t> dims{repr_train.cols};
    dims.insert(dims.end(), widths.begin(), widths.end());
    dims.push_back(z_alphabet);

    RngStream init_rng(config.seed, 77);
    RngStream order = RngStream(config.seed, 78);
    RngStream dropout = RngStream(config.seed, 79);
    AttackerResult result;
    result.net = nn::make_stack(dims, nn::Activation::Softmax, init_rng);
    auto opt = nn::OptimizerState::create(result.net, config.lr_branch, config.momentum);

    // Early stopping with best-weights restore keeps the attacker's test
    // loss close to its achievable cross-entropy, which the Fano-type
    // estimate depends on.
    double best_val = std::numeric_limits<double>::infinity();
    std::size_t since_best = 0;
    nn::NetStack best_net = result.net;
    auto indices = iota_indices(repr_train.rows);
    for (std::size_t epoch = 0; epoch < config.attacker_epochs; ++epoch) {
        order.shuffle(indices);
        for (const auto& chunk : chunks(indices, config.batch_size, indices.size())) {
            Matrix batch(chunk.size(), repr_train.cols);
            std::vector<std::size_t> labels(chunk.size());
            for (std::size_t i = 0; i < chunk.size(); ++i) {
                std::copy(repr_train.row(chunk[i]), repr_train.row(chunk[i]) + repr_train.cols,
                          batch.row(i));
                labels[i] = z_train[chunk[i]];
            }
            const nn::NetStack ahead = nn::lookahead(result.net, opt);
            auto trace = nn::forward(ahead, batch, nn::DropoutSpec{config.dropout, false, true, 0},
                                     nn::PassMode::Train, dropout);
            const Matrix logit_grad = objectives::cross_entropy_logit_grad(trace.output(), labels);
            auto back = nn::backward_from_logits(ahead, trace, logit_grad);
            nn::nesterov_step(result.net, back.layers, opt);
        }
        if (repr_val.rows > 0) {
            const Matrix val_probs = nn::evaluate(result.net, repr_val);
            const double val_loss = objectives::private_loss(val_probs, z_val);
            if (val_loss < best_val - 1e-9) {
                best_val = val_loss;
                best_net = result.net;
                since_best = 0;
            } else if (++since_best >= config.patience) {
                break;
            }
        }
    }
    if (repr_val.rows > 0) result.net = std::move(best_net);

    result.test_predictions = nn::evaluate(result.net, repr_test);
    result.test_accuracy = eval::accuracy(result.test_predictions, z_test);
    result.test_cross_entropy = objectives::private_loss(result.test_predictions, z_test);
    return result;
}

eval::EvalReport evaluate_trinet(const TriNet& net, const data::Dataset& set,
                                 const objectives::EmpiricalDistribution& p_hat_z,
                                 const Matrix* attacker_predictions) {
    RngStream rng(0);
    auto trace = tri_forward(net, set.all_features(), nn::DropoutSpec{}, nn::PassMode::Eval, rng);
    return eval::build_report(trace.regular.output(), set.all_y(), trace.private_.output(),
                              set.all_z(), p_hat_z.probs, attacker_predictions);
}

std::string SweepRecord::csv_header() {
    return "schema_version,lambda,seed,schedule,regular_acc_train,regular_acc_val,"
           "regular_acc_test,private_branch_acc_test,private_attacker_acc_test,"
           "loss_regular_test,loss_private_test,loss_private_objective_test,loss_attacker_test,"
           "bound_lower_attacker,bound_lower_empirical,bound_upper_regular,gap_final,"
           "wall_time_s,data_hash,error";
}

std::string SweepRecord::to_csv_row() const {
    std::ostringstream os;
    os.precision(12);
    os << schema_version << ',' << lambda << ',' << seed << ',' << schedule << ','
       << regular_acc_train << ',' << regular_acc_val << ',' << regular_acc_test << ','
       << private_branch_acc_test << ',' << private_attacker_acc_test << ',' << loss_regular_test
       << ',' << loss_private_test << ',' << loss_private_objective_test << ','
       << loss_attacker_test << ',' << bound_lower_attacker << ',' << bound_lower_empirical << ','
       << bound_upper_regular << ',' << gap_final << ',' << wall_time_s << ',' << data_hash << ','
       << error;
    return os.str();
}

std::string SweepRecord::to_json_line() const {
    nlohmann::ordered_json j;
    j["schema_version"] = schema_version;
    j["lambda"] = lambda;
    j["seed"] = seed;
    j["schedule"] = schedule;
    j["regular_acc_train"] = regular_acc_train;
    j["regular_acc_val"] = regular_acc_val;
    j["regular_acc_test"] = regular_acc_test;
    j["private_branch_acc_test"] = private_branch_acc_test;
    j["private_attacker_acc_test"] = private_attacker_acc_test;
    j["loss_regular_test"] = loss_regular_test;
    j["loss_private_test"] = loss_private_test;
    j["loss_private_objective_test"] = loss_private_objective_test;
    j["loss_attacker_test"] = loss_attacker_test;
    j["bound_lower_attacker"] = bound_lower_attacker;
    j["bound_lower_empirical"] = bound_lower_empirical;
    j["bound_upper_regular"] = bound_upper_regular;
    j["gap_final"] = gap_final;
    j["wall_time_s"] = wall_time_s;
    j["data_hash"] = data_hash;
    j["error"] = error;
    return j.dump();
}

SweepRecord SweepRecord::from_json_line(const std::string& line) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("sweep record: ") + e.what(), 0);
    }
    SweepRecord r;
    r.schema_version = j.value("schema_version", 1);
    r.lambda = j.value("lambda", 0.0);
    r.seed = j.value("seed", std::uint64_t{0});
    r.schedule = j.value("schedule", "");
    r.regular_acc_train = j.value("regular_acc_train", 0.0);
    r.regular_acc_val = j.value("regular_acc_val", 0.0);
    r.regular_acc_test = j.value("regular_acc_test", 0.0);
    r.private_branch_acc_test = j.value("private_branch_acc_test", 0.0);
    r.private_attacker_acc_test = j.value("private_attacker_acc_test", 0.0);
    r.loss_regular_test = j.value("loss_regular_test", 0.0);
    r.loss_private_test = j.value("loss_private_test", 0.0);
    r.loss_private_objective_test = j.value("loss_private_objective_test", 0.0);
    r.loss_attacker_test = j.value("loss_attacker_test", 0.0);
    r.bound_lower_attacker = j.value("bound_lower_attacker", 0.0);
    r.bound_lower_empirical = j.value("bound_lower_empirical", 0.0);
    r.bound_upper_regular = j.value("bound_upper_regular", 0.0);
    r.gap_final = j.value("gap_final", 0.0);
    r.wall_time_s = j.value("wall_time_s", 0.0);
    r.data_hash = j.value("data_hash", "");
    r.error = j.value("error", "");
    return r;
}

SweepResult lambda_sweep(const data::Dataset& train_set, const data::Dataset& val_set,
                         const data::Dataset& test_set, const TrainConfig& base_config,
                         const std::vector<double>& lambdas, const std::string& data_hash,
                         const std::function<void(const SweepRecord&)>& emit,
                         const std::function<bool(double)>& skip_lambda) {
    if (lambdas.empty()) throw ConfigError("lambda_sweep: empty lambda list");

    SweepResult result;
    for (double lambda : lambdas) {
        if (skip_lambda && skip_lambda(lambda)) continue;
        SweepRecord record;
        record.lambda = lambda;
        record.seed = base_config.seed;
        record.schedule = to_string(base_config.schedule);
        record.data_hash = data_hash;
        const auto start = std::chrono::steady_clock::now();
        try {
            TrainConfig cfg = base_config;
            cfg.lambda = lambda;
            Trainer trainer(cfg, train_set, val_set);
            trainer.run_all();

            const Matrix repr_train = trainer.encode(train_set);
            const Matrix repr_val = trainer.encode(val_set);
            const Matrix repr_test = trainer.encode(test_set);
            auto attacker = train_attacker(repr_train, train_set.all_z(), repr_val, val_set.all_z(),
                                           repr_test, test_set.all_z(), train_set.z_alphabet, cfg);

            const auto p_hat_z = train_set.p_hat_z();
            auto report = evaluate_trinet(trainer.net(), test_set, p_hat_z,
                                          &attacker.test_predictions);

            RngStream rng(0);
            auto train_trace = tri_forward(trainer.net(), train_set.all_features(),
                                           nn::DropoutSpec{}, nn::PassMode::Eval, rng);
            record.regular_acc_train = eval::accuracy(train_trace.regular.output(), train_set.all_y());
            auto val_trace = tri_forward(trainer.net(), val_set.all_features(), nn::DropoutSpec{},
                                         nn::PassMode::Eval, rng);
            record.regular_acc_val = eval::accuracy(val_trace.regular.output(), val_set.all_y());

            record.regular_acc_test = report.regular.accuracy;
            record.private_branch_acc_test = report.private_branch.accuracy;
            record.private_attacker_acc_test = report.private_attacker.accuracy;
            record.loss_regular_test = report.regular.cross_entropy;
            record.loss_private_test = report.private_branch.cross_entropy;
            record.loss_private_objective_test = report.private_objective_loss;
            record.loss_attacker_test = report.private_attacker.cross_entropy;
            record.bound_lower_attacker = report.lower_bound_attacker_uniform;
            record.bound_lower_empirical = report.lower_bound_attacker_empirical;
            record.bound_upper_regular = report.regular_upper_bound;
            record.gap_final = trainer.block_metrics().empty()
                                   ? std::abs(record.loss_private_objective_test - record.loss_private_test)
                                   : trainer.block_metrics().back().gap;
        } catch (const std::exception& e) {
            record.error = e.what();
            result.any_failed = true;
        }
        record.wall_time_s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        result.records.push_back(record);
        if (emit) emit(record);
    }
    return result;
}

}  // namespace anonet::train
