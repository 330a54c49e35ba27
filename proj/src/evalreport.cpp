#include "anonet/evalreport.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "anonet/errors.hpp"
#include "anonet/infotheory.hpp"
#include "anonet/objectives.hpp"

#include <json.hpp>

namespace anonet::eval {

double accuracy(const Matrix& predictions, const std::vector<std::size_t>& labels) {
    if (predictions.rows != labels.size() || predictions.rows == 0)
        throw InputError("accuracy: prediction/label count mismatch");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < predictions.rows; ++i) {
        if (labels[i] >= predictions.cols) throw InputError("accuracy: label out of range");
        std::size_t best = 0;
        const double* row = predictions.row(i);
        for (std::size_t j = 1; j < predictions.cols; ++j)
            if (row[j] > row[best]) best = j;  // strict: ties keep the lowest index
        if (best == labels[i]) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(predictions.rows);
}

double soft_error(const Matrix& predictions, const std::vector<std::size_t>& labels) {
    if (predictions.rows != labels.size() || predictions.rows == 0)
        throw InputError("soft_error: prediction/label count mismatch");
    double mean_correct = 0.0;
    for (std::size_t i = 0; i < predictions.rows; ++i) {
        if (labels[i] >= predictions.cols) throw InputError("soft_error: label out of range");
        mean_correct += predictions(i, labels[i]);
    }
    return 1.0 - mean_correct / static_cast<double>(predictions.rows);
}

namespace {

TaskReport task_report(const Matrix& predictions, const std::vector<std::size_t>& labels) {
    TaskReport t;
    t.accuracy = accuracy(predictions, labels);
    t.soft_error = soft_error(predictions, labels);
    t.cross_entropy = objectives::regular_loss(predictions, labels);
    return t;
}

double empirical_variant_bound(double loss, std::size_t z_alphabet, double h_p_z) {
    // Variant that keeps the empirical label entropy instead of assuming a
    // uniform prior: the g-inverse argument grows by log|Z| - H(P_Z).
    const double log_z = std::log(static_cast<double>(z_alphabet));
    const double arg = std::min(loss + (log_z - h_p_z), log_z);
    return info::g_inverse(arg, z_alphabet);
}

}  // namespace

EvalReport build_report(const Matrix& regular_predictions,
                        const std::vector<std::size_t>& labels_regular,
                        const Matrix& private_predictions,
                        const std::vector<std::size_t>& labels_private,
                        const std::vector<double>& p_hat_private,
                        const Matrix* attacker_predictions) {
    EvalReport r;
    r.sample_count = labels_regular.size();
    r.regular = task_report(regular_predictions, labels_regular);
    r.private_branch = task_report(private_predictions, labels_private);

    const std::size_t z_alphabet = private_predictions.cols;
    objectives::EmpiricalDistribution p_hat{p_hat_private, labels_private.size()};
    p_hat.validate();
    r.private_objective_loss = objectives::private_objective_loss(private_predictions, p_hat);

    const double h_p_z = info::entropy(p_hat_private);
    r.random_guess_uniform = 1.0 / static_cast<double>(z_alphabet);
    r.random_guess_max_class = *std::max_element(p_hat_private.begin(), p_hat_private.end());

    r.regular_upper_bound = info::misclassification_upper_bound(r.regular.cross_entropy);
    if (r.regular.soft_error > r.regular_upper_bound + 1e-9)
        throw NumericError("build_report: exponential misclassification bound violated");

    r.lower_bound_branch_uniform =
        info::private_error_lower_bound(r.private_branch.cross_entropy, z_alphabet);
    r.lower_bound_branch_empirical =
        empirical_variant_bound(r.private_branch.cross_entropy, z_alphabet, h_p_z);

    if (attacker_predictions) {
        r.has_attacker = true;
        r.private_attacker = task_report(*attacker_predictions, labels_private);
        r.lower_bound_attacker_uniform =
            info::private_error_lower_bound(r.private_attacker.cross_entropy, z_alphabet);
        r.lower_bound_attacker_empirical =
            empirical_variant_bound(r.private_attacker.cross_entropy, z_alphabet, h_p_z);
        if (r.lower_bound_attacker_uniform > (1.0 - r.private_attacker.accuracy) + 0.05)
            r.private_bound_flagged = true;
    }
    if (r.lower_bound_branch_uniform > (1.0 - r.private_branch.accuracy) + 0.05)
        r.private_bound_flagged = true;
    return r;
}

std::string EvalReport::to_json() const {
    nlohmann::ordered_json j;
    j["schema_version"] = 1;
    j["sample_count"] = sample_count;
    auto task = [](const TaskReport& t) {
        return nlohmann::ordered_json{{"accuracy", t.accuracy},
                                      {"soft_error", t.soft_error},
                                      {"cross_entropy", t.cross_entropy}};
    };
    j["regular"] = task(regular);
    j["private_branch"] = task(private_branch);
    if (has_attacker) j["private_attacker"] = task(private_attacker);
    j["private_objective_loss"] = private_objective_loss;
    j["regular_upper_bound"] = regular_upper_bound;
    j["lower_bound_branch_uniform"] = lower_bound_branch_uniform;
    j["lower_bound_branch_empirical"] = lower_bound_branch_empirical;
    if (has_attacker) {
        j["lower_bound_attacker_uniform"] = lower_bound_attacker_uniform;
        j["lower_bound_attacker_empirical"] = lower_bound_attacker_empirical;
    }
    j["random_guess_uniform"] = random_guess_uniform;
    j["random_guess_max_class"] = random_guess_max_class;
    j["private_bound_flagged"] = private_bound_flagged;
    return j.dump(2);
}

std::string EvalReport::csv_header() {
    return "sample_count,regular_accuracy,regular_soft_error,regular_cross_entropy,"
           "private_branch_accuracy,private_branch_cross_entropy,"
           "private_attacker_accuracy,private_attacker_cross_entropy,"
           "private_objective_loss,regular_upper_bound,"
           "lower_bound_attacker_uniform,lower_bound_attacker_empirical,"
           "lower_bound_branch_uniform,lower_bound_branch_empirical,"
           "random_guess_uniform,random_guess_max_class,private_bound_flagged";
}

std::string EvalReport::to_csv_row() const {
    std::ostringstream os;
    os.precision(12);
    os << sample_count << ',' << regular.accuracy << ',' << regular.soft_error << ','
       << regular.cross_entropy << ',' << private_branch.accuracy << ','
       << private_branch.cross_entropy << ',';
    if (has_attacker)
        os << private_attacker.accuracy << ',' << private_attacker.cross_entropy << ',';
    else
        os << ",,";
    os << private_objective_loss << ',' << regular_upper_bound << ','
       << lower_bound_attacker_uniform << ',' << lower_bound_attacker_empirical << ','
       << lower_bound_branch_uniform << ',' << lower_bound_branch_empirical << ','
       << random_guess_uniform << ',' << random_guess_max_class << ','
       << (private_bound_flagged ? 1 : 0);
    return os.str();
}

}  // namespace anonet::eval
