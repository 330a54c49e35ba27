#pragma once

#include <string>
#include <vector>

#include "anonet/matrix.hpp"

namespace anonet::eval {

/// Argmax match rate; ties go to the lowest class index.
double accuracy(const Matrix& predictions, const std::vector<std::size_t>& labels);

/// One minus the mean probability assigned to the true class. This is the
/// quantity the exponential upper bound controls; argmax error is not.
double soft_error(const Matrix& predictions, const std::vector<std::size_t>& labels);

struct TaskReport {
    double accuracy = 0.0;
    double soft_error = 0.0;
    double cross_entropy = 0.0;  // nats
};

struct EvalReport {
    std::size_t sample_count = 0;
    TaskReport regular;
    TaskReport private_branch;    // co-trained private branch
    TaskReport private_attacker;  // retrained attacker; may be unset
    bool has_attacker = false;

    double private_objective_loss = 0.0;  // random-guess anchor loss on test

    // Bound columns. The lower bounds estimate the best achievable attack
    // error from the attacker's (or branch's) test cross-entropy.
    double regular_upper_bound = 0.0;            // 1 - exp(-L_r)
    double lower_bound_attacker_uniform = 0.0;   // g^{-1}(min(L, log|Z|))
    double lower_bound_attacker_empirical = 0.0; // g^{-1} with H(P_Z) correction
    double lower_bound_branch_uniform = 0.0;
    double lower_bound_branch_empirical = 0.0;

    double random_guess_uniform = 0.0;   // 1/|Z|
    double random_guess_max_class = 0.0; // max_z P_hat(z)

    // Soft consistency flag for the approximate private bound (the upper
    // bound on the regular task is asserted instead).
    bool private_bound_flagged = false;

    std::string to_json() const;
    static std::string csv_header();
    std::string to_csv_row() const;
};

/// Assembles the report and asserts the exponential bound on the regular
/// task: soft_error <= 1 - exp(-L_r) + 1e-9. The private lower bound is a
/// flagged soft check (its Eq. uses an uncontrolled approximation).
EvalReport build_report(const Matrix& regular_predictions,
                        const std::vector<std::size_t>& labels_regular,
                        const Matrix& private_predictions,
                        const std::vector<std::size_t>& labels_private,
                        const std::vector<double>& p_hat_private,
                        const Matrix* attacker_predictions);

}  // namespace anonet::eval
