#pragma once

#include <cstdint>
#include <vector>

#include "anonet/matrix.hpp"
#include "anonet/objectives.hpp"
#include "anonet/rng.hpp"

namespace anonet::info {

// All quantities in nats.

double entropy(const std::vector<double>& dist);

/// H(B|A) from a joint matrix with joint(a,b) = P(A=a, B=b).
double conditional_entropy(const Matrix& joint);

/// I(Z;U) from a source distribution and a row-stochastic channel
/// channel(z,u) = Q(U=u | Z=z).
double mutual_information(const std::vector<double>& p_z, const Matrix& channel);

/// Fano-type conversion g(t) = t*log(|Z|-1) + H_b(t), increasing on
/// [0, 1-1/|Z|] with g(0)=0 and g(1-1/|Z|) = log|Z|.
double g(double t, std::size_t z_alphabet);

/// Inverse on [0, 1-1/|Z|]: 0 for t <= 0, the bisection root of g(e)=t for
/// 0 < t < log|Z|, clamped to 1-1/|Z| for t >= log|Z|.
double g_inverse(double t, std::size_t z_alphabet);

/// Lower bound on the misclassification probability of any private-label
/// classifier, estimated from its held-out cross-entropy:
/// g_inverse(min(L, log|Z|)).
double private_error_lower_bound(double private_test_loss, std::size_t z_alphabet);

/// 1 - exp(-risk): upper bound on the regular misclassification probability.
double misclassification_upper_bound(double risk);

/// Exact finite-alphabet joint for brute-force bound validation:
/// source P_Z, channel Q_{U|Z}, classifier Q_{Zhat|U}.
struct DiscreteModel {
    std::vector<double> p_z;
    Matrix channel;     // |Z| x |U|, rows sum to 1
    Matrix classifier;  // |U| x |Z|, rows sum to 1

    std::size_t z_alphabet() const { return p_z.size(); }
    std::size_t u_alphabet() const { return channel.cols; }
    void validate() const;

    /// Distortion d(z,u) = 1 - classifier(u,z).
    Matrix distortion() const;

    /// Exact misclassification probability of the induced decision rule.
    double misclassification() const;
};

DiscreteModel random_model(std::size_t z_alphabet, std::size_t u_alphabet, RngStream& rng);

struct RateDistortionPoint {
    double distortion = 0.0;
    double rate = 0.0;
    double beta = 0.0;
    std::size_t iterations = 0;
};

/// One point of the rate-distortion curve for slope parameter beta >= 0 via
/// Blahut alternating minimization. Converges when successive rate
/// estimates differ by less than 1e-10.
RateDistortionPoint blahut_arimoto(const std::vector<double>& p_z, const Matrix& distortion,
                                   double beta);

/// Sorted (D, R) curve with its endpoints.
struct RateDistortionCurve {
    std::vector<RateDistortionPoint> points;  // ascending distortion
    double d_min = 0.0;
    double r_max = 0.0;

    void validate() const;  // R non-increasing and convex in D
};

/// Traces the curve over a geometric beta grid (plus the exact zero-rate
/// endpoint). Default grid: 64 points in [1e-3, 1e3].
RateDistortionCurve trace_curve(const std::vector<double>& p_z, const Matrix& distortion,
                                std::size_t grid_points = 64, double beta_min = 1e-3,
                                double beta_max = 1e3);

/// Distortion-rate function: infimum D with R(D) <= rate, by monotone
/// interpolation on the tabulated curve.
double distortion_rate_inverse(const RateDistortionCurve& curve, double rate);

struct Lemma1Report {
    double misclassification = 0.0;  // exact P_E
    double mutual_info = 0.0;        // exact I(P_Z; Q_{U|Z})
    double bound = 0.0;              // R^{-1}(I)
    bool holds = false;              // P_E >= bound - 1e-6
};

/// Brute-force check of the distortion-rate lower bound on one model. The
/// curve is refined around R = I until the bracketing rates are within
/// 1e-9, so interpolation error cannot mask a violation.
Lemma1Report lemma1_check(const DiscreteModel& model);

}  // namespace anonet::info
