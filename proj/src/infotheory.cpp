#include "anonet/infotheory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "anonet/errors.hpp"

namespace anonet::info {

namespace {

constexpr double kNormTolerance = 1e-9;
constexpr double kRateTolerance = 1e-10;
constexpr std::size_t kMaxBlahutIterations = 100000;

double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

void check_distribution(const std::vector<double>& dist) {
    double sum = 0.0;
    for (double p : dist) {
        if (p < 0.0 || !std::isfinite(p)) throw InputError("distribution entries must be >= 0");
        sum += p;
    }
    if (std::abs(sum - 1.0) > kNormTolerance) throw InputError("distribution does not sum to 1");
}

void check_row_stochastic(const Matrix& m, const char* what) {
    for (std::size_t i = 0; i < m.rows; ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < m.cols; ++j) {
            if (m(i, j) < 0.0 || !std::isfinite(m(i, j)))
                throw InputError(std::string(what) + ": entries must be >= 0");
            sum += m(i, j);
        }
        if (std::abs(sum - 1.0) > kNormTolerance)
            throw InputError(std::string(what) + ": row does not sum to 1");
    }
}

}  // namespace

double entropy(const std::vector<double>& dist) {
    check_distribution(dist);
    double h = 0.0;
    for (double p : dist) h -= xlogx(p);
    return h;
}

double conditional_entropy(const Matrix& joint) {
    double total = 0.0;
    for (double v : joint.data) {
        if (v < 0.0 || !std::isfinite(v)) throw InputError("joint entries must be >= 0");
        total += v;
    }
    if (std::abs(total - 1.0) > kNormTolerance) throw InputError("joint does not sum to 1");

    // H(B|A) = H(A,B) - H(A)
    double h_joint = 0.0;
    for (double v : joint.data) h_joint -= xlogx(v);
    double h_a = 0.0;
    for (std::size_t a = 0; a < joint.rows; ++a) {
        double pa = 0.0;
        for (std::size_t b = 0; b < joint.cols; ++b) pa += joint(a, b);
        h_a -= xlogx(pa);
    }
    return h_joint - h_a;
}

double mutual_information(const std::vector<double>& p_z, const Matrix& channel) {
    check_distribution(p_z);
    if (channel.rows != p_z.size()) throw ShapeError("mutual_information: channel rows != |Z|");
    check_row_stochastic(channel, "channel");

    std::vector<double> marginal(channel.cols, 0.0);
    for (std::size_t z = 0; z < channel.rows; ++z)
        for (std::size_t u = 0; u < channel.cols; ++u) marginal[u] += p_z[z] * channel(z, u);

    double mi = 0.0;
    for (std::size_t z = 0; z < channel.rows; ++z) {
        if (p_z[z] == 0.0) continue;
        for (std::size_t u = 0; u < channel.cols; ++u) {
            const double q = channel(z, u);
            if (q > 0.0 && marginal[u] > 0.0) mi += p_z[z] * q * std::log(q / marginal[u]);
        }
    }
    return std::max(0.0, mi);
}

double g(double t, std::size_t z_alphabet) {
    if (z_alphabet < 2) throw ConfigError("g: alphabet must have at least two symbols");
    if (t < 0.0 || t > 1.0) throw InputError("g: argument outside [0,1]");
    const double binary_entropy = -xlogx(t) - xlogx(1.0 - t);
    return t * std::log(static_cast<double>(z_alphabet - 1)) + binary_entropy;
}

double g_inverse(double t, std::size_t z_alphabet) {
    if (z_alphabet < 2) throw ConfigError("g_inverse: alphabet must have at least two symbols");
    if (t <= 0.0) return 0.0;
    const double top = 1.0 - 1.0 / static_cast<double>(z_alphabet);
    if (t >= std::log(static_cast<double>(z_alphabet))) return top;

    double lo = 0.0, hi = top;
    // g is continuous and increasing on [0, top]; bisect to 1e-12 width.
    while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        if (g(mid, z_alphabet) < t)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

double private_error_lower_bound(double private_test_loss, std::size_t z_alphabet) {
    if (private_test_loss < 0.0) throw InputError("private_error_lower_bound: negative loss");
    const double capped = std::min(private_test_loss, std::log(static_cast<double>(z_alphabet)));
    return g_inverse(capped, z_alphabet);
}

double misclassification_upper_bound(double risk) {
    if (risk < 0.0) throw InputError("misclassification_upper_bound: negative risk");
    return 1.0 - std::exp(-risk);
}

void DiscreteModel::validate() const {
    check_distribution(p_z);
    if (channel.rows != p_z.size()) throw ShapeError("DiscreteModel: channel rows != |Z|");
    if (classifier.rows != channel.cols || classifier.cols != p_z.size())
        throw ShapeError("DiscreteModel: classifier must be |U| x |Z|");
    // Exact models carry a tighter normalization contract than generic inputs.
    for (const Matrix* m : {&channel, &classifier}) {
        for (std::size_t i = 0; i < m->rows; ++i) {
            double sum = 0.0;
            for (std::size_t j = 0; j < m->cols; ++j) {
                if ((*m)(i, j) < 0.0) throw InputError("DiscreteModel: negative entry");
                sum += (*m)(i, j);
            }
            if (std::abs(sum - 1.0) > 1e-12) throw InputError("DiscreteModel: row does not sum to 1");
        }
    }
}

Matrix DiscreteModel::distortion() const {
    Matrix d(z_alphabet(), u_alphabet());
    for (std::size_t z = 0; z < d.rows; ++z)
        for (std::size_t u = 0; u < d.cols; ++u) d(z, u) = 1.0 - classifier(u, z);
    return d;
}

double DiscreteModel::misclassification() const {
    double correct = 0.0;
    for (std::size_t z = 0; z < z_alphabet(); ++z)
        for (std::size_t u = 0; u < u_alphabet(); ++u)
            correct += p_z[z] * channel(z, u) * classifier(u, z);
    return 1.0 - correct;
}

DiscreteModel random_model(std::size_t z_alphabet, std::size_t u_alphabet, RngStream& rng) {
    auto random_row = [&rng](std::size_t n) {
        std::vector<double> row(n);
        double sum = 0.0;
        for (double& v : row) {
            v = -std::log(rng.uniform01() + 1e-300);  // ~Exp(1): Dirichlet(1,...,1) after normalizing
            sum += v;
        }
        for (double& v : row) v /= sum;
        return row;
    };

    DiscreteModel m;
    m.p_z = random_row(z_alphabet);
    m.channel = Matrix(z_alphabet, u_alphabet);
    for (std::size_t z = 0; z < z_alphabet; ++z) {
        auto row = random_row(u_alphabet);
        for (std::size_t u = 0; u < u_alphabet; ++u) m.channel(z, u) = row[u];
    }
    m.classifier = Matrix(u_alphabet, z_alphabet);
    for (std::size_t u = 0; u < u_alphabet; ++u) {
        auto row = random_row(z_alphabet);
        for (std::size_t z = 0; z < z_alphabet; ++z) m.classifier(u, z) = row[z];
    }
    m.validate();
    return m;
}

namespace {

double zero_rate_distortion(const std::vector<double>& p_z, const Matrix& distortion) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t u = 0; u < distortion.cols; ++u) {
        double d = 0.0;
        for (std::size_t z = 0; z < distortion.rows; ++z) d += p_z[z] * distortion(z, u);
        best = std::min(best, d);
    }
    return best;
}

}  // namespace

RateDistortionPoint blahut_arimoto(const std::vector<double>& p_z, const Matrix& distortion,
                                   double beta) {
    check_distribution(p_z);
    if (distortion.rows != p_z.size()) throw ShapeError("blahut_arimoto: distortion rows != |Z|");
    if (beta < 0.0) throw ConfigError("blahut_arimoto: beta must be >= 0");

    const std::size_t nz = distortion.rows;
    const std::size_t nu = distortion.cols;

    RateDistortionPoint point;
    point.beta = beta;
    if (beta == 0.0) {
        // Zero slope: rate 0 at the best constant reproduction.
        point.distortion = zero_rate_distortion(p_z, distortion);
        point.rate = 0.0;
        return point;
    }

    std::vector<double> q(nu, 1.0 / static_cast<double>(nu));  // output marginal
    Matrix test_channel(nz, nu);                               // Q_{U|Z}
    double rate_prev = std::numeric_limits<double>::infinity();

    for (std::size_t iter = 1; iter <= kMaxBlahutIterations; ++iter) {
        // Channel update: Q(u|z) proportional to q(u) exp(-beta d(z,u)),
        // shifted per row over the live support for stability.
        for (std::size_t z = 0; z < nz; ++z) {
            double dmin = std::numeric_limits<double>::infinity();
            for (std::size_t u = 0; u < nu; ++u)
                if (q[u] > 0.0) dmin = std::min(dmin, distortion(z, u));
            double norm = 0.0;
            for (std::size_t u = 0; u < nu; ++u) {
                const double w = q[u] > 0.0 ? q[u] * std::exp(-beta * (distortion(z, u) - dmin)) : 0.0;
                test_channel(z, u) = w;
                norm += w;
            }
            if (norm <= 0.0)
                throw NumericError("blahut_arimoto: degenerate reproduction support at beta " +
                                   std::to_string(beta));
            for (std::size_t u = 0; u < nu; ++u) test_channel(z, u) /= norm;
        }
        // Marginal update.
        std::fill(q.begin(), q.end(), 0.0);
        for (std::size_t z = 0; z < nz; ++z)
            for (std::size_t u = 0; u < nu; ++u) q[u] += p_z[z] * test_channel(z, u);

        double rate = 0.0, dist = 0.0;
        for (std::size_t z = 0; z < nz; ++z) {
            for (std::size_t u = 0; u < nu; ++u) {
                const double joint = p_z[z] * test_channel(z, u);
                if (joint > 0.0 && q[u] > 0.0) rate += joint * std::log(test_channel(z, u) / q[u]);
                dist += joint * distortion(z, u);
            }
        }
        rate = std::max(0.0, rate);
        if (std::abs(rate - rate_prev) < kRateTolerance) {
            point.rate = rate;
            point.distortion = dist;
            point.iterations = iter;
            return point;
        }
        rate_prev = rate;
    }
    throw NumericError("blahut_arimoto: no convergence after " +
                       std::to_string(kMaxBlahutIterations) + " iterations at beta " +
                       std::to_string(beta));
}

void RateDistortionCurve::validate() const {
    const double slack = 1e-8;
    for (const auto& p : points)
        if (p.rate < 0.0) throw NumericError("rate-distortion curve: negative rate");
    for (std::size_t i = 1; i < points.size(); ++i) {
        if (points[i].distortion + 1e-12 < points[i - 1].distortion)
            throw NumericError("rate-distortion curve: distortions not sorted");
        if (points[i].rate > points[i - 1].rate + slack)
            throw NumericError("rate-distortion curve: rate not non-increasing");
    }
    // Convexity: every interior point lies on or below the chord of its
    // neighbours (slope comparisons blow up on near-coincident points).
    for (std::size_t i = 2; i < points.size(); ++i) {
        const double span = points[i].distortion - points[i - 2].distortion;
        if (span <= 1e-12) continue;
        const double w = (points[i - 1].distortion - points[i - 2].distortion) / span;
        const double chord = points[i - 2].rate + w * (points[i].rate - points[i - 2].rate);
        if (points[i - 1].rate > chord + slack)
            throw NumericError("rate-distortion curve: not convex");
    }
}

RateDistortionCurve trace_curve(const std::vector<double>& p_z, const Matrix& distortion,
                                std::size_t grid_points, double beta_min, double beta_max) {
    if (grid_points < 2) throw ConfigError("trace_curve: need at least two grid points");
    if (beta_min <= 0.0 || beta_max <= beta_min) throw ConfigError("trace_curve: bad beta range");

    RateDistortionCurve curve;
    curve.points.push_back(blahut_arimoto(p_z, distortion, 0.0));
    const double log_ratio = std::log(beta_max / beta_min);
    for (std::size_t i = 0; i < grid_points; ++i) {
        const double f = static_cast<double>(i) / static_cast<double>(grid_points - 1);
        curve.points.push_back(blahut_arimoto(p_z, distortion, beta_min * std::exp(f * log_ratio)));
    }
    // Collapse exact zero-rate points onto the zero-rate endpoint (largest
    // distortion); tiny-beta points that round to rate 0 sit below float
    // resolution and would misplace the curve's flat tail.
    RateDistortionPoint zero_point;
    bool has_zero = false;
    std::vector<RateDistortionPoint> kept;
    for (const auto& p : curve.points) {
        if (p.rate == 0.0) {
            if (!has_zero || p.distortion > zero_point.distortion) zero_point = p;
            has_zero = true;
        } else {
            kept.push_back(p);
        }
    }
    if (has_zero) kept.push_back(zero_point);
    std::sort(kept.begin(), kept.end(), [](const RateDistortionPoint& a, const RateDistortionPoint& b) {
        return a.distortion != b.distortion ? a.distortion < b.distortion : a.rate < b.rate;
    });

    // Convergence noise sits slightly above the true convex curve; the lower
    // convex hull restores convexity within that tolerance and never raises
    // the bound.
    std::vector<RateDistortionPoint> hull;
    for (const auto& p : kept) {
        if (!hull.empty() && p.distortion - hull.back().distortion < 1e-13) continue;
        while (hull.size() >= 2) {
            const auto& a = hull[hull.size() - 2];
            const auto& b = hull[hull.size() - 1];
            const double cross = (b.distortion - a.distortion) * (p.rate - a.rate) -
                                 (b.rate - a.rate) * (p.distortion - a.distortion);
            if (cross <= 0.0)
                hull.pop_back();
            else
                break;
        }
        hull.push_back(p);
    }
    curve.points = std::move(hull);
    curve.d_min = curve.points.front().distortion;
    curve.r_max = curve.points.front().rate;
    return curve;
}

double distortion_rate_inverse(const RateDistortionCurve& curve, double rate) {
    if (curve.points.empty()) throw InputError("distortion_rate_inverse: empty curve");
    if (rate < 0.0) throw InputError("distortion_rate_inverse: negative rate");

    // Points ascend in D and descend in R.
    if (rate >= curve.r_max) return curve.d_min;
    const auto& pts = curve.points;
    // Largest tabulated D has the smallest R (the zero-rate endpoint).
    for (std::size_t i = pts.size(); i-- > 1;) {
        const auto& feasible = pts[i];      // R <= rate candidate
        const auto& infeasible = pts[i - 1];
        if (feasible.rate <= rate && infeasible.rate > rate) {
            const double dr = infeasible.rate - feasible.rate;
            if (dr <= 0.0) return feasible.distortion;
            const double w = (rate - feasible.rate) / dr;
            return feasible.distortion + w * (infeasible.distortion - feasible.distortion);
        }
    }
    // All tabulated rates <= rate: the smallest D wins.
    return curve.d_min;
}

Lemma1Report lemma1_check(const DiscreteModel& model) {
    model.validate();
    Lemma1Report report;
    report.misclassification = model.misclassification();
    report.mutual_info = mutual_information(model.p_z, model.channel);

    const Matrix d = model.distortion();
    RateDistortionCurve curve = trace_curve(model.p_z, d, 96);

    // Refine around R = I by bisecting beta until the bracketing rates are
    // close enough that interpolation error is negligible.
    const double target = report.mutual_info;
    if (target < curve.r_max) {
        auto& pts = curve.points;
        for (std::size_t i = pts.size(); i-- > 1;) {
            if (pts[i].rate <= target && pts[i - 1].rate > target) {
                double beta_lo = pts[i].beta;       // smaller rate
                double beta_hi = pts[i - 1].beta;   // larger rate
                RateDistortionPoint lo = pts[i], hi = pts[i - 1];
                for (int iter = 0; iter < 80 && hi.rate - lo.rate > 1e-10; ++iter) {
                    const double beta_mid = 0.5 * (beta_lo + beta_hi);
                    RateDistortionPoint mid = blahut_arimoto(model.p_z, d, beta_mid);
                    if (mid.rate <= target) {
                        lo = mid;
                        beta_lo = beta_mid;
                    } else {
                        hi = mid;
                        beta_hi = beta_mid;
                    }
                }
                pts.insert(pts.begin() + static_cast<std::ptrdiff_t>(i), {lo, hi});
                std::sort(pts.begin(), pts.end(),
                          [](const RateDistortionPoint& a, const RateDistortionPoint& b) {
                              return a.distortion < b.distortion;
                          });
                break;
            }
        }
    }

    report.bound = distortion_rate_inverse(curve, report.mutual_info);
    report.holds = report.misclassification >= report.bound - 1e-6;
    return report;
}

}  // namespace anonet::info
