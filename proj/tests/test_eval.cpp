#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "anonet/errors.hpp"
#include "anonet/evalreport.hpp"
#include "anonet/infotheory.hpp"
#include "anonet/rng.hpp"

using namespace anonet;

TEST_CASE("accuracy") {
    SUBCASE("perfect one-hot predictions") {
        Matrix m(3, 3);
        m(0, 2) = 1.0;
        m(1, 0) = 1.0;
        m(2, 1) = 1.0;
        CHECK(eval::accuracy(m, {2, 0, 1}) == 1.0);
    }
    SUBCASE("uniform predictions break ties toward class zero") {
        Matrix m(4, 5, 0.2);
        CHECK(eval::accuracy(m, {0, 0, 1, 2}) == doctest::Approx(0.5));  // only the zeros match
    }
    SUBCASE("random predictions against shuffled labels approach chance") {
        RngStream rng(33);
        const std::size_t n = 60000, k = 30;
        Matrix m(n, k);
        std::vector<std::size_t> labels(n);
        for (std::size_t i = 0; i < n; ++i) {
            double sum = 0.0;
            for (std::size_t j = 0; j < k; ++j) {
                m(i, j) = rng.uniform01();
                sum += m(i, j);
            }
            for (std::size_t j = 0; j < k; ++j) m(i, j) /= sum;
            labels[i] = rng.index(k);
        }
        // Monte Carlo: accuracy ~ Binomial(n, 1/30); three sigma band.
        const double p = 1.0 / 30.0;
        const double sigma = std::sqrt(p * (1.0 - p) / static_cast<double>(n));
        CHECK(std::abs(eval::accuracy(m, labels) - p) < 3.0 * sigma);
    }
    SUBCASE("label out of range is rejected") {
        Matrix m(1, 2, 0.5);
        CHECK_THROWS_AS(eval::accuracy(m, {7}), InputError);
    }
}

TEST_CASE("report on uniform private predictions") {
    const std::size_t n = 50, zk = 10;
    Matrix reg(n, 4);
    std::vector<std::size_t> y(n), z(n);
    RngStream rng(4);
    for (std::size_t i = 0; i < n; ++i) {
        y[i] = rng.index(4);
        z[i] = rng.index(zk);
        reg(i, y[i]) = 1.0;  // perfect regular predictions
    }
    Matrix priv(n, zk, 1.0 / static_cast<double>(zk));
    std::vector<double> p_hat(zk, 0.0);
    for (std::size_t i = 0; i < n; ++i) p_hat[z[i]] += 1.0 / static_cast<double>(n);

    auto report = eval::build_report(reg, y, priv, z, p_hat, nullptr);
    CHECK(report.regular.accuracy == 1.0);
    CHECK(report.regular_upper_bound == doctest::Approx(0.0).epsilon(1e-12));
    // Uniform predictions: the estimated attack-error floor is 1 - 1/|Z|.
    CHECK(report.lower_bound_branch_uniform ==
          doctest::Approx(1.0 - 1.0 / static_cast<double>(zk)).epsilon(1e-9));
    CHECK(report.private_branch.cross_entropy ==
          doctest::Approx(std::log(static_cast<double>(zk))).epsilon(1e-12));
}

TEST_CASE("report quantities match direct enumeration of a discrete model") {
    // A rational-probability model unrolled into an exact empirical dataset:
    // every (z, u) cell appears with multiplicity 16 * p_z(z) * channel(z,u).
    info::DiscreteModel m;
    m.p_z = {0.5, 0.5};
    m.channel = Matrix(2, 2);
    m.channel(0, 0) = 0.75; m.channel(0, 1) = 0.25;
    m.channel(1, 0) = 0.25; m.channel(1, 1) = 0.75;
    m.classifier = Matrix(2, 2);
    m.classifier(0, 0) = 0.875; m.classifier(0, 1) = 0.125;
    m.classifier(1, 0) = 0.125; m.classifier(1, 1) = 0.875;
    m.validate();

    std::vector<std::size_t> z_labels;
    std::vector<std::vector<double>> rows;
    for (std::size_t z = 0; z < 2; ++z) {
        for (std::size_t u = 0; u < 2; ++u) {
            const double weight = m.p_z[z] * m.channel(z, u);
            const auto count = static_cast<std::size_t>(weight * 16.0 + 0.5);
            REQUIRE(std::abs(weight * 16.0 - static_cast<double>(count)) < 1e-12);
            for (std::size_t rep = 0; rep < count; ++rep) {
                z_labels.push_back(z);
                rows.push_back({m.classifier(u, 0), m.classifier(u, 1)});
            }
        }
    }
    Matrix priv(rows.size(), 2);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < 2; ++j) priv(i, j) = rows[i][j];

    // Regular side: reuse the same predictions and labels.
    auto report = eval::build_report(priv, z_labels, priv, z_labels, {0.5, 0.5}, nullptr);

    CHECK(report.private_branch.soft_error ==
          doctest::Approx(m.misclassification()).epsilon(1e-12));

    double expected_ce = 0.0;
    for (std::size_t z = 0; z < 2; ++z)
        for (std::size_t u = 0; u < 2; ++u)
            expected_ce += m.p_z[z] * m.channel(z, u) * -std::log(m.classifier(u, z));
    CHECK(report.private_branch.cross_entropy == doctest::Approx(expected_ce).epsilon(1e-12));
}

TEST_CASE("exponential bound is asserted on every report") {
    RngStream rng(6);
    for (int rep = 0; rep < 50; ++rep) {
        const std::size_t n = 20, k = 5;
        Matrix preds(n, k);
        std::vector<std::size_t> labels(n);
        for (std::size_t i = 0; i < n; ++i) {
            double sum = 0.0;
            for (std::size_t j = 0; j < k; ++j) {
                preds(i, j) = -std::log(rng.uniform01() + 1e-300);
                sum += preds(i, j);
            }
            for (std::size_t j = 0; j < k; ++j) preds(i, j) /= sum;
            labels[i] = rng.index(k);
        }
        std::vector<double> p_hat(k, 1.0 / static_cast<double>(k));
        auto report = eval::build_report(preds, labels, preds, labels, p_hat, nullptr);
        CHECK(report.regular.soft_error <= report.regular_upper_bound + 1e-9);
    }
}

TEST_CASE("report serialization carries the documented fields") {
    Matrix reg(2, 2);
    reg(0, 0) = 0.9; reg(0, 1) = 0.1;
    reg(1, 0) = 0.2; reg(1, 1) = 0.8;
    auto report = eval::build_report(reg, {0, 1}, reg, {0, 1}, {0.5, 0.5}, &reg);
    const std::string json = report.to_json();
    CHECK(json.find("\"schema_version\"") != std::string::npos);
    CHECK(json.find("\"regular\"") != std::string::npos);
    CHECK(json.find("\"private_attacker\"") != std::string::npos);
    CHECK(json.find("\"lower_bound_attacker_uniform\"") != std::string::npos);

    const std::string header = eval::EvalReport::csv_header();
    const std::string row = report.to_csv_row();
    const auto commas = [](const std::string& s) {
        return std::count(s.begin(), s.end(), ',');
    };
    CHECK(commas(header) == commas(row));
}
