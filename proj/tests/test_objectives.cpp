#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "anonet/errors.hpp"
#include "anonet/gradcheck.hpp"
#include "anonet/infotheory.hpp"
#include "anonet/kernels.hpp"
#include "anonet/objectives.hpp"

using namespace anonet;
namespace obj = anonet::objectives;

namespace {

Matrix uniform_predictions(std::size_t n, std::size_t k) {
    return Matrix(n, k, 1.0 / static_cast<double>(k));
}

Matrix random_prob_rows(std::size_t n, std::size_t k, RngStream& rng) {
    Matrix m(n, k);
    for (std::size_t i = 0; i < n; ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            m(i, j) = -std::log(rng.uniform01() + 1e-300);
            sum += m(i, j);
        }
        for (std::size_t j = 0; j < k; ++j) m(i, j) /= sum;
    }
    return m;
}

}  // namespace

TEST_CASE("empirical label distribution") {
    SUBCASE("30 classes, 25 samples each, is uniform") {
        std::vector<std::size_t> labels;
        for (std::size_t c = 0; c < 30; ++c)
            for (int k = 0; k < 25; ++k) labels.push_back(c);
        auto d = obj::empirical_distribution(labels, 30);
        CHECK(d.sample_count == 750);
        for (double p : d.probs) CHECK(p == doctest::Approx(1.0 / 30.0).epsilon(1e-15));
    }
    SUBCASE("frequencies 2/3 and 1/3") {
        auto d = obj::empirical_distribution({0, 0, 1}, 2);
        CHECK(d.probs[0] == doctest::Approx(2.0 / 3.0));
        CHECK(d.probs[1] == doctest::Approx(1.0 / 3.0));
    }
    SUBCASE("empty dataset is rejected") {
        CHECK_THROWS_AS(obj::empirical_distribution({}, 3), InputError);
    }
    SUBCASE("counts sum to the pool size and probs to 1") {
        RngStream rng(9);
        std::vector<std::size_t> labels(5494);
        for (auto& z : labels) z = rng.index(30);
        auto d = obj::empirical_distribution(labels, 30);
        CHECK(d.sample_count == 5494);
        double sum = 0.0;
        for (double p : d.probs) sum += p;
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("regular and private losses") {
    SUBCASE("uniform predictions give log of the alphabet") {
        CHECK(obj::regular_loss(uniform_predictions(4, 10), {0, 3, 7, 9}) ==
              doctest::Approx(std::log(10.0)).epsilon(1e-13));
        std::vector<std::size_t> z{0, 11, 29};
        CHECK(obj::private_loss(uniform_predictions(3, 30), z) ==
              doctest::Approx(std::log(30.0)).epsilon(1e-13));
        CHECK(std::log(30.0) == doctest::Approx(3.4012).epsilon(1e-4));
    }
    SUBCASE("perfect predictions give zero") {
        Matrix m(3, 4);
        m(0, 1) = 1.0;
        m(1, 2) = 1.0;
        m(2, 0) = 1.0;
        CHECK(obj::regular_loss(m, {1, 2, 0}) == 0.0);
    }
    SUBCASE("hand-computed value") {
        // -(ln .7 + ln .2 + ln .1)/3 computed independently
        Matrix m(3, 3);
        m(0, 0) = 0.7; m(0, 1) = 0.2; m(0, 2) = 0.1;
        m(1, 0) = 0.7; m(1, 1) = 0.2; m(1, 2) = 0.1;
        m(2, 0) = 0.7; m(2, 1) = 0.2; m(2, 2) = 0.1;
        const double expected = -(std::log(0.7) + std::log(0.2) + std::log(0.1)) / 3.0;
        CHECK(expected == doctest::Approx(1.4229).epsilon(1e-4));
        CHECK(obj::regular_loss(m, {0, 1, 2}) == doctest::Approx(expected).epsilon(1e-15));
        CHECK(obj::private_loss(m, {0, 1, 2}) == doctest::Approx(expected).epsilon(1e-15));
    }
    SUBCASE("label out of range is rejected") {
        CHECK_THROWS_AS(obj::regular_loss(uniform_predictions(2, 3), {0, 5}), InputError);
    }
}

TEST_CASE("private objective loss") {
    SUBCASE("rows equal to p_hat give its entropy") {
        obj::EmpiricalDistribution p{{0.5, 0.25, 0.25}, 4};
        Matrix m(6, 3);
        for (std::size_t i = 0; i < 6; ++i)
            for (std::size_t j = 0; j < 3; ++j) m(i, j) = p.probs[j];
        CHECK(obj::private_objective_loss(m, p) ==
              doctest::Approx(info::entropy(p.probs)).epsilon(1e-13));
    }
    SUBCASE("uniform everything gives log of alphabet") {
        obj::EmpiricalDistribution p{std::vector<double>(10, 0.1), 10};
        CHECK(obj::private_objective_loss(uniform_predictions(5, 10), p) ==
              doctest::Approx(std::log(10.0)).epsilon(1e-13));
    }
    SUBCASE("hand-computed value") {
        obj::EmpiricalDistribution p{{0.5, 0.5}, 2};
        Matrix m(1, 2);
        m(0, 0) = 0.9;
        m(0, 1) = 0.1;
        const double expected = -0.5 * (std::log(0.9) + std::log(0.1));
        CHECK(expected == doctest::Approx(1.20397).epsilon(1e-5));
        CHECK(obj::private_objective_loss(m, p) == doctest::Approx(expected).epsilon(1e-15));
    }
    SUBCASE("dimension mismatch is rejected") {
        obj::EmpiricalDistribution p{{0.5, 0.5}, 2};
        CHECK_THROWS_AS(obj::private_objective_loss(uniform_predictions(2, 3), p), ShapeError);
    }
    SUBCASE("Gibbs: bounded below by the entropy of p_hat, with equality at p_hat") {
        RngStream rng(21);
        obj::EmpiricalDistribution p{{0.4, 0.3, 0.2, 0.1}, 10};
        const double h = info::entropy(p.probs);
        for (int rep = 0; rep < 200; ++rep) {
            auto m = random_prob_rows(5, 4, rng);
            CHECK(obj::private_objective_loss(m, p) >= h - 1e-12);
        }
    }
}

TEST_CASE("encoder objective") {
    SUBCASE("lambda zero returns the regular loss") {
        auto r = obj::encoder_objective(0.8, 2.0, 3.0, 0.0);
        CHECK(r.value == 0.8);
        CHECK(r.sign == 1);
    }
    SUBCASE("gap zero returns the regular loss for any lambda") {
        auto r = obj::encoder_objective(0.8, 2.5, 2.5, 7.0);
        CHECK(r.value == 0.8);
        CHECK(r.sign == 0);
    }
    SUBCASE("arithmetic example") {
        auto r = obj::encoder_objective(1.0, 2.0, 3.0, 0.5);
        CHECK(r.value == doctest::Approx(1.5).epsilon(1e-15));
        CHECK(r.sign == 1);
    }
    SUBCASE("absolute value is symmetric in the two private losses") {
        auto a = obj::encoder_objective(1.0, 2.0, 3.5, 0.7);
        auto b = obj::encoder_objective(1.0, 3.5, 2.0, 0.7);
        CHECK(a.value == b.value);
        CHECK(a.sign == -b.sign);
    }
    SUBCASE("negative lambda is rejected") {
        CHECK_THROWS_AS(obj::encoder_objective(1.0, 2.0, 3.0, -0.1), ConfigError);
    }
}

namespace {

struct TriFixture {
    TriNet net;
    Matrix x;
    std::vector<std::size_t> y, z;
    obj::EmpiricalDistribution p_hat;

    explicit TriFixture(std::uint64_t seed) {
        RngStream rng(seed);
        TriNetShape shape;
        shape.input_dim = 5;
        shape.encoder_widths = {7, 6};
        shape.branch_widths = {5};
        shape.regular_classes = 3;
        shape.private_classes = 4;
        net = make_trinet(shape, rng);
        // Move biases off zero so no pre-activation sits exactly at the
        // ReLU kink, where central differences are meaningless.
        for (nn::NetStack* stack : {&net.encoder, &net.regular_branch, &net.private_branch})
            for (auto& p : stack->params)
                for (double& b : p.bias.data) b = rng.uniform(-0.1, 0.1);
        RngStream data_rng(seed + 1);
        x = Matrix(9, 5);
        for (double& v : x.data) v = data_rng.uniform(-1.0, 1.0);
        y.resize(9);
        z.resize(9);
        for (auto& l : y) l = data_rng.index(3);
        for (auto& l : z) l = data_rng.index(4);
        p_hat = obj::empirical_distribution(z, 4);
    }

    TriTrace trace() const {
        RngStream r(0);
        return tri_forward(net, x, nn::DropoutSpec{}, nn::PassMode::Eval, r);
    }
};

std::vector<nn::GradCheckParam> tri_params(TriNet& net, const TriGradients& grads) {
    std::vector<nn::GradCheckParam> out;
    auto add = [&out](nn::NetStack& stack, const std::vector<nn::LayerParams>& g,
                      const std::string& prefix) {
        for (std::size_t i = 0; i < stack.params.size(); ++i) {
            out.push_back({prefix + ".w" + std::to_string(i), &stack.params[i].weight, &g[i].weight});
            out.push_back({prefix + ".b" + std::to_string(i), &stack.params[i].bias, &g[i].bias});
        }
    };
    add(net.encoder, grads.encoder, "enc");
    add(net.regular_branch, grads.regular, "reg");
    add(net.private_branch, grads.private_, "priv");
    return out;
}

}  // namespace

TEST_CASE("encoder gradient equals the plain regular gradient when lambda or sign vanish") {
    TriFixture f(5);
    auto trace = f.trace();
    auto with_zero_lambda = obj::encoder_gradient(f.net, trace, f.y, f.z, f.p_hat, 0.0, 1);
    auto with_zero_sign = obj::encoder_gradient(f.net, trace, f.y, f.z, f.p_hat, 2.0, 0);

    // Reference: backpropagate only the regular cross-entropy.
    const Matrix reg_grad = obj::cross_entropy_logit_grad(trace.regular.output(), f.y);
    auto reg_back = nn::backward_from_logits(f.net.regular_branch, trace.regular, reg_grad);
    auto expected = encoder_backward(f.net, trace, reg_back.input_grad);

    for (std::size_t i = 0; i < expected.size(); ++i) {
        CHECK(with_zero_lambda[i].weight == expected[i].weight);
        CHECK(with_zero_sign[i].weight == expected[i].weight);
        CHECK(with_zero_lambda[i].bias == expected[i].bias);
        CHECK(with_zero_sign[i].bias == expected[i].bias);
    }
}

TEST_CASE("encoder objective gradients match finite differences away from the kink") {
    TriFixture f(13);
    const double lambda = 0.8;

    auto trace = f.trace();
    auto bundle = obj::loss_bundle(trace, f.y, f.z, f.p_hat, lambda);
    REQUIRE(bundle.sign != 0);  // generic nets sit away from the kink

    auto grads = obj::encoder_objective_gradients(f.net, trace, f.y, f.z, f.p_hat, lambda, bundle.sign);

    auto loss = [&]() {
        RngStream r(0);
        auto t = tri_forward(f.net, f.x, nn::DropoutSpec{}, nn::PassMode::Eval, r);
        return obj::loss_bundle(t, f.y, f.z, f.p_hat, lambda).encoder_objective;
    };
    auto report = nn::grad_check(tri_params(f.net, grads), loss);
    CHECK(report.max_rel_error < 1e-6);
}

TEST_CASE("gradient-reversal variant matches finite differences of L_r - lambda L_p") {
    TriFixture f(57);
    const double lambda = 0.6;
    auto trace = f.trace();
    auto enc_grads = obj::encoder_gradient_reversal(f.net, trace, f.y, f.z, lambda);

    std::vector<nn::GradCheckParam> params;
    for (std::size_t i = 0; i < f.net.encoder.params.size(); ++i) {
        params.push_back({"enc.w" + std::to_string(i), &f.net.encoder.params[i].weight,
                          &enc_grads[i].weight});
        params.push_back({"enc.b" + std::to_string(i), &f.net.encoder.params[i].bias,
                          &enc_grads[i].bias});
    }
    auto loss = [&]() {
        RngStream r(0);
        auto t = tri_forward(f.net, f.x, nn::DropoutSpec{}, nn::PassMode::Eval, r);
        return obj::regular_loss(t.regular.output(), f.y) -
               lambda * obj::private_loss(t.private_.output(), f.z);
    };
    auto report = nn::grad_check(params, loss);
    CHECK(report.max_rel_error < 1e-6);
}

TEST_CASE("branch-only losses give exactly zero gradients to the other parameters") {
    TriFixture f(23);
    auto trace = f.trace();

    // Private loss backpropagated through the private branch stops at the
    // representation: regular-branch parameters see exactly zero.
    const Matrix priv_grad = obj::cross_entropy_logit_grad(trace.private_.output(), f.z);
    auto priv_back = nn::backward_from_logits(f.net.private_branch, trace.private_, priv_grad);
    auto loss_wrt_regular = [&]() {
        RngStream r(0);
        auto t = tri_forward(f.net, f.x, nn::DropoutSpec{}, nn::PassMode::Eval, r);
        return obj::private_loss(t.private_.output(), f.z);
    };
    // Frozen-parameter contract: the analytic gradient for theta_r is zero.
    std::vector<nn::LayerParams> zero_grads(f.net.regular_branch.params.size());
    for (std::size_t i = 0; i < zero_grads.size(); ++i) {
        zero_grads[i].weight = Matrix(f.net.regular_branch.params[i].weight.rows,
                                      f.net.regular_branch.params[i].weight.cols);
        zero_grads[i].bias = Matrix(1, f.net.regular_branch.params[i].bias.cols);
    }
    std::vector<nn::GradCheckParam> params;
    for (std::size_t i = 0; i < f.net.regular_branch.params.size(); ++i) {
        params.push_back({"reg.w" + std::to_string(i), &f.net.regular_branch.params[i].weight,
                          &zero_grads[i].weight});
        params.push_back({"reg.b" + std::to_string(i), &f.net.regular_branch.params[i].bias,
                          &zero_grads[i].bias});
    }
    auto report = nn::grad_check(params, loss_wrt_regular);
    CHECK(report.max_rel_error < 1e-6);
    (void)priv_back;
}

TEST_CASE("minimizing the objective loss drives prediction rows to p_hat") {
    // Fixed representations, one softmax layer trained on the
    // random-guess objective alone.
    RngStream rng(31);
    Matrix u(40, 6);
    for (double& v : u.data) v = rng.uniform(-1.0, 1.0);
    obj::EmpiricalDistribution p_hat{{0.4, 0.3, 0.2, 0.1}, 40};

    auto head = nn::make_stack({6, 4}, nn::Activation::Softmax, rng);
    auto opt = nn::OptimizerState::create(head, 0.5, 0.9);
    for (int epoch = 0; epoch < 400; ++epoch) {
        const auto ahead = nn::lookahead(head, opt);
        RngStream r(0);
        auto trace = nn::forward(ahead, u, nn::DropoutSpec{}, nn::PassMode::Eval, r);
        const Matrix lg = obj::objective_logit_grad(trace.output(), p_hat);
        auto back = nn::backward_from_logits(ahead, trace, lg);
        nn::nesterov_step(head, back.layers, opt);
    }
    RngStream r(0);
    auto trace = nn::forward(head, u, nn::DropoutSpec{}, nn::PassMode::Eval, r);
    for (std::size_t i = 0; i < trace.output().rows; ++i)
        for (std::size_t j = 0; j < 4; ++j)
            CHECK(trace.output()(i, j) == doctest::Approx(p_hat.probs[j]).epsilon(0.02));

    const double final_loss = obj::private_objective_loss(trace.output(), p_hat);
    CHECK(final_loss == doctest::Approx(info::entropy(p_hat.probs)).epsilon(1e-4));
}

TEST_CASE("loss bundle ties the pieces together") {
    TriFixture f(41);
    auto trace = f.trace();
    auto bundle = obj::loss_bundle(trace, f.y, f.z, f.p_hat, 0.6);
    CHECK(bundle.encoder_objective ==
          doctest::Approx(bundle.regular + 0.6 * std::abs(bundle.private_objective - bundle.private_))
              .epsilon(1e-15));
}
