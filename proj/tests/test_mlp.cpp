#include "kgalign/errors.hpp"
#include "kgalign/gradcheck.hpp"
#include "kgalign/mlp.hpp"

#include <doctest.h>

#include <random>

using namespace kgalign;

TEST_CASE("forward shapes, determinism, finiteness") {
    std::mt19937_64 rng(3);
    const Mlp net = Mlp::glorot({8, 5, 4}, {Activation::Relu, Activation::Sigmoid}, rng);

    Eigen::MatrixXd x = Eigen::MatrixXd::Random(6, 8).cwiseAbs();
    const Eigen::MatrixXd y1 = net.forward(x);
    const Eigen::MatrixXd y2 = net.forward(x);
    CHECK(y1.rows() == 6);
    CHECK(y1.cols() == 4);
    CHECK(y1 == y2);
    CHECK(y1.allFinite());
    CHECK(y1.minCoeff() > 0.0);
    CHECK(y1.maxCoeff() < 1.0);

    Eigen::MatrixXd bad = Eigen::MatrixXd::Zero(2, 7);
    CHECK_THROWS_AS(net.forward(bad), InvalidArgument);
}

TEST_CASE("glorot initialization is deterministic and bounded") {
    std::mt19937_64 a(11), b(11);
    const Mlp n1 = Mlp::glorot({4, 3}, {Activation::Identity}, a);
    const Mlp n2 = Mlp::glorot({4, 3}, {Activation::Identity}, b);
    CHECK(n1.layers()[0].weights == n2.layers()[0].weights);
    CHECK(n1.layers()[0].biases.isZero());
    const double limit = std::sqrt(6.0 / 7.0);
    CHECK(n1.layers()[0].weights.cwiseAbs().maxCoeff() <= limit);
}

TEST_CASE("backward zero upstream and linearity") {
    std::mt19937_64 rng(5);
    const Mlp net = Mlp::glorot({6, 4, 3}, {Activation::Relu, Activation::Identity}, rng);
    Eigen::MatrixXd x = Eigen::MatrixXd::Random(5, 6);
    MlpTrace trace;
    net.forward(x, &trace);

    const Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(5, 3);
    auto [gz, dxz] = net.backward(trace, zero);
    for (const auto& g : gz) {
        CHECK(g.d_weights.isZero());
        CHECK(g.d_biases.isZero());
    }
    CHECK(dxz.isZero());

    Eigen::MatrixXd up = Eigen::MatrixXd::Random(5, 3);
    auto [g1, dx1] = net.backward(trace, up);
    auto [g2, dx2] = net.backward(trace, (2.0 * up).eval());
    for (std::size_t l = 0; l < g1.size(); ++l) {
        CHECK((2.0 * g1[l].d_weights - g2[l].d_weights).cwiseAbs().maxCoeff() <= 1e-12);
    }
    CHECK((2.0 * dx1 - dx2).cwiseAbs().maxCoeff() <= 1e-12);

    MlpTrace stale = trace;
    stale.pre.pop_back();
    CHECK_THROWS_AS(net.backward(stale, up), InvalidArgument);
}

TEST_CASE("full-network gradients match finite differences") {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        CHECK(gradcheck_full_network(seed) <= 1e-3);
    }
}
