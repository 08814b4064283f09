// test_basis.cpp — Franck-Condon overlaps, ladder basis and eigen-operators

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ahsim/basis.hpp"
#include "oracles.hpp"

using namespace ahsim;

namespace {

ModelParams params(double eps, double g, double ebar0 = 0.0) {
    ModelParams p;
    p.epsilon = eps;
    p.g = g;
    p.ebar0 = ebar0;
    return p;
}

} // namespace

TEST_CASE("franck_condon trivial cases at g = 0") {
    CHECK(franck_condon(params(0.7, 0.0), 3, 3) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(franck_condon(params(0.7, 0.0), 2, 5) == 0.0);
}

TEST_CASE("franck_condon ground-state overlap") {
    const auto q = oracle::gauss_hermite(60);
    const double v = franck_condon(params(1.0, 1.0), 0, 0);
    CHECK(v == doctest::Approx(std::exp(-0.5)).epsilon(1e-14));
    CHECK(std::abs(v - oracle::franck_condon_quadrature(1.0, 1.0, 0, 0, q)) < 1e-13);
}

TEST_CASE("franck_condon matches quadrature including sign") {
    const auto q = oracle::gauss_hermite(80);
    CHECK(std::abs(franck_condon(params(0.5, 0.8), 4, 7) - oracle::franck_condon_quadrature(0.5, 0.8, 4, 7, q)) <
          1e-12);
    CHECK(std::abs(franck_condon(params(0.5, 0.8), 7, 4) - oracle::franck_condon_quadrature(0.5, 0.8, 7, 4, q)) <
          1e-12);
    for (double g : {0.3, 1.0, 2.0})
        for (double eps : {0.25, 1.0})
            for (int n = 0; n <= 20; n += 3)
                for (int m = 0; m <= 20; m += 2)
                    CHECK(std::abs(franck_condon(params(eps, g), n, m) -
                                   oracle::franck_condon_quadrature(eps, g, n, m, q)) < 1e-8);
}

TEST_CASE("franck_condon rejects negative indices") {
    CHECK_THROWS_AS(franck_condon(params(1.0, 1.0), -1, 0), std::invalid_argument);
}

TEST_CASE("franck_condon stays finite for large indices") {
    const double v = franck_condon(params(0.05, 1.5), 150, 140);
    CHECK(std::isfinite(v));
    CHECK(std::abs(v) <= 1.0);
}

TEST_CASE("laguerre against explicit polynomials") {
    for (double x : {0.0, 0.3, 2.5, 7.0}) {
        CHECK(laguerre(0, 1.5, x) == doctest::Approx(1.0));
        CHECK(laguerre(1, 1.5, x) == doctest::Approx(2.5 - x));
        CHECK(laguerre(2, 0.0, x) == doctest::Approx((x * x - 4 * x + 2) / 2));
        CHECK(laguerre(3, 2.0, x) ==
              doctest::Approx((-x * x * x + 15 * x * x - 60 * x + 60) / 6.0).epsilon(1e-12));
    }
}

TEST_CASE("build_basis energies") {
    const LadderBasis b = build_basis(params(0.5, 0.3), 3);
    CHECK(b.energies0()[0] == doctest::Approx(0.25));
    CHECK(b.energies0()[1] == doctest::Approx(0.75));
    CHECK(b.energies0()[2] == doctest::Approx(1.25));
    const LadderBasis s = build_basis(params(1.0, 0.3, 0.2), 2);
    CHECK(s.energies1()[0] == doctest::Approx(0.7));
    CHECK(s.energies1()[1] == doctest::Approx(1.7));
    CHECK(s.dim() == 4);
    CHECK(s.index1(1) == 3);
    CHECK_THROWS_AS(build_basis(params(1.0, 0.3), 1), std::invalid_argument);
}

TEST_CASE("g = 0 gives identity overlaps") {
    const LadderBasis b = build_basis(params(0.4, 0.0), 8);
    CHECK((b.fc() - Eigen::MatrixXd::Identity(8, 8)).norm() == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("truncated completeness") {
    const LadderBasis b = build_basis(params(0.5, 0.5), 40);
    for (Eigen::Index n = 0; n < 40; ++n) {
        CHECK(b.fc().row(n).squaredNorm() <= 1.0 + 1e-12);
        CHECK(b.fc().col(n).squaredNorm() <= 1.0 + 1e-12);
        CHECK(b.fc().row(n).cwiseAbs().maxCoeff() <= 1.0 + 1e-12);
    }
    for (Eigen::Index n = 0; n <= 20; ++n) CHECK(1.0 - b.fc().row(n).squaredNorm() < 1e-8);
}

TEST_CASE("d_operator structure") {
    const LadderBasis b0 = build_basis(params(0.5, 0.0), 5);
    CHECK((b0.d_operator(0) - b0.annihilation()).norm() == 0.0);
    CHECK(b0.d_operator(2).norm() == 0.0);

    const LadderBasis b = build_basis(params(0.5, 0.7), 6);
    Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(12, 12);
    for (int w = -5; w <= 5; ++w) sum += b.d_operator(w);
    CHECK((sum - b.annihilation()).norm() == 0.0);
    CHECK(b.d_operator(6).norm() == 0.0);
    CHECK(b.d_operator(-9).norm() == 0.0);

    const Eigen::MatrixXd D = b.d_operator(2);
    CHECK(D(1, 6 + 3) == b.fc()(1, 3));
    for (int w = -5; w <= 5; ++w) {
        const Eigen::MatrixXd Dw = b.d_operator(w);
        for (const Eigen::MatrixXd& m : {Eigen::MatrixXd(Dw * Dw.transpose()), Eigen::MatrixXd(Dw.transpose() * Dw)}) {
            Eigen::MatrixXd off = m;
            off.diagonal().setZero();
            CHECK(off.norm() == 0.0);
        }
    }
}

TEST_CASE("commutator_check") {
    const LadderBasis b = build_basis(params(0.5, 1.3), 20);
    CHECK(commutator_check(b, 1) < 1e-12);
    CHECK(commutator_check(b, 0) == 0.0);
    const LadderBasis s = build_basis(params(1.0, 0.8, 0.3), 10);
    CHECK(commutator_check(s, 1) == doctest::Approx(0.3 * s.d_operator(1).norm()).epsilon(1e-12));
}

TEST_CASE("model parameter validation") {
    ModelParams p;
    CHECK_NOTHROW(p.validate());
    p.epsilon = 0.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = ModelParams{};
    p.alpha = -0.1;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = ModelParams{};
    p.beta = 0.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = ModelParams{};
    p.beta = std::numeric_limits<double>::infinity();
    CHECK_NOTHROW(p.validate());

    ModelParams w;
    w.epsilon = 0.1;
    w.alpha = 0.1;
    CHECK(w.weak_coupling_warning().has_value());
    w.alpha = 0.05;
    CHECK_FALSE(w.weak_coupling_warning().has_value());
    CHECK(w.relaxation_time() == doctest::Approx(0.1 / 0.0025));
}
