// test_generators.cpp — Redfield and Lindblad generators, secular projection, rate matrices

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include <Eigen/Eigenvalues>

#include "ahsim/generators.hpp"
#include "superop_oracle.hpp"

using namespace ahsim;
using oracle::cd;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

ModelParams params(double g = 0.6, double alpha = 0.1) {
    ModelParams p;
    p.epsilon = 0.5;
    p.alpha = alpha;
    p.g = g;
    p.beta = 1.2;
    return p;
}

// Finite band so the b coefficients (Lamb shift) are nonzero.
CoeffSet coeffs(const LadderBasis& b) { return tabulate_coeffs(b, WideBand{1.0, 3.0, b.params().beta}); }

double rel(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    return (a - b).cwiseAbs().maxCoeff() / std::max(1e-300, b.cwiseAbs().maxCoeff());
}

Eigen::MatrixXcd offdiag(Eigen::MatrixXcd m) {
    m.diagonal().setZero();
    return m;
}

} // namespace

TEST_CASE("alpha = 0 reduces to the von Neumann equation") {
    const LadderBasis b = build_basis(params(0.6, 0.0), 4);
    const Generator red = build_redfield(b, coeffs(b));
    const Generator vn = build_von_neumann(b);
    const Eigen::MatrixXcd rho = oracle::random_hermitian(8, 3);
    CHECK((red.apply(rho) - vn.apply(rho)).norm() < 1e-15);
    for (std::size_t k = 0; k < 4; ++k)
        for (int m : {0, 1}) CHECK(red.apply(BlockDensity::eigenstate(4, k, m).full()).norm() == 0.0);
}

TEST_CASE("Redfield matches the hand-assembled superoperator") {
    for (std::size_t n : {std::size_t{2}, std::size_t{3}}) {
        const LadderBasis b = build_basis(params(), n);
        const CoeffSet c = coeffs(b);
        const Eigen::MatrixXcd oracle_m = oracle::redfield_super(b, c);
        CHECK(oracle_m.rows() == static_cast<Eigen::Index>(4 * n * n));
        for (GeneratorRoute r : {GeneratorRoute::Factored, GeneratorRoute::OmegaResolved})
            CHECK(rel(matricize(build_redfield(b, c, r)), oracle_m) < 1e-12);
    }
}

TEST_CASE("Lindblad matches the hand-assembled GKLS superoperator") {
    const LadderBasis b = build_basis(params(), 3);
    const CoeffSet c = coeffs(b);
    CHECK(rel(matricize(build_lindblad(b, c)), oracle::lindblad_super(b, c)) < 1e-12);
}

TEST_CASE("factored and omega-resolved Redfield agree") {
    const LadderBasis b = build_basis(params(), 7);
    const CoeffSet c = coeffs(b);
    const Generator f = build_redfield(b, c, GeneratorRoute::Factored);
    const Generator o = build_redfield(b, c, GeneratorRoute::OmegaResolved);
    for (unsigned s = 0; s < 5; ++s) {
        Eigen::MatrixXcd rho = Eigen::MatrixXcd::Random(14, 14);
        CHECK(rel(f.apply(rho), o.apply(rho)) < 1e-13);
    }
    CHECK_THROWS_AS(build_redfield(b, c, GeneratorRoute::Secular), std::invalid_argument);
}

TEST_CASE("secular projection equals the Lindblad generator") {
    const LadderBasis b = build_basis(params(), 3);
    const CoeffSet c = coeffs(b);
    const Generator sec = secular_project(build_redfield(b, c));
    CHECK(sec.kind() == GeneratorKind::Lindblad);
    CHECK(sec.route() == GeneratorRoute::Secular);
    const Eigen::MatrixXcd a = matricize(sec), l = matricize(build_lindblad(b, c));
    CHECK((a - l).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("secular projection is the identity at g = 0") {
    const LadderBasis b = build_basis(params(0.0), 3);
    const CoeffSet c = coeffs(b);
    const Generator red = build_redfield(b, c);
    CHECK((matricize(secular_project(red)) - matricize(red)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("trace and Hermiticity preservation") {
    const LadderBasis b = build_basis(params(), 6);
    const CoeffSet c = coeffs(b);
    for (const Generator& gen : {build_redfield(b, c), build_lindblad(b, c)})
        for (unsigned s = 1; s <= 10; ++s) {
            const Eigen::MatrixXcd rho = oracle::random_hermitian(12, s);
            const Eigen::MatrixXcd out = gen.apply(rho);
            CHECK(std::abs(out.trace()) < 1e-12 * rho.norm());
            CHECK((out - out.adjoint()).norm() < 1e-12 * out.norm());
        }
}

TEST_CASE("diagonal preservation of a single application") {
    const LadderBasis b = build_basis(params(), 6);
    const CoeffSet c = coeffs(b);
    Eigen::VectorXd lambda(6), theta(6);
    lambda << 0.3, 0.2, 0.1, 0.05, 0.05, 0.0;
    theta << 0.1, 0.1, 0.05, 0.05, 0.0, 0.0;
    const BlockDensity rho = BlockDensity::diagonal(lambda, theta);

    const BlockDensity l = build_lindblad(b, c).apply(rho);
    CHECK(l.rho01.norm() == 0.0);
    CHECK(offdiag(l.rho0).norm() == 0.0);
    CHECK(offdiag(l.rho1).norm() == 0.0);

    const BlockDensity r = build_redfield(b, c).apply(rho);
    CHECK(r.rho01.norm() == 0.0);
    // omega != omega' terms populate within-block coherences for g != 0.
    CHECK(offdiag(r.rho0).norm() > 1e-6);

    const LadderBasis b0 = build_basis(params(0.0), 6);
    const BlockDensity r0 = build_redfield(b0, coeffs(b0)).apply(rho);
    CHECK(r0.rho01.norm() == 0.0);
    CHECK(offdiag(r0.rho0).norm() < 1e-16);
    CHECK(offdiag(r0.rho1).norm() < 1e-16);
}

TEST_CASE("secular-diagonal equality") {
    const LadderBasis b = build_basis(params(), 8);
    const CoeffSet c = coeffs(b);
    const Generator red = build_redfield(b, c), lin = build_lindblad(b, c);
    std::srand(11);
    for (int trial = 0; trial < 20; ++trial) {
        Eigen::VectorXd w = (Eigen::VectorXd::Random(16).array() + 1.0).matrix();
        w /= w.sum();
        const Eigen::MatrixXcd rho = w.cast<cd>().asDiagonal();
        CHECK((red.dissipative(rho).diagonal() - lin.dissipative(rho).diagonal()).cwiseAbs().maxCoeff() < 1e-13);
    }
}

TEST_CASE("corrected Hamiltonian") {
    const LadderBasis b = build_basis(params(), 5);
    const CoeffSet c = coeffs(b);
    const CorrectedHamiltonian h = corrected_hamiltonian(b, c);
    for (Eigen::Index k = 0; k < 5; ++k) {
        double s0 = 0.0, s1 = 0.0;
        for (int w = -4; w <= 4; ++w) {
            if (k + w >= 0 && k + w < 5) s0 += c.b_F(w) * std::pow(b.fc()(k, k + w), 2);
            if (k - w >= 0 && k - w < 5) s1 -= c.b_G(w) * std::pow(b.fc()(k - w, k), 2);
        }
        CHECK(h.shift0[k] == doctest::Approx(s0).epsilon(1e-13));
        CHECK(h.shift1[k] == doctest::Approx(s1).epsilon(1e-13));
    }
    const CoeffSet inf = tabulate_coeffs(b, WideBand{1.0, kInf, 1.0});
    const CorrectedHamiltonian z = corrected_hamiltonian(b, inf);
    CHECK(z.shift0.norm() == 0.0);
    CHECK(z.shift1.norm() == 0.0);
    CHECK((z.total(b) - b.hamiltonian_diagonal()).norm() == 0.0);
}

TEST_CASE("negative weights are rejected") {
    const LadderBasis b = build_basis(params(), 3);
    CoeffSet c = coeffs(b);
    c.set(1, -0.1, 0.0, 0.5, 0.0);
    CHECK_THROWS_AS(build_lindblad(b, c), std::domain_error);
}

TEST_CASE("coefficient table mismatch") {
    const LadderBasis b = build_basis(params(), 4);
    const LadderBasis small = build_basis(params(), 3);
    CHECK_THROWS_AS(build_redfield(b, coeffs(small)), std::invalid_argument);
    ModelParams q = params();
    q.epsilon = 0.7;
    const LadderBasis other = build_basis(q, 4);
    CHECK_THROWS_AS(build_lindblad(b, coeffs(other)), std::invalid_argument);
}

TEST_CASE("rate matrix closed forms") {
    const LadderBasis b0 = build_basis(params(0.0), 5);
    const CoeffSet c0 = coeffs(b0);
    const RateMatrix r0 = build_rate_matrix(b0, c0);
    const double s = params().dissipative_scale();
    for (Eigen::Index i = 0; i < 5; ++i)
        for (Eigen::Index f = 0; f < 5; ++f)
            CHECK(r0.k01(i, f) == doctest::Approx(i == f ? s * c0.a_F(0) : 0.0));

    ModelParams cold = params();
    cold.beta = kInf;
    const LadderBasis b = build_basis(cold, 6);
    const CoeffSet c = tabulate_coeffs(b, WideBand{1.0, kInf, kInf});
    const RateMatrix r = build_rate_matrix(b, c);
    for (Eigen::Index i = 0; i < 6; ++i)
        for (Eigen::Index f = 0; f < 6; ++f) {
            CHECK(r.k01(i, f) >= 0.0);
            if (f > i) {
                CHECK(r.k01(i, f) == 0.0);
                CHECK(r.k10(f, i) == doctest::Approx(s * std::pow(b.fc()(i, f), 2)));
            }
        }
    CHECK(r.escape0(2) == doctest::Approx(r.k01.row(2).sum()));
}

TEST_CASE("balance fixed point is stationary under Lindblad") {
    const LadderBasis b = build_basis(params(), 4);
    const CoeffSet c = coeffs(b);
    const RateMatrix r = build_rate_matrix(b, c);
    const Eigen::VectorXd st = r.stationary();
    CHECK(st.sum() == doctest::Approx(1.0));
    CHECK(st.minCoeff() >= 0.0);
    Eigen::VectorXd dl, dt;
    r.derivative(st.head(4), st.tail(4), dl, dt);
    CHECK(dl.cwiseAbs().maxCoeff() < 1e-15);
    const Eigen::MatrixXcd out = build_lindblad(b, c).apply(BlockDensity::diagonal(st.head(4), st.tail(4)).full());
    CHECK(out.diagonal().cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("matricize") {
    const LadderBasis b = build_basis(params(), 4);
    const CoeffSet c = coeffs(b);
    const Generator red = build_redfield(b, c);
    const Eigen::MatrixXcd M = matricize(red);
    for (unsigned s = 1; s <= 20; ++s) {
        const Eigen::MatrixXcd rho = oracle::random_hermitian(8, s + 100);
        CHECK((M * oracle::vec(rho) - oracle::vec(red.apply(rho))).cwiseAbs().maxCoeff() < 1e-12);
    }
    const Eigen::VectorXcd id = oracle::vec(Eigen::MatrixXcd::Identity(8, 8));
    CHECK((id.adjoint() * M).cwiseAbs().maxCoeff() < 1e-10);

    const LadderBasis six = build_basis(params(), 6);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(matricize(build_lindblad(six, coeffs(six))), false);
    CHECK(es.eigenvalues().real().maxCoeff() <= 1e-10);

    const LadderBasis big = build_basis(params(), 17);
    CHECK_THROWS_AS(matricize(build_von_neumann(big)), std::invalid_argument);
}

TEST_CASE("block density helpers") {
    const Eigen::MatrixXcd rho = oracle::random_hermitian(6, 9);
    const BlockDensity bd = BlockDensity::from_full(rho);
    CHECK(bd.n_max() == 3);
    CHECK((bd.full() - rho).norm() == 0.0);
    const BlockDensity e = BlockDensity::eigenstate(3, 2, 1);
    CHECK(e.rho1(2, 2) == cd(1.0));
    CHECK(e.rho0.norm() == 0.0);
}
