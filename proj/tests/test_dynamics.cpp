// test_dynamics.cpp — Density-matrix propagation, observables and rate equations

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include <Eigen/Eigenvalues>

#include "ahsim/dynamics.hpp"
#include "superop_oracle.hpp"

using namespace ahsim;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

ModelParams params(double alpha = 0.1) {
    ModelParams p;
    p.epsilon = 0.5;
    p.alpha = alpha;
    p.g = 0.5;
    p.beta = 1.0;
    return p;
}

IntegratorConfig rk4(double dt, double t_end) {
    IntegratorConfig c;
    c.dt = dt;
    c.t_end = t_end;
    return c;
}

BlockDensity mixed(std::size_t n) {
    Eigen::VectorXd lambda = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n)), theta = lambda;
    lambda[0] = 0.5;
    lambda[1] = 0.2;
    theta[0] = 0.3;
    return BlockDensity::diagonal(lambda, theta);
}

BlockDensity coherent(std::size_t n) {
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(2 * n));
    psi[0] = 0.6;
    psi[1] = std::complex<double>(0.0, 0.48);
    psi[static_cast<Eigen::Index>(n)] = 0.64;
    psi.normalize();
    return BlockDensity::from_full(psi * psi.adjoint());
}

} // namespace

TEST_CASE("default step") {
    CHECK(default_dt(params(0.1)) == doctest::Approx(std::min(0.01, 0.05 * (0.5 / 0.01) / 1000)));
    CHECK(default_dt(params(0.0)) == 0.01);
    IntegratorConfig bad;
    bad.dt = -1;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = IntegratorConfig{};
    bad.tolerance = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("stationary eigenstate without coupling") {
    const LadderBasis b = build_basis(params(0.0), 6);
    const Generator gen = build_lindblad(b, tabulate_coeffs(b, WideBand{1.0, kInf, 1.0}));
    const BlockDensity rho = BlockDensity::eigenstate(6, 0, 0);
    const Trajectory t = propagate(gen, rho, rk4(0.05, 2.0));
    CHECK(t.times.size() == t.records.size());
    CHECK(t.states.size() == t.records.size());
    for (const auto& s : t.states) CHECK((s.full() - rho.full()).norm() == 0.0);
    for (std::size_t i = 1; i < t.times.size(); ++i) CHECK(t.times[i] > t.times[i - 1]);
    CHECK(t.times.back() == 2.0);
}

TEST_CASE("zero generator is the identity") {
    const LadderBasis b = build_basis(params(0.0), 5);
    const Generator vn = build_von_neumann(b);
    const BlockDensity rho = mixed(5);
    const Trajectory t = propagate(vn, rho, rk4(0.1, 1.0));
    CHECK((t.states.back().full() - rho.full()).norm() == 0.0);
}

TEST_CASE("RK4 converges at fourth order") {
    const LadderBasis b = build_basis(params(0.3), 6);
    const Generator gen = build_redfield(b, tabulate_coeffs(b, WideBand{1.0, 4.0, 1.0}));
    const BlockDensity rho = coherent(6);
    auto final_state = [&](double dt) {
        IntegratorConfig c = rk4(dt, 2.0);
        c.keep_states = true;
        c.stride = 100000;
        return propagate(gen, rho, c).states.back().full();
    };
    const Eigen::MatrixXcd a = final_state(0.2), bb = final_state(0.1), c = final_state(0.05);
    const double ratio = (a - bb).norm() / (bb - c).norm();
    CHECK(ratio > 14.0);
    CHECK(ratio < 18.0);
}

TEST_CASE("adaptive pair agrees with fine RK4") {
    const LadderBasis b = build_basis(params(0.2), 6);
    const Generator gen = build_lindblad(b, tabulate_coeffs(b, WideBand{1.0, kInf, 1.0}));
    IntegratorConfig ad;
    ad.method = IntegratorMethod::DormandPrince;
    ad.t_end = 3.0;
    ad.tolerance = 1e-11;
    const Trajectory x = propagate(gen, coherent(6), ad);
    const Trajectory y = propagate(gen, coherent(6), rk4(0.002, 3.0));
    CHECK(x.times.back() == doctest::Approx(3.0).epsilon(1e-14));
    CHECK((x.states.back().full() - y.states.back().full()).norm() < 1e-8);
    CHECK(x.accepted_steps < y.accepted_steps);
}

TEST_CASE("trajectory invariants for both generators") {
    const LadderBasis b = build_basis(params(0.05), 8);
    const CoeffSet c = tabulate_coeffs(b, WideBand{1.0, kInf, 1.0});
    for (const Generator& gen : {build_redfield(b, c), build_lindblad(b, c)}) {
        IntegratorConfig cfg = rk4(0.01, 50.0);
        cfg.keep_states = false;
        cfg.stride = 50;
        const Trajectory t = propagate(gen, coherent(8), cfg);
        CHECK(t.max_trace_drift < 1e-8);
        CHECK(t.max_hermiticity < 1e-10);
        if (gen.kind() == GeneratorKind::Lindblad) CHECK(t.min_eigenvalue >= -1e-8);
        const Trajectory d = propagate(gen, mixed(8), cfg);
        CHECK(d.max_coherence < 1e-10);
    }
}

TEST_CASE("stride and records") {
    const LadderBasis b = build_basis(params(0.1), 4);
    const Generator gen = build_lindblad(b, tabulate_coeffs(b, WideBand{1.0, kInf, 1.0}));
    IntegratorConfig cfg = rk4(0.01, 1.0);
    cfg.stride = 30;
    const Trajectory t = propagate(gen, mixed(4), cfg);
    // t = 0, every 30th step of 100, and the final step
    CHECK(t.records.size() == 5);
    CHECK(t.records.back().time == 1.0);
    CHECK(t.accepted_steps == 100);
}

TEST_CASE("non-finite states abort with the last good state") {
    ModelParams p = params(30.0);
    const LadderBasis b = build_basis(p, 4);
    const Generator gen = build_lindblad(b, tabulate_coeffs(b, WideBand{1.0, kInf, 1.0}));
    bool thrown = false;
    try {
        propagate(gen, mixed(4), rk4(1.0, 1000.0));
    } catch (const PropagationError& e) {
        thrown = true;
        CHECK(e.time() > 0.0);
        CHECK(e.last_good().full().allFinite());
    }
    CHECK(thrown);
}

TEST_CASE("observables") {
    const Observables o = observables(BlockDensity::eigenstate(4, 0, 0));
    CHECK(o.trace == doctest::Approx(1.0));
    CHECK(o.lambda[0] == doctest::Approx(1.0));
    CHECK(o.coherence == 0.0);
    CHECK(std::abs(o.min_eigenvalue) < 1e-15);

    const Eigen::VectorXd flat = Eigen::VectorXd::Constant(4, 1.0 / 8.0);
    const Observables m = observables(BlockDensity::diagonal(flat, flat));
    for (Eigen::Index k = 0; k < 4; ++k) {
        CHECK(m.lambda[k] == doctest::Approx(0.125));
        CHECK(m.theta[k] == doctest::Approx(0.125));
    }
    CHECK(m.trace0 == doctest::Approx(0.5));

    for (unsigned s = 1; s <= 5; ++s) {
        const Eigen::MatrixXcd rho = oracle::random_hermitian(10, s);
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(rho);
        CHECK(observables(rho).min_eigenvalue == doctest::Approx(es.eigenvalues().real().minCoeff()).epsilon(1e-12));
        CHECK(observables(rho).hermiticity < 1e-14);
    }
}

TEST_CASE("rate equations: two-state closed form") {
    RateMatrix r;
    r.k01 = Eigen::MatrixXd::Constant(1, 1, 0.7);
    r.k10 = Eigen::MatrixXd::Constant(1, 1, 0.3);
    const RateTrajectory t = propagate_rates(r, Eigen::VectorXd::Ones(1), Eigen::VectorXd::Zero(1), rk4(0.01, 5.0));
    for (std::size_t i = 0; i < t.times.size(); ++i) {
        const double exact = 0.3 + 0.7 * std::exp(-t.times[i]);
        CHECK(std::abs(t.lambda[i][0] - exact) < 1e-8);
    }
    CHECK(t.max_probability_drift < 1e-10);
}

TEST_CASE("rate equations: zero rates and invalid input") {
    RateMatrix r;
    r.k01 = Eigen::MatrixXd::Zero(3, 3);
    r.k10 = Eigen::MatrixXd::Zero(3, 3);
    Eigen::VectorXd l(3), th(3);
    l << 0.2, 0.3, 0.1;
    th << 0.1, 0.2, 0.1;
    const RateTrajectory t = propagate_rates(r, l, th, rk4(0.1, 1.0));
    CHECK((t.lambda.back() - l).norm() == 0.0);
    l[0] = -0.2;
    CHECK_THROWS_AS(propagate_rates(r, l, th, rk4(0.1, 1.0)), std::invalid_argument);
}

TEST_CASE("rate equations track Lindblad populations on the perturbative horizon") {
    ModelParams p = params(std::sqrt(1e-3 * 0.5));
    const LadderBasis b = build_basis(p, 6);
    const CoeffSet c = tabulate_coeffs(b, WideBand{1.0, kInf, 1.0});
    const RateMatrix rm = build_rate_matrix(b, c);
    const double t_end = 0.1 * p.epsilon / (p.alpha * p.alpha); // 0.1 relaxation times
    const BlockDensity rho = mixed(6);
    IntegratorConfig cfg = rk4(0.05, t_end);
    cfg.stride = 1000000;
    const Trajectory q = propagate(build_lindblad(b, c), rho, cfg);
    const RateTrajectory r = propagate_rates(rm, rho.rho0.diagonal().real(), rho.rho1.diagonal().real(), cfg);
    const double diff = std::max((q.records.back().lambda - r.lambda.back()).cwiseAbs().maxCoeff(),
                                 (q.records.back().theta - r.theta.back()).cwiseAbs().maxCoeff());
    CHECK(diff < 1e-10);
    const double st = p.dissipative_scale() * t_end;
    CHECK(diff < st * st);
    const double redfield_diff = (propagate(build_redfield(b, c), rho, cfg).records.back().lambda - r.lambda.back())
                                     .cwiseAbs()
                                     .maxCoeff();
    CHECK(redfield_diff < st * st);
}
