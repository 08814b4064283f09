// test_semiclassical.cpp — Wigner projectors, hopping-rate fields, CME / LCME solvers

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include <boost/math/special_functions/laguerre.hpp>

#include "ahsim/generators.hpp"
#include "ahsim/semiclassical.hpp"
#include "oracles.hpp"

using namespace ahsim;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = std::numbers::pi;

ModelParams params(double g = 0.5, double alpha = 0.05) {
    ModelParams p;
    p.epsilon = 0.1;
    p.alpha = alpha;
    p.g = g;
    p.beta = 1.0;
    return p;
}

const PhaseGrid kGrid{-3.4, 2.8, -2.8, 2.8, 128, 128};
const PhaseGrid kWide{-4.0, 3.3, -3.3, 3.3, 128, 128};

double closed_form(double eps, int k, double x0, double x, double p) {
    const double r2 = (x - x0) * (x - x0) + p * p;
    return (k % 2 ? -1.0 : 1.0) / (kPi * eps) * std::exp(-r2 / eps) * boost::math::laguerre(k, 2.0 * r2 / eps);
}

double l2(const PhaseGrid& g, const Eigen::MatrixXd& a) { return std::sqrt(a.squaredNorm() * g.cell_area()); }

} // namespace

TEST_CASE("grid geometry") {
    const PhaseGrid g{-1.0, 1.0, -2.0, 2.0, 20, 40};
    CHECK(g.dx() == doctest::Approx(0.1));
    CHECK(g.dp() == doctest::Approx(0.1));
    CHECK(g.x(0) == doctest::Approx(-0.95));
    CHECK(g.x_corner(20) == doctest::Approx(1.0));
    CHECK(g.x_corners().size() == 21);
    CHECK(g.p_centers().size() == 40);
    CHECK_NOTHROW(g.validate());
    CHECK_THROWS_AS((PhaseGrid{1.0, -1.0, -1.0, 1.0, 20, 20}).validate(), std::invalid_argument);
    CHECK_THROWS_AS((PhaseGrid{-1.0, 1.0, -1.0, 1.0, 8, 20}).validate(), std::invalid_argument);
}

TEST_CASE("grid sizing rule") {
    const ModelParams p = params();
    CHECK_NOTHROW(check_grid(kGrid, p, 2));
    CHECK_THROWS_AS(check_grid(PhaseGrid{-3.4, 2.8, -2.8, 2.8, 32, 128}, p, 0), std::invalid_argument);
    CHECK_THROWS_AS(check_grid(PhaseGrid{-2.0, 2.8, -2.8, 2.8, 128, 128}, p, 0), std::invalid_argument);
    CHECK_THROWS_AS(check_grid(kGrid, p, 12), std::invalid_argument);
    const LadderBasis b = build_basis(p, 16);
    CHECK_THROWS_AS(wigner_projector(b, 12, 0, kGrid), std::invalid_argument);
}

TEST_CASE("surface centres and energy gap") {
    const ModelParams p = params(0.7);
    CHECK(surface_center(p, 0) == 0.0);
    CHECK(surface_center(p, 1) == doctest::Approx(-std::sqrt(2.0) * 0.7));
    ModelParams q = p;
    q.ebar0 = 0.2;
    CHECK(energy_gap(q, 0.3) == doctest::Approx(std::sqrt(2.0) * 0.7 * 0.3 + 0.49 + 0.2));
}

TEST_CASE("Wigner projectors: normalization, Gaussian oracle, negativity") {
    const ModelParams p = params();
    const LadderBasis b = build_basis(p, 8);
    for (int m : {0, 1})
        for (int k = 0; k <= 5; ++k) CHECK(std::abs(integrate(kWide, wigner_projector(b, k, m, kWide)) - 1.0) < 1e-4);
    for (int m : {0, 1}) {
        const Eigen::MatrixXd w = wigner_projector(b, 0, m, kWide);
        double err = 0.0;
        for (std::size_t i = 0; i < kWide.nx; ++i)
            for (std::size_t j = 0; j < kWide.np; ++j)
                err = std::max(err, std::abs(w(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) -
                                             oracle::ground_wigner(p.epsilon, surface_center(p, m), kWide.x(i), kWide.p(j))));
        CHECK(err < 1e-6);
    }
    const Eigen::VectorXd origin = Eigen::VectorXd::Zero(1);
    const auto t = wigner_table(p, 0, 2, origin, origin);
    CHECK(t[1](0, 0) == doctest::Approx(-1.0 / (kPi * p.epsilon)).epsilon(1e-10));
    CHECK(wigner_projector(b, 1, 0, kWide).minCoeff() < 0.0);
}

TEST_CASE("Wigner projectors match the Laguerre closed form") {
    const ModelParams p = params();
    const LadderBasis b = build_basis(p, 10);
    for (int m : {0, 1})
        for (int k : {1, 3, 6, 8}) {
            const Eigen::MatrixXd w = wigner_projector(b, k, m, kWide);
            double err = 0.0;
            for (std::size_t i = 0; i < kWide.nx; i += 3)
                for (std::size_t j = 0; j < kWide.np; j += 3) {
                    const double ref = closed_form(p.epsilon, k, surface_center(p, m), kWide.x(i), kWide.p(j));
                    err = std::max(err, std::abs(w(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) - ref));
                    CHECK(wigner_closed_form(p, k, m, kWide.x(i), kWide.p(j)) == doctest::Approx(ref).epsilon(1e-10));
                }
            CHECK(err < 1e-8);
        }
}

TEST_CASE("heuristic rates") {
    ModelParams p = params(0.0);
    const RateField flat = cme_rates(WideBand{1.0, kInf, 1.0}, p, kGrid, RateVariant::WidebandHeuristic);
    CHECK((flat.gamma01.array() - p.alpha * p.alpha * 1.0 / (2 * p.epsilon)).abs().maxCoeff() < 1e-16);

    p = params(0.8);
    const RateField r = cme_rates(WideBand{1.0, kInf, 2.0}, p, kGrid, RateVariant::WidebandHeuristic);
    CHECK(r.variant == RateVariant::WidebandHeuristic);
    for (std::size_t i = 0; i < kGrid.nx; ++i) {
        const auto a = static_cast<Eigen::Index>(i);
        const double U = energy_gap(p, kGrid.x(i));
        CHECK(r.gamma01(a, 7) / r.gamma10(a, 7) == doctest::Approx(std::exp(-2.0 * U)).epsilon(1e-13));
        CHECK(r.gamma01(a, 7) == doctest::Approx(p.dissipative_scale() * oracle::fermi_ld(2.0, U)).epsilon(1e-13));
    }
    CHECK_THROWS_AS(cme_rates(WideBand{1.0, kInf, 1.0}, p, kGrid, RateVariant::LcmeEigenstate), std::invalid_argument);
}

TEST_CASE("comb weights against an independent Laguerre evaluation") {
    for (double kappa : {0.0, 0.4, 3.0, 12.0}) {
        const auto w = cme_comb_weights(kappa, 30);
        for (int m = 1; m <= 30; ++m) {
            const double ref = 4.0 * (m % 2 ? 1.0 : -1.0) * std::exp(-kappa) *
                               boost::math::laguerre(m - 1, 1, 2.0 * kappa);
            CHECK(w[static_cast<std::size_t>(m - 1)] == doctest::Approx(ref).epsilon(1e-10));
        }
    }
    CHECK_THROWS_AS(cme_comb_weights(-1.0, 3), std::invalid_argument);
}

TEST_CASE("full rates versus heuristic (reported, not asserted)") {
    const ModelParams p = params(0.5);
    const WideBand band{1.0, kInf, 1.0};
    const RateField full = cme_rates(band, p, kGrid, RateVariant::Full);
    const RateField heur = cme_rates(band, p, kGrid, RateVariant::WidebandHeuristic);
    CHECK(full.gamma01.allFinite());
    CHECK(full.gamma10.allFinite());
    const double s = p.dissipative_scale();
    CHECK(((full.gamma01 + full.gamma10).array() - s).abs().maxCoeff() < 1e-12 * s);
    const double dev = ((full.gamma01 - heur.gamma01).array().abs() / heur.gamma01.array().max(1e-300)).maxCoeff();
    MESSAGE("max relative deviation full vs heuristic gamma01: " << dev);

    const RateField fb = cme_rates(WideBand{1.0, 4.0, 1.0}, p, kGrid, RateVariant::Full);
    CHECK(fb.gamma01.allFinite());
    const DiscreteBath db = uniform_bath(400, -5.0, 5.0, 1.0, 1.0);
    const RateField dr = cme_rates(db, p, PhaseGrid{-3.4, 2.8, -2.8, 2.8, 16, 16}, RateVariant::Full);
    CHECK(dr.gamma01.allFinite());
}

TEST_CASE("taper") {
    const Taper t{4, 8};
    CHECK(t.weight(0) == 1.0);
    CHECK(t.weight(3) == 1.0);
    CHECK(t.weight(4) == 1.0);
    CHECK(t.weight(8) == 0.0);
    for (int k = 4; k < 8; ++k) CHECK(t.weight(k + 1) < t.weight(k));
}

TEST_CASE("LCME fields at g = 0 collapse to a_F(0) times the tapered sum") {
    const ModelParams p = params(0.0);
    const LadderBasis b = build_basis(p, 12);
    const CoeffSet c = tabulate_coeffs(b, WideBand{1.0, kInf, 1.0});
    const Taper taper{4, 8};
    const LcmeFields f = lcme_rate_fields(b, c, kWide, taper);
    Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(128, 128);
    for (int k = 0; k < 8; ++k) sum += taper.weight(k) * wigner_projector(b, k, 0, kWide);
    const Eigen::MatrixXd expected = (p.dissipative_scale() * c.a_F(0) * 2 * kPi * p.epsilon * sum).cwiseMax(0.0);
    CHECK((f.rates.gamma01 - expected).cwiseAbs().maxCoeff() < 1e-12 * expected.maxCoeff());
    CHECK(f.rates.variant == RateVariant::LcmeEigenstate);
    CHECK(f.rates.gamma01.minCoeff() >= 0.0);
    CHECK(f.rates.clamped >= 0.0);
}

TEST_CASE("LCME single-eigenstate loss rate equals the escape rate") {
    const ModelParams p = params(0.5);
    const LadderBasis b = build_basis(p, 24);
    const CoeffSet c = tabulate_coeffs(b, WideBand{1.0, kInf, 1.0});
    const LcmeFields f = lcme_rate_fields(b, c, kGrid);
    const RateMatrix rm = build_rate_matrix(b, c);
    for (int k : {0, 2}) {
        const Eigen::MatrixXd w0 = wigner_projector(b, k, 0, kGrid);
        const Eigen::MatrixXd w1 = wigner_projector(b, k, 1, kGrid);
        const double loss0 = integrate(kGrid, f.rates.gamma01.cwiseProduct(w0));
        const double loss1 = integrate(kGrid, f.rates.gamma10.cwiseProduct(w1));
        CHECK(std::abs(loss0 - rm.escape0(static_cast<std::size_t>(k))) < 1e-6 * rm.escape0(static_cast<std::size_t>(k)));
        CHECK(std::abs(loss1 - rm.escape1(static_cast<std::size_t>(k))) < 1e-6 * rm.escape1(static_cast<std::size_t>(k)));
    }
}

TEST_CASE("LCME fields are insensitive to doubling n_max") {
    const ModelParams p = params(0.3);
    const Taper taper{5, 8};
    auto field = [&](std::size_t n) {
        const LadderBasis b = build_basis(p, n);
        return lcme_rate_fields(b, tabulate_coeffs(b, WideBand{1.0, 5.0, 1.0}), kGrid, taper);
    };
    const LcmeFields a = field(20), d = field(40);
    CHECK((a.rates.gamma01 - d.rates.gamma01).cwiseAbs().maxCoeff() < 1e-6);
    CHECK((a.rates.gamma10 - d.rates.gamma10).cwiseAbs().maxCoeff() < 1e-6);
    CHECK((a.h0_corr - d.h0_corr).cwiseAbs().maxCoeff() < 1e-6);
    CHECK((a.h1_corr - d.h1_corr).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("LCME taper validation and defect warning") {
    const ModelParams p = params(0.3);
    const LadderBasis b = build_basis(p, 12);
    const CoeffSet c = tabulate_coeffs(b, WideBand{1.0, kInf, 1.0});
    CHECK_THROWS_AS(lcme_rate_fields(b, c, kGrid, Taper{8, 4}), std::invalid_argument);
    CHECK_THROWS_AS(lcme_rate_fields(b, c, kGrid, Taper{4, 13}), std::invalid_argument);
    const LcmeFields f = lcme_rate_fields(b, c, kGrid, Taper{1, 2});
    CHECK(f.rates.truncation_defect > 1e-3);
    CHECK(f.rates.warning.has_value());
}

TEST_CASE("corner Hamiltonians") {
    const ModelParams p = params(0.5);
    const Eigen::MatrixXd h1 = corner_hamiltonian(p, 1, kGrid);
    CHECK(h1.rows() == 129);
    CHECK(h1.cols() == 129);
    const double x = kGrid.x_corner(10), q = kGrid.p_corner(20);
    CHECK(h1(10, 20) == doctest::Approx(0.5 * q * q + 0.5 * std::pow(x + std::sqrt(2.0) * 0.5, 2)));
}

TEST_CASE("Liouville stationarity improves under refinement") {
    const ModelParams p = params(0.5, 0.0);
    auto residual = [&](std::size_t n) {
        const PhaseGrid g{-3.4, 2.8, -2.8, 2.8, n, n};
        PhaseField init{g, Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)),
                        Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n))};
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                init.rho0(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                    oracle::ground_wigner(p.epsilon, 0.0, g.x(i), g.p(j));
        RateField zero{Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)),
                       Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)),
                       RateVariant::WidebandHeuristic, 0.0, 0.0, std::nullopt};
        TransportConfig tc;
        tc.t_end = 1.0;
        const PhaseTrajectory t = solve_cme(zero, p, init, tc);
        return l2(g, t.final_state.rho0 - init.rho0);
    };
    const double coarse = residual(64), fine = residual(128);
    MESSAGE("stationarity residual 64: " << coarse << ", 128: " << fine);
    CHECK(fine < coarse / 2.5);
}

TEST_CASE("pure hopping matches the two-state solution pointwise") {
    const ModelParams p = params(0.5);
    const LadderBasis b = build_basis(p, 8);
    const PhaseField init = PhaseField::populations(b, (Eigen::VectorXd(8) << 0.6, 0, 0, 0, 0, 0, 0, 0).finished(),
                                                    (Eigen::VectorXd(8) << 0, 0.4, 0, 0, 0, 0, 0, 0).finished(), kGrid);
    const double a = 0.7, c = 0.2;
    RateField r{Eigen::MatrixXd::Constant(128, 128, a), Eigen::MatrixXd::Constant(128, 128, c),
                RateVariant::WidebandHeuristic, 0.0, 0.0, std::nullopt};
    TransportConfig tc;
    tc.t_end = 1.5;
    tc.dt = 0.1;
    tc.transport = false;
    const PhaseTrajectory t = solve_cme(r, p, init, tc);
    const double e = std::exp(-(a + c) * 1.5), s = a + c;
    const Eigen::MatrixXd expect0 = init.rho0 * (c / s + a / s * e) + init.rho1 * (c / s) * (1 - e);
    const Eigen::MatrixXd expect1 = init.rho1 * (a / s + c / s * e) + init.rho0 * (a / s) * (1 - e);
    CHECK((t.final_state.rho0 - expect0).cwiseAbs().maxCoeff() < 1e-8);
    CHECK((t.final_state.rho1 - expect1).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("transport and hopping conserve mass") {
    const ModelParams p = params(0.5);
    const LadderBasis b = build_basis(p, 8);
    const PhaseField init = PhaseField::eigenstate(b, 1, 0, kGrid);
    CHECK(init.mass() == doctest::Approx(1.0).epsilon(1e-6));
    TransportConfig tc;
    tc.t_end = 2.0;
    tc.stride = 50;
    const RateField r = cme_rates(WideBand{1.0, kInf, 1.0}, p, kGrid, RateVariant::WidebandHeuristic);
    const PhaseTrajectory t = solve_cme(r, p, init, tc);
    CHECK(t.max_mass_drift / tc.t_end < 1e-6);
    CHECK(t.mass1.back() > 0.0);
    CHECK(t.snapshots.size() >= 2);
    CHECK(t.times.back() == 2.0);
}

TEST_CASE("CFL and configuration errors") {
    const ModelParams p = params(0.5);
    const LadderBasis b = build_basis(p, 4);
    const PhaseField init = PhaseField::eigenstate(b, 0, 0, kGrid);
    const RateField r = cme_rates(WideBand{1.0, kInf, 1.0}, p, kGrid, RateVariant::WidebandHeuristic);
    TransportConfig tc;
    tc.t_end = 0.5;
    tc.dt = 0.5;
    CHECK_THROWS_AS(solve_cme(r, p, init, tc), std::invalid_argument);
    tc.dt = 0.002;
    CHECK_NOTHROW(solve_cme(r, p, init, tc));
    tc.cfl = 1.5;
    CHECK_THROWS_AS(solve_cme(r, p, init, tc), std::invalid_argument);
}

TEST_CASE("LCME without Lamb shift equals CME driven by the LCME fields") {
    const ModelParams p = params(0.5);
    const LadderBasis b = build_basis(p, 16);
    const LcmeFields f = lcme_rate_fields(b, tabulate_coeffs(b, WideBand{1.0, kInf, 1.0}), kGrid);
    CHECK(f.h0_corr.cwiseAbs().maxCoeff() == 0.0);
    CHECK(f.h1_corr.cwiseAbs().maxCoeff() == 0.0);
    const PhaseField init = PhaseField::eigenstate(b, 0, 0, kGrid);
    TransportConfig tc;
    tc.t_end = 0.5;
    const PhaseTrajectory a = solve_lcme(f, p, init, tc);
    const PhaseTrajectory c = solve_cme(f.rates, p, init, tc);
    CHECK((a.final_state.rho0 - c.final_state.rho0).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.final_state.rho1 - c.final_state.rho1).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("LCME with alpha = 0 conserves each level") {
    const ModelParams p = params(0.5, 0.0);
    const LadderBasis b = build_basis(p, 16);
    const LcmeFields f = lcme_rate_fields(b, tabulate_coeffs(b, WideBand{1.0, 4.0, 1.0}), kGrid);
    const PhaseField init = PhaseField::populations(b, (Eigen::VectorXd(16) << 0.5, Eigen::VectorXd::Zero(15)).finished(),
                                                    (Eigen::VectorXd(16) << 0.5, Eigen::VectorXd::Zero(15)).finished(),
                                                    kGrid);
    TransportConfig tc;
    tc.t_end = 1.0;
    const PhaseTrajectory t = solve_lcme(f, p, init, tc);
    CHECK(std::abs(t.mass0.back() - t.mass0.front()) < 1e-10);
    CHECK(std::abs(t.mass1.back() - t.mass1.front()) < 1e-10);
}

TEST_CASE("rate variant names") {
    for (RateVariant v : {RateVariant::Full, RateVariant::WidebandHeuristic, RateVariant::LcmeEigenstate})
        CHECK(rate_variant_from_string(to_string(v)) == v);
    CHECK_THROWS_AS(rate_variant_from_string("bogus"), std::invalid_argument);
}
