// acceptance.cpp — Acceptance criteria 1-12 with pinned tolerances

#include "ahsim/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "ahsim/basis.hpp"
#include "ahsim/bath.hpp"
#include "ahsim/dynamics.hpp"
#include "ahsim/generators.hpp"
#include "ahsim/semiclassical.hpp"
#include "oracles.hpp"

namespace ahsim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string sci(double v) {
    std::ostringstream s;
    s << std::scientific << std::setprecision(2) << v;
    return s.str();
}

struct Outcome {
    bool passed;
    std::string detail;
};

// Shared quantum scenario: n_max = 10, wide band Gamma = 1, beta = 1, eps = 0.5, alpha = 0.05.
ModelParams scenario_params() {
    ModelParams p;
    p.epsilon = 0.5;
    p.alpha = 0.05;
    p.g = 0.5;
    p.ebar0 = 0.0;
    p.beta = 1.0;
    return p;
}

IntegratorConfig scenario_integrator() {
    IntegratorConfig ic;
    ic.method = IntegratorMethod::RK4;
    ic.dt = 0.01;
    ic.t_end = 20.0;
    ic.stride = 1;
    ic.keep_states = false;
    return ic;
}

BlockDensity superposition_state(std::size_t n) {
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(2 * n));
    psi[0] = std::sqrt(0.5);
    psi[static_cast<Eigen::Index>(n + 1)] = std::complex<double>(0.0, std::sqrt(0.5));
    return BlockDensity::from_full(psi * psi.adjoint());
}

BlockDensity diagonal_state(std::size_t n) {
    Eigen::VectorXd lambda = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    Eigen::VectorXd theta = lambda;
    lambda.head(3) << 0.4, 0.2, 0.1;
    theta.head(3) << 0.15, 0.1, 0.05;
    return BlockDensity::diagonal(lambda, theta);
}

Outcome franck_condon_oracle() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto q = oracle::gauss_hermite(80);
    double worst = 0.0;
    for (double g : {0.3, 1.0, 2.0})
        for (double eps : {0.25, 1.0}) {
            ModelParams p;
            p.g = g;
            p.epsilon = eps;
            for (int n = 0; n <= 20; ++n)
                for (int m = 0; m <= 20; ++m)
                    worst = std::max(worst,
                                     std::abs(franck_condon(p, n, m) - oracle::franck_condon_quadrature(eps, g, n, m, q)));
        }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {worst < 1e-8 && secs < 10.0, "max |closed - quadrature| = " + sci(worst) + " (< 1e-8), " + sci(secs) + " s (< 10 s)"};
}

Outcome eigen_operator_identity() {
    ModelParams p = scenario_params();
    p.g = 1.0;
    const LadderBasis basis = build_basis(p, 20);
    double worst = 0.0;
    for (int w = -19; w <= 19; ++w) worst = std::max(worst, commutator_check(basis, w));
    return {worst < 1e-12, "max_omega ||[H_s, D] + eps omega D||_F = " + sci(worst) + " (< 1e-12)"};
}

Outcome trace_hermiticity() {
    const ModelParams p = scenario_params();
    const LadderBasis basis = build_basis(p, 10);
    const CoeffSet coeffs = tabulate_coeffs(basis, WideBand{1.0, kInf, 1.0});
    std::ostringstream d;
    bool ok = true;
    for (const Generator& gen : {build_redfield(basis, coeffs), build_lindblad(basis, coeffs)}) {
        const Trajectory t = propagate(gen, superposition_state(10), scenario_integrator());
        ok = ok && t.max_trace_drift < 1e-8 && t.max_hermiticity < 1e-10;
        d << to_string(gen.kind()) << ": trace drift " << sci(t.max_trace_drift) << ", hermiticity "
          << sci(t.max_hermiticity) << "; ";
    }
    d << "limits 1e-8 / 1e-10";
    return {ok, d.str()};
}

Outcome diagonal_preservation() {
    const ModelParams p = scenario_params();
    const LadderBasis basis = build_basis(p, 10);
    const CoeffSet coeffs = tabulate_coeffs(basis, WideBand{1.0, kInf, 1.0});
    std::ostringstream d;
    bool ok = true;
    for (const Generator& gen : {build_redfield(basis, coeffs), build_lindblad(basis, coeffs)}) {
        const Trajectory t = propagate(gen, diagonal_state(10), scenario_integrator());
        // max_coherence is ||rho01||_F, which bounds every entry of the off-diagonal blocks.
        ok = ok && t.max_coherence < 1e-10;
        if (gen.kind() == GeneratorKind::Lindblad) ok = ok && t.max_block_offdiag < 1e-10;
        d << to_string(gen.kind()) << ": max ||rho01||_F " << sci(t.max_coherence) << ", within-block off-diagonal "
          << sci(t.max_block_offdiag) << (gen.kind() == GeneratorKind::Redfield ? " (reported)" : "") << "; ";
    }
    d << "limit 1e-10";
    return {ok, d.str()};
}

Outcome complete_positivity_proxy() {
    const ModelParams p = scenario_params();
    const LadderBasis basis = build_basis(p, 10);
    const CoeffSet coeffs = tabulate_coeffs(basis, WideBand{1.0, kInf, 1.0});
    const Trajectory t = propagate(build_lindblad(basis, coeffs), superposition_state(10), scenario_integrator());

    const LadderBasis small = build_basis(p, 6);
    const Eigen::MatrixXcd L = matricize(build_lindblad(small, tabulate_coeffs(small, WideBand{1.0, kInf, 1.0})));
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(L, false);
    const double max_re = es.eigenvalues().real().maxCoeff();
    return {t.min_eigenvalue >= -1e-8 && max_re <= 1e-10,
            "min eigenvalue of rho(t) = " + sci(t.min_eigenvalue) + " (>= -1e-8), max Re eig(L) at n_max 6 = " +
                sci(max_re) + " (<= 1e-10)"};
}

Outcome secular_diagonal_equality() {
    const ModelParams p = scenario_params();
    const LadderBasis basis = build_basis(p, 8);
    const CoeffSet coeffs = tabulate_coeffs(basis, WideBand{1.0, 6.0, 1.0});
    const Generator red = build_redfield(basis, coeffs);
    const Generator lin = build_lindblad(basis, coeffs);
    std::mt19937_64 rng(20241015);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        Eigen::VectorXd w(16);
        for (Eigen::Index i = 0; i < 16; ++i) w[i] = u(rng);
        w /= w.sum();
        const Eigen::MatrixXcd rho = w.cast<std::complex<double>>().asDiagonal();
        const Eigen::VectorXcd a = red.dissipative(rho).diagonal();
        const Eigen::VectorXcd b = lin.dissipative(rho).diagonal();
        worst = std::max(worst, (a - b).cwiseAbs().maxCoeff());
    }
    return {worst < 1e-13, "max entrywise diagonal difference over 50 states = " + sci(worst) + " (< 1e-13)"};
}

Outcome first_order_rates() {
    ModelParams p = scenario_params();
    p.alpha = std::sqrt(1e-3 * p.epsilon); // alpha^2 / eps = 1e-3
    const std::size_t n = 8;
    const LadderBasis basis = build_basis(p, n);
    const CoeffSet coeffs = tabulate_coeffs(basis, WideBand{1.0, kInf, 1.0});
    const RateMatrix rm = build_rate_matrix(basis, coeffs);
    const double h = 0.1;

    auto populations = [&](const Generator& gen, std::size_t i, double t) {
        IntegratorConfig ic;
        ic.dt = t / 50.0;
        ic.t_end = t;
        ic.keep_states = true;
        ic.stride = 1000000;
        const Trajectory tr = propagate(gen, BlockDensity::eigenstate(n, i, 0), ic);
        const BlockDensity& s = tr.states.back();
        Eigen::VectorXd out(2 * n);
        out << s.rho0.diagonal().real(), s.rho1.diagonal().real();
        return out;
    };

    double worst = 0.0;
    std::ostringstream d;
    for (const Generator& gen : {build_lindblad(basis, coeffs), build_redfield(basis, coeffs)}) {
        double gen_worst = 0.0;
        for (std::size_t i : {std::size_t{0}, std::size_t{3}}) {
            Eigen::VectorXd p0 = Eigen::VectorXd::Zero(2 * n);
            p0[static_cast<Eigen::Index>(i)] = 1.0;
            const Eigen::VectorXd s1 = (populations(gen, i, h) - p0) / h;
            const Eigen::VectorXd s2 = (populations(gen, i, h / 2) - p0) / (h / 2);
            const Eigen::VectorXd slope = 2.0 * s2 - s1;

            Eigen::VectorXd predicted = Eigen::VectorXd::Zero(2 * n);
            predicted[static_cast<Eigen::Index>(i)] = -rm.escape0(i);
            for (std::size_t f = 0; f < n; ++f)
                predicted[static_cast<Eigen::Index>(n + f)] = rm.k01(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(f));
            const double cut = 1e-6 * predicted.cwiseAbs().maxCoeff();
            for (Eigen::Index k = 0; k < predicted.size(); ++k) {
                if (std::abs(predicted[k]) < cut) continue;
                gen_worst = std::max(gen_worst, std::abs(slope[k] - predicted[k]) / std::abs(predicted[k]));
            }
        }
        d << to_string(gen.kind()) << " max relative slope error " << sci(gen_worst) << "; ";
        worst = std::max(worst, gen_worst);
    }
    d << "limit 1e-3";
    return {worst < 1e-3, d.str()};
}

Outcome wideband_convergence() {
    const double beta = 1.0, eps = 0.1;
    const DiscreteBath bath = uniform_bath(4000, -5.0, 5.0, 1.0, beta);
    const WidebandConvergence conv = convergence_to_wideband(bath, WideBand{1.0, kInf, beta}, eps, 3.0);

    double sum_rule = 0.0;
    for (const WideBand& wb : {WideBand{1.0, kInf, 1.0}, WideBand{1.0, kInf, kInf}, WideBand{2.5, 4.0, 3.0}}) {
        const CoeffSet c = coeffs_wideband(wb, eps, 60, 0.0);
        for (int w = -60; w <= 60; ++w)
            if (!c.cut_off(w)) sum_rule = std::max(sum_rule, std::abs(c.a_F(w) + c.a_G(w) - wb.gamma));
    }
    const bool ok = conv.max_error < 0.02 && conv.tested > 0 && sum_rule < 1e-12;
    return {ok, "sup |a_F - Gamma f| / Gamma = " + sci(conv.max_error) + " over " + std::to_string(conv.tested) +
                    " omegas (< 0.02), sum-rule residual " + sci(sum_rule) + " (< 1e-12)"};
}

Outcome franck_condon_blockade() {
    ModelParams p = scenario_params();
    p.epsilon = 0.25;
    std::vector<double> xs, ys;
    for (int i = 0; i <= 12; ++i) {
        const double x = 4.0 + i; // g^2 / eps
        p.g = std::sqrt(x * p.epsilon);
        const LadderBasis basis = build_basis(p, 8);
        const RateMatrix rm = build_rate_matrix(basis, tabulate_coeffs(basis, WideBand{1.0, kInf, 1.0}));
        xs.push_back(x);
        ys.push_back(std::log(rm.k01(0, 0)));
    }
    const double slope = oracle::fit_slope(xs, ys);
    return {std::abs(slope + 1.0) < 0.05, "fitted slope of log k_00 vs g^2/eps on [4, 16] = " + sci(slope) +
                                              " (|slope + 1| < 0.05)"};
}

Outcome wigner_normalization() {
    ModelParams p = scenario_params();
    p.epsilon = 0.1;
    const LadderBasis basis = build_basis(p, 12);
    const PhaseGrid grid{-4.2, 3.6, -3.6, 3.6, 128, 128};
    double norm_err = 0.0;
    for (int k = 0; k <= 10; ++k)
        norm_err = std::max(norm_err, std::abs(integrate(grid, wigner_projector(basis, k, 0, grid)) - 1.0));
    const Eigen::MatrixXd w0 = wigner_projector(basis, 0, 0, grid);
    double point_err = 0.0;
    for (std::size_t i = 0; i < grid.nx; ++i)
        for (std::size_t j = 0; j < grid.np; ++j)
            point_err = std::max(point_err, std::abs(w0(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) -
                                                     oracle::ground_wigner(p.epsilon, 0.0, grid.x(i), grid.p(j))));
    return {norm_err < 1e-4 && point_err < 1e-6,
            "max_k<=10 |int W_k - 1| = " + sci(norm_err) + " (< 1e-4), ground-state pointwise error " + sci(point_err) +
                " (< 1e-6)"};
}

Outcome mass_conservation() {
    ModelParams p = scenario_params();
    p.epsilon = 0.1;
    const PhaseGrid grid{-3.4, 2.8, -2.8, 2.8, 128, 128};
    const LadderBasis basis = build_basis(p, 24);
    const WideBand band{1.0, kInf, p.beta};
    const PhaseField init = PhaseField::eigenstate(basis, 2, 0, grid);
    TransportConfig tc;
    tc.t_end = 10.0;

    const RateField heuristic = cme_rates(band, p, grid, RateVariant::WidebandHeuristic);
    const PhaseTrajectory cme = solve_cme(heuristic, p, init, tc);
    const LcmeFields lf = lcme_rate_fields(basis, tabulate_coeffs(basis, band), grid);
    const PhaseTrajectory lcme = solve_lcme(lf, p, init, tc);

    double balance = 0.0;
    for (std::size_t i = 0; i < grid.nx; ++i) {
        const double U = energy_gap(p, grid.x(i));
        for (std::size_t j = 0; j < grid.np; ++j) {
            const auto a = static_cast<Eigen::Index>(i), b = static_cast<Eigen::Index>(j);
            const double ratio = heuristic.gamma01(a, b) / heuristic.gamma10(a, b);
            balance = std::max(balance, std::abs(ratio * std::exp(p.beta * U) - 1.0));
        }
    }
    const double cme_rate = cme.max_mass_drift / tc.t_end, lcme_rate = lcme.max_mass_drift / tc.t_end;
    const bool ok = cme_rate < 1e-6 && lcme_rate < 1e-6 && balance < 1e-12;
    return {ok, "mass drift per unit time: cme " + sci(cme_rate) + ", lcme " + sci(lcme_rate) +
                    " (< 1e-6); detailed-balance residual " + sci(balance) + " (< 1e-12)"};
}

Outcome lcme_quantum_consistency() {
    ModelParams p;
    p.epsilon = 0.05;
    p.alpha = 0.02;
    p.g = 0.5;
    p.ebar0 = 0.0;
    p.beta = 1.0;
    const std::size_t n = 60;
    const LadderBasis basis = build_basis(p, n);
    const CoeffSet coeffs = tabulate_coeffs(basis, WideBand{1.0, kInf, p.beta});
    const Generator lin = build_lindblad(basis, coeffs);
    const PhaseGrid grid{-3.6, 2.4, -3.0, 3.0, 128, 128};
    const LcmeFields fields = lcme_rate_fields(basis, coeffs, grid, Taper{30, 45});

    BlockDensity rho = BlockDensity::eigenstate(n, 0, 0);
    PhaseField field = PhaseField::eigenstate(basis, 0, 0, grid);
    const double seg = 0.25;
    double worst = 0.0;
    std::ostringstream d;
    for (int s = 1; s <= 4; ++s) {
        IntegratorConfig ic;
        ic.dt = 0.0025;
        ic.t_end = seg;
        ic.stride = 1000000;
        rho = propagate(lin, rho, ic).states.back();
        TransportConfig tc;
        tc.t_end = seg;
        field = solve_lcme(fields, p, field, tc).final_state;

        const double q0 = rho.rho0.trace().real(), q1 = rho.rho1.trace().real();
        const double c0 = field.mass0(), c1 = field.mass1();
        const double e = std::max(std::abs(c0 - q0) / q0, std::abs(c1 - q1) / q1);
        worst = std::max(worst, e);
        d << "t=" << s * seg << ": P1 quantum " << sci(q1) << " lcme " << sci(c1) << "; ";
    }
    d << "max relative error " << sci(worst) << " (< 0.05); taper defect " << sci(fields.rates.truncation_defect);
    return {worst < 0.05, d.str()};
}

struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
};

const std::vector<Criterion>& criteria() {
    static const std::vector<Criterion> list{
        {1, "franck-condon-oracle", franck_condon_oracle},
        {2, "eigen-operator-identity", eigen_operator_identity},
        {3, "trace-hermiticity", trace_hermiticity},
        {4, "diagonal-preservation", diagonal_preservation},
        {5, "lindblad-positivity", complete_positivity_proxy},
        {6, "secular-diagonal-equality", secular_diagonal_equality},
        {7, "first-order-rates", first_order_rates},
        {8, "wideband-convergence", wideband_convergence},
        {9, "franck-condon-blockade", franck_condon_blockade},
        {10, "wigner-normalization", wigner_normalization},
        {11, "cme-lcme-mass-conservation", mass_conservation},
        {12, "lcme-quantum-consistency", lcme_quantum_consistency},
    };
    return list;
}

} // namespace

std::vector<CriterionResult> run_acceptance(const std::vector<int>& only, std::ostream* progress) {
    std::vector<CriterionResult> out;
    for (const auto& c : criteria()) {
        if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
        CriterionResult r{c.id, c.name, false, "", 0.0};
        const auto t0 = std::chrono::steady_clock::now();
        try {
            const Outcome o = c.run();
            r.passed = o.passed;
            r.detail = o.detail;
        } catch (const std::exception& e) {
            r.detail = std::string("exception: ") + e.what();
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (progress) *progress << format_result(r) << std::endl;
        out.push_back(std::move(r));
    }
    return out;
}

std::string format_result(const CriterionResult& r) {
    std::ostringstream s;
    s << (r.passed ? "PASS" : "FAIL") << ' ' << std::setw(2) << r.id << ' ' << std::left << std::setw(27) << r.name
      << ' ' << r.detail << "  (" << std::fixed << std::setprecision(2) << r.seconds << " s)";
    return s.str();
}

} // namespace ahsim
