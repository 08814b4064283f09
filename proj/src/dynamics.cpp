// dynamics.cpp — RK4 / Dormand-Prince propagation and observables

#include "ahsim/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace ahsim {

void IntegratorConfig::validate() const {
    if (dt < 0.0 || !std::isfinite(dt)) throw std::invalid_argument("IntegratorConfig: dt must be >= 0 (0 = default)");
    if (!(tolerance > 0.0)) throw std::invalid_argument("IntegratorConfig: tolerance must be > 0");
    if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw std::invalid_argument("IntegratorConfig: t_end must be >= 0");
    if (stride == 0) throw std::invalid_argument("IntegratorConfig: stride must be >= 1");
}

double default_dt(const ModelParams& params) {
    if (params.alpha == 0.0) return 0.01;
    return std::min(0.01, 0.05 * params.relaxation_time() / 1000.0);
}

Observables observables(const Eigen::MatrixXcd& rho, double time) {
    const auto n = rho.rows() / 2;
    Observables o;
    o.time = time;
    o.trace = rho.trace().real();
    o.trace0 = rho.topLeftCorner(n, n).trace().real();
    o.trace1 = rho.bottomRightCorner(n, n).trace().real();
    o.lambda = rho.diagonal().head(n).real();
    o.theta = rho.diagonal().tail(n).real();
    o.coherence = rho.topRightCorner(n, n).norm();
    double off = 0.0;
    for (Eigen::Index c = 0; c < n; ++c)
        for (Eigen::Index r = 0; r < n; ++r) {
            if (r == c) continue;
            off = std::max({off, std::abs(rho(r, c)), std::abs(rho(n + r, n + c))});
        }
    o.block_offdiag = off;
    o.hermiticity = (rho - rho.adjoint()).norm();
    const Eigen::MatrixXcd herm = 0.5 * (rho + rho.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(herm, Eigen::EigenvaluesOnly);
    o.min_eigenvalue = es.eigenvalues().minCoeff();
    return o;
}

Observables observables(const BlockDensity& rho, double time) { return observables(rho.full(), time); }

namespace {

bool all_finite(const Eigen::MatrixXcd& m) {
    for (Eigen::Index i = 0; i < m.size(); ++i)
        if (!std::isfinite(m.data()[i].real()) || !std::isfinite(m.data()[i].imag())) return false;
    return true;
}

Eigen::MatrixXcd rk4_step(const Generator& gen, const Eigen::MatrixXcd& y, double h) {
    const Eigen::MatrixXcd k1 = gen.apply(y);
    const Eigen::MatrixXcd k2 = gen.apply(y + 0.5 * h * k1);
    const Eigen::MatrixXcd k3 = gen.apply(y + 0.5 * h * k2);
    const Eigen::MatrixXcd k4 = gen.apply(y + h * k3);
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// Dormand-Prince 5(4) tableau.
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200, e6 = 22.0 / 525,
                 e7 = -1.0 / 40;

struct DpResult {
    Eigen::MatrixXcd y;
    double error; // scaled error norm, accept when <= 1
};

DpResult dp_step(const Generator& gen, const Eigen::MatrixXcd& y, double h, double tol) {
    const Eigen::MatrixXcd k1 = gen.apply(y);
    const Eigen::MatrixXcd k2 = gen.apply(y + h * a21 * k1);
    const Eigen::MatrixXcd k3 = gen.apply(y + h * (a31 * k1 + a32 * k2));
    const Eigen::MatrixXcd k4 = gen.apply(y + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const Eigen::MatrixXcd k5 = gen.apply(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const Eigen::MatrixXcd k6 = gen.apply(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    Eigen::MatrixXcd y5 = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const Eigen::MatrixXcd k7 = gen.apply(y5);
    const Eigen::MatrixXcd err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    double norm = 0.0;
    for (Eigen::Index i = 0; i < err.size(); ++i) {
        const double scale = tol * (1.0 + std::max(std::abs(y.data()[i]), std::abs(y5.data()[i])));
        norm = std::max(norm, std::abs(err.data()[i]) / scale);
    }
    return {std::move(y5), norm};
}

} // namespace

Trajectory propagate(const Generator& gen, const BlockDensity& rho_init, const IntegratorConfig& cfg) {
    cfg.validate();
    Eigen::MatrixXcd rho = rho_init.full();
    if (static_cast<std::size_t>(rho.rows()) != gen.dim())
        throw std::invalid_argument("propagate: initial state dimension does not match the generator");
    if ((rho - rho.adjoint()).norm() > 1e-12 * std::max(1.0, rho.norm()))
        throw std::invalid_argument("propagate: initial state is not Hermitian");

    const double trace0 = rho.trace().real();
    const double h_default = cfg.dt > 0.0 ? cfg.dt : default_dt(gen.basis().params());

    Trajectory traj;
    auto record = [&](double t) {
        Observables o = observables(rho, t);
        traj.min_eigenvalue = traj.records.empty() ? o.min_eigenvalue : std::min(traj.min_eigenvalue, o.min_eigenvalue);
        traj.times.push_back(t);
        if (cfg.keep_states) traj.states.push_back(BlockDensity::from_full(rho));
        traj.records.push_back(std::move(o));
    };
    auto track = [&](const Eigen::MatrixXcd& next) {
        traj.max_hermiticity = std::max(traj.max_hermiticity, (next - next.adjoint()).norm());
    };
    auto after_step = [&]() {
        const auto n = rho.rows() / 2;
        traj.max_trace_drift = std::max(traj.max_trace_drift, std::abs(rho.trace().real() - trace0));
        traj.max_coherence = std::max(traj.max_coherence, rho.topRightCorner(n, n).norm());
        double off = 0.0;
        for (Eigen::Index c = 0; c < n; ++c)
            for (Eigen::Index r = 0; r < n; ++r)
                if (r != c) off = std::max({off, std::abs(rho(r, c)), std::abs(rho(n + r, n + c))});
        traj.max_block_offdiag = std::max(traj.max_block_offdiag, off);
    };

    record(0.0);
    after_step();
    if (cfg.t_end == 0.0) return traj;

    double t = 0.0;
    std::size_t since_record = 0;

    if (cfg.method == IntegratorMethod::RK4) {
        const auto steps = static_cast<std::size_t>(std::ceil(cfg.t_end / h_default - 1e-9));
        const double h = cfg.t_end / static_cast<double>(steps);
        for (std::size_t s = 1; s <= steps; ++s) {
            Eigen::MatrixXcd next = rk4_step(gen, rho, h);
            if (!all_finite(next)) {
                std::ostringstream os;
                os << "propagate: non-finite state at t = " << static_cast<double>(s) * h;
                throw PropagationError(os.str(), t, BlockDensity::from_full(rho));
            }
            track(next);
            rho = 0.5 * (next + next.adjoint());
            t = (s == steps) ? cfg.t_end : static_cast<double>(s) * h;
            ++traj.accepted_steps;
            after_step();
            if (++since_record == cfg.stride || s == steps) {
                record(t);
                since_record = 0;
            }
        }
        return traj;
    }

    double h = std::min(h_default, cfg.t_end);
    const double h_min = 1e-14 * std::max(1.0, cfg.t_end);
    while (t < cfg.t_end) {
        const bool last = t + h >= cfg.t_end * (1.0 - 1e-15);
        const double step = last ? cfg.t_end - t : h;
        DpResult r = dp_step(gen, rho, step, cfg.tolerance);
        if (!all_finite(r.y) || !std::isfinite(r.error)) {
            if (step <= h_min) {
                std::ostringstream os;
                os << "propagate: non-finite state at t = " << t + step;
                throw PropagationError(os.str(), t, BlockDensity::from_full(rho));
            }
            h = 0.2 * step;
            ++traj.rejected_steps;
            continue;
        }
        const double factor =
            r.error == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(r.error, -0.2), 0.2, 5.0);
        if (r.error > 1.0) {
            ++traj.rejected_steps;
            h = step * factor;
            if (h < h_min) {
                std::ostringstream os;
                os << "propagate: adaptive step underflow at t = " << t;
                throw PropagationError(os.str(), t, BlockDensity::from_full(rho));
            }
            continue;
        }
        track(r.y);
        rho = 0.5 * (r.y + r.y.adjoint());
        t = last ? cfg.t_end : t + step;
        ++traj.accepted_steps;
        after_step();
        if (++since_record == cfg.stride || last) {
            record(t);
            since_record = 0;
        }
        if (!last) h = step * factor;
    }
    return traj;
}

RateTrajectory propagate_rates(const RateMatrix& rates, const Eigen::VectorXd& lambda0, const Eigen::VectorXd& theta0,
                               const IntegratorConfig& cfg) {
    cfg.validate();
    const auto n = static_cast<Eigen::Index>(rates.n_max());
    if (lambda0.size() != n || theta0.size() != n)
        throw std::invalid_argument("propagate_rates: population vectors must have length n_max");
    if (lambda0.minCoeff() < 0.0 || theta0.minCoeff() < 0.0)
        throw std::invalid_argument("propagate_rates: initial populations must be >= 0");
    const double total0 = lambda0.sum() + theta0.sum();
    if (std::abs(total0 - 1.0) > 1e-12) throw std::invalid_argument("propagate_rates: populations must sum to 1");

    const double h_req = cfg.dt > 0.0 ? cfg.dt : 0.01;
    RateTrajectory out;
    Eigen::VectorXd lam = lambda0, th = theta0;
    out.times.push_back(0.0);
    out.lambda.push_back(lam);
    out.theta.push_back(th);
    if (cfg.t_end == 0.0) return out;

    const auto steps = static_cast<std::size_t>(std::ceil(cfg.t_end / h_req - 1e-9));
    const double h = cfg.t_end / static_cast<double>(steps);
    Eigen::VectorXd dl1, dt1, dl2, dt2, dl3, dt3, dl4, dt4;
    std::size_t since_record = 0;
    for (std::size_t s = 1; s <= steps; ++s) {
        rates.derivative(lam, th, dl1, dt1);
        rates.derivative(lam + 0.5 * h * dl1, th + 0.5 * h * dt1, dl2, dt2);
        rates.derivative(lam + 0.5 * h * dl2, th + 0.5 * h * dt2, dl3, dt3);
        rates.derivative(lam + h * dl3, th + h * dt3, dl4, dt4);
        lam += (h / 6.0) * (dl1 + 2.0 * dl2 + 2.0 * dl3 + dl4);
        th += (h / 6.0) * (dt1 + 2.0 * dt2 + 2.0 * dt3 + dt4);
        const double t = (s == steps) ? cfg.t_end : static_cast<double>(s) * h;
        const double lowest = std::min(lam.minCoeff(), th.minCoeff());
        if (lowest < -1e-10) {
            std::ostringstream os;
            os << "propagate_rates: population " << lowest << " < -1e-10 at t = " << t
               << " (rate matrix or step size is broken)";
            throw std::runtime_error(os.str());
        }
        out.max_probability_drift = std::max(out.max_probability_drift, std::abs(lam.sum() + th.sum() - total0));
        if (++since_record == cfg.stride || s == steps) {
            out.times.push_back(t);
            out.lambda.push_back(lam);
            out.theta.push_back(th);
            since_record = 0;
        }
    }
    return out;
}

} // namespace ahsim
