// basis.cpp — Franck-Condon factors and ladder eigenbasis

#include "ahsim/basis.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace ahsim {

void ModelParams::validate() const {
    auto fail = [](const std::string& what) { throw std::invalid_argument("ModelParams: " + what); };
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) fail("epsilon must be finite and > 0");
    if (!(beta > 0.0) || std::isnan(beta)) fail("beta must be > 0");
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) fail("alpha must be finite and >= 0");
    if (!std::isfinite(g)) fail("g must be finite");
    if (!std::isfinite(ebar0)) fail("ebar0 must be finite");
}

double ModelParams::relaxation_time() const {
    if (alpha == 0.0) return std::numeric_limits<double>::infinity();
    return epsilon / (alpha * alpha);
}

std::optional<std::string> ModelParams::weak_coupling_warning() const {
    const double ratio = dissipative_scale();
    if (ratio < 0.1) return std::nullopt;
    std::ostringstream os;
    os << "alpha^2/epsilon = " << ratio << " >= 0.1: outside the weak-coupling regime";
    return os.str();
}

namespace {

struct Scaled {
    double mantissa;
    double log_scale; // value = mantissa * exp(log_scale)
};

// Ascending recurrence with periodic renormalization so that large orders
// and large arguments do not overflow.
Scaled laguerre_scaled(int n, double a, double x) {
    double prev = 1.0;
    if (n == 0) return {prev, 0.0};
    double cur = 1.0 + a - x;
    double log_scale = 0.0;
    for (int k = 1; k < n; ++k) {
        const double next = ((2.0 * k + 1.0 + a - x) * cur - (k + a) * prev) / (k + 1.0);
        prev = cur;
        cur = next;
        const double mag = std::abs(cur);
        if (mag > 1e150) {
            prev /= mag;
            cur /= mag;
            log_scale += std::log(mag);
        }
    }
    return {cur, log_scale};
}

} // namespace

double laguerre(int n, double a, double x) {
    if (n < 0) throw std::invalid_argument("laguerre: negative order");
    const auto s = laguerre_scaled(n, a, x);
    return s.mantissa * std::exp(s.log_scale);
}

double franck_condon(const ModelParams& params, int n, int m) {
    if (n < 0 || m < 0) throw std::invalid_argument("franck_condon: negative level index");
    if (!(params.epsilon > 0.0)) throw std::invalid_argument("franck_condon: epsilon must be > 0");
    if (params.g == 0.0) return n == m ? 1.0 : 0.0;

    const int lo = std::min(n, m);
    const int hi = std::max(n, m);
    const int gap = hi - lo;
    const double s = params.g / std::sqrt(params.epsilon);
    const double x = s * s;

    const auto lag = laguerre_scaled(lo, gap, x);
    if (lag.mantissa == 0.0) return 0.0;

    const double log_mag = 0.5 * (std::lgamma(lo + 1.0) - std::lgamma(hi + 1.0)) - 0.5 * x +
                           gap * std::log(std::abs(s)) + lag.log_scale;
    double sign = ((n - lo) % 2 == 0) ? 1.0 : -1.0;
    if (s < 0.0 && gap % 2 == 1) sign = -sign;

    const double value = sign * lag.mantissa * std::exp(log_mag);
    if (!std::isfinite(value)) {
        std::ostringstream os;
        os << "franck_condon: non-finite overlap for n=" << n << ", m=" << m;
        throw std::overflow_error(os.str());
    }
    return value;
}

LadderBasis::LadderBasis(const ModelParams& params, std::size_t n_max)
    : params_(params), n_max_(n_max), fc_(n_max, n_max), energies0_(n_max), energies1_(n_max) {
    params_.validate();
    if (n_max < 2) throw std::invalid_argument("LadderBasis: n_max must be >= 2");
    for (std::size_t k = 0; k < n_max; ++k) {
        energies0_[k] = params_.epsilon * (k + 0.5);
        energies1_[k] = params_.epsilon * (k + 0.5) + params_.ebar0;
    }
    for (std::size_t n = 0; n < n_max; ++n)
        for (std::size_t m = 0; m < n_max; ++m)
            fc_(n, m) = franck_condon(params_, static_cast<int>(n), static_cast<int>(m));
}

Eigen::VectorXd LadderBasis::hamiltonian_diagonal() const {
    Eigen::VectorXd h(dim());
    h.head(n_max_) = energies0_;
    h.tail(n_max_) = energies1_;
    return h;
}

Eigen::MatrixXd LadderBasis::hamiltonian() const { return hamiltonian_diagonal().asDiagonal(); }

Eigen::MatrixXd LadderBasis::annihilation() const {
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(dim(), dim());
    d.topRightCorner(n_max_, n_max_) = fc_;
    return d;
}

Eigen::MatrixXd LadderBasis::d_operator(int omega) const {
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(dim(), dim());
    const int n = static_cast<int>(n_max_);
    if (omega <= -n || omega >= n) return D;
    for (int k = std::max(0, -omega); k < n && k + omega < n; ++k)
        D(index0(k), index1(k + omega)) = fc_(k, k + omega);
    return D;
}

LadderBasis build_basis(const ModelParams& params, std::size_t n_max) {
    return LadderBasis(params, n_max);
}

double commutator_check(const LadderBasis& basis, int omega) {
    const Eigen::MatrixXd D = basis.d_operator(omega);
    const Eigen::VectorXd h = basis.hamiltonian_diagonal();
    // [H, D]_{rc} = (h_r - h_c) D_{rc} for diagonal H
    Eigen::MatrixXd residual = D;
    for (Eigen::Index r = 0; r < D.rows(); ++r)
        for (Eigen::Index c = 0; c < D.cols(); ++c)
            residual(r, c) = (h[r] - h[c]) * D(r, c) + basis.params().epsilon * omega * D(r, c);
    return residual.norm();
}

} // namespace ahsim
