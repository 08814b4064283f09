// oracles.hpp — Independent reference computations shared by the acceptance suite and the tests
//
// Nothing here calls into the library's closed forms: Franck-Condon overlaps come from
// Gauss-Hermite quadrature of Hermite functions, Wigner references from the Gaussian.

#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

namespace ahsim::oracle {

// Normalized Hermite functions without the Gaussian factor: psi_k(u) = h_k(u) exp(-u^2/2).
inline std::vector<double> hermite_polys(int count, double u) {
    std::vector<double> h(static_cast<std::size_t>(count), 0.0);
    if (count == 0) return h;
    h[0] = std::pow(std::numbers::pi, -0.25);
    if (count > 1) h[1] = std::sqrt(2.0) * u * h[0];
    for (int k = 1; k + 1 < count; ++k)
        h[k + 1] = std::sqrt(2.0 / (k + 1)) * u * h[k] - std::sqrt(static_cast<double>(k) / (k + 1)) * h[k - 1];
    return h;
}

struct Quadrature {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Gauss-Hermite rule for weight exp(-u^2): Golub-Welsch nodes polished by Newton,
// Christoffel weights 1 / sum_k h_k(u)^2.
inline Quadrature gauss_hermite(int n) {
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) J(k, k - 1) = J(k - 1, k) = std::sqrt(k / 2.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J, Eigen::EigenvaluesOnly);
    Quadrature q;
    for (int i = 0; i < n; ++i) {
        double u = es.eigenvalues()[i];
        for (int it = 0; it < 3; ++it) {
            const auto h = hermite_polys(n + 1, u);
            // h_n' = sqrt(2n) h_{n-1}
            const double step = h[static_cast<std::size_t>(n)] / (std::sqrt(2.0 * n) * h[static_cast<std::size_t>(n - 1)]);
            u -= step;
        }
        const auto h = hermite_polys(n, u);
        double s = 0.0;
        for (double v : h) s += v * v;
        q.nodes.push_back(u);
        q.weights.push_back(1.0 / s);
    }
    return q;
}

// <phi_n^0 | phi_m^1> with phi_m^1(x) = phi_m^0(x + sqrt(2) g), phi_k^0(x) = eps^{-1/4} psi_k(x / sqrt(eps)).
// Integrand in u = x / sqrt(eps) is exp(-(v)^2) exp(-c^2/4) h_n(v - c/2) h_m(v + c/2), v = u + c/2.
inline double franck_condon_quadrature(double eps, double g, int n, int m, const Quadrature& q) {
    const double c = std::sqrt(2.0) * g / std::sqrt(eps);
    const int count = std::max(n, m) + 1;
    double sum = 0.0;
    for (std::size_t i = 0; i < q.nodes.size(); ++i) {
        const double v = q.nodes[i];
        const auto a = hermite_polys(count, v - 0.5 * c);
        const auto b = hermite_polys(count, v + 0.5 * c);
        sum += q.weights[i] * a[static_cast<std::size_t>(n)] * b[static_cast<std::size_t>(m)];
    }
    return sum * std::exp(-0.25 * c * c);
}

// Ground-state Wigner density of the oscillator centred at (x0, 0), normalized to 1.
inline double ground_wigner(double eps, double x0, double x, double p) {
    const double dx = x - x0;
    return std::exp(-(dx * dx + p * p) / eps) / (std::numbers::pi * eps);
}

// Fermi function evaluated in long double, independent of the library's overflow handling.
inline double fermi_ld(double beta, double z) {
    if (std::isinf(beta)) return z > 0 ? 0.0 : (z < 0 ? 1.0 : 0.5);
    return static_cast<double>(1.0L / (1.0L + std::exp(static_cast<long double>(beta) * z)));
}

// Least-squares slope of y against x.
inline double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

} // namespace ahsim::oracle
