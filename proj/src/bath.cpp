// bath.cpp — Discrete and wide-band bath coefficients

#include "ahsim/bath.hpp"

#include <algorithm>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace ahsim {

double fermi(double beta, double z) {
    if (std::isinf(beta)) {
        if (z > 0.0) return 0.0;
        if (z < 0.0) return 1.0;
        return 0.5;
    }
    const double bz = beta * z;
    if (bz > 0.0) {
        const double e = std::exp(-bz);
        return e / (1.0 + e);
    }
    return 1.0 / (1.0 + std::exp(bz));
}

void DiscreteBath::validate() const {
    if (levels.empty()) throw std::invalid_argument("DiscreteBath: empty level list");
    if (!(sigma > 0.0)) throw std::invalid_argument("DiscreteBath: sigma must be > 0");
    if (!(beta > 0.0)) throw std::invalid_argument("DiscreteBath: beta must be > 0");
}

void WideBand::validate() const {
    if (!(gamma > 0.0)) throw std::invalid_argument("WideBand: gamma must be > 0");
    if (!(half_width > 0.0)) throw std::invalid_argument("WideBand: half width D must be > 0");
    if (!(beta > 0.0)) throw std::invalid_argument("WideBand: beta must be > 0");
}

DiscreteBath uniform_bath(std::size_t n_levels, double e_min, double e_max, double gamma, double beta,
                          std::optional<double> sigma) {
    if (n_levels < 2) throw std::invalid_argument("uniform_bath: need at least two levels");
    if (!(e_max > e_min)) throw std::invalid_argument("uniform_bath: e_max must exceed e_min");
    const double spacing = (e_max - e_min) / static_cast<double>(n_levels - 1);
    const double v = std::sqrt(gamma * spacing / (2.0 * std::numbers::pi));
    DiscreteBath bath;
    bath.beta = beta;
    bath.sigma = sigma.value_or(2.0 * spacing);
    bath.levels.reserve(n_levels);
    for (std::size_t k = 0; k < n_levels; ++k)
        bath.levels.push_back({e_min + spacing * static_cast<double>(k), v});
    bath.validate();
    return bath;
}

CoeffSet::CoeffSet(int omega_max, double epsilon, double shift)
    : omega_max_(omega_max), epsilon_(epsilon), shift_(shift) {
    if (omega_max < 0) throw std::invalid_argument("CoeffSet: omega_max must be >= 0");
    const auto n = static_cast<std::size_t>(2 * omega_max + 1);
    a_F_.assign(n, 0.0);
    b_F_.assign(n, 0.0);
    a_G_.assign(n, 0.0);
    b_G_.assign(n, 0.0);
    cut_off_.assign(n, 0);
}

std::size_t CoeffSet::slot(int omega) const {
    if (!contains(omega)) {
        std::ostringstream os;
        os << "CoeffSet: omega " << omega << " outside tabulated range +-" << omega_max_;
        throw std::out_of_range(os.str());
    }
    return static_cast<std::size_t>(omega + omega_max_);
}

void CoeffSet::set(int omega, double a_F, double b_F, double a_G, double b_G, bool cut_off) {
    const auto s = slot(omega);
    a_F_[s] = a_F;
    b_F_[s] = b_F;
    a_G_[s] = a_G;
    b_G_[s] = b_G;
    cut_off_[s] = cut_off ? 1 : 0;
}

CoeffSet coeffs_discrete(const DiscreteBath& bath, double epsilon, int omega_max, double shift) {
    bath.validate();
    const double s = bath.sigma;
    CoeffSet out(omega_max, epsilon, shift);
    for (int w = -omega_max; w <= omega_max; ++w) {
        const double e = out.energy(w);
        double aF = 0.0, bF = 0.0, aG = 0.0, bG = 0.0;
        for (const auto& lv : bath.levels) {
            const double v2 = lv.coupling * lv.coupling;
            const double f = fermi(bath.beta, lv.energy);
            const double h = fermi(bath.beta, -lv.energy);
            const double x = lv.energy - e;
            const double den = x * x + s * s;
            const double delta = s / (std::numbers::pi * den);
            const double pv = x / den;
            aF += v2 * f * delta;
            aG += v2 * h * delta;
            bF += v2 * f * pv;
            bG += v2 * h * pv;
        }
        out.set(w, 2.0 * std::numbers::pi * aF, bF, 2.0 * std::numbers::pi * aG, bG);
    }
    return out;
}

double wideband_pv(const WideBand& band, double energy, bool hole, double tolerance) {
    band.validate();
    if (!band.finite_band())
        throw std::domain_error("wideband_pv: principal value diverges for an infinite band");
    const double D = band.half_width;
    if (std::abs(energy) == D)
        throw std::domain_error("wideband_pv: energy on the band edge (log divergence)");

    auto occ = [&](double e) {
        return fermi(band.beta, hole ? -e : e);
    };

    // Breakpoints: band edges, Fermi step, and the singular point when inside the band.
    std::vector<double> cuts{-D, D, 0.0};
    const bool inside = std::abs(energy) < D;
    if (inside) cuts.push_back(energy);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    using Quad = boost::math::quadrature::gauss_kronrod<double, 61>;
    const double h0 = inside ? occ(energy) : 0.0;
    auto integrand = [&](double e) {
        const double x = e - energy;
        if (x == 0.0) return 0.0;
        return (occ(e) - h0) / x;
    };

    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        double err = 0.0;
        total += Quad::integrate(integrand, cuts[i], cuts[i + 1], 20, tolerance, &err);
    }
    if (inside) total += h0 * std::log((D - energy) / (D + energy));
    return band.gamma / (2.0 * std::numbers::pi) * total;
}

CoeffSet coeffs_wideband(const WideBand& band, double epsilon, int omega_max, double shift, double pv_tolerance) {
    band.validate();
    CoeffSet out(omega_max, epsilon, shift);
    out.set_lamb_shift_dropped(!band.finite_band());
    for (int w = -omega_max; w <= omega_max; ++w) {
        const double e = out.energy(w);
        const bool cut = band.finite_band() && std::abs(e) > band.half_width;
        const double f = fermi(band.beta, e);
        const double aF = cut ? 0.0 : band.gamma * f;
        const double aG = cut ? 0.0 : band.gamma * fermi(band.beta, -e);
        double bF = 0.0, bG = 0.0;
        if (band.finite_band() && std::abs(e) != band.half_width) {
            bF = wideband_pv(band, e, false, pv_tolerance);
            bG = wideband_pv(band, e, true, pv_tolerance);
        }
        out.set(w, aF, bF, aG, bG, cut);
    }
    return out;
}

WidebandConvergence convergence_to_wideband(const DiscreteBath& bath, const WideBand& band, double epsilon,
                                            double window, double shift) {
    band.validate();
    const int omega_max = static_cast<int>(std::floor(window / epsilon + std::abs(shift) / epsilon)) + 1;
    const CoeffSet discrete = coeffs_discrete(bath, epsilon, omega_max, shift);
    const bool sharp_step = std::isinf(band.beta);

    WidebandConvergence result;
    for (int w = -omega_max; w <= omega_max; ++w) {
        const double e = discrete.energy(w);
        if (std::abs(e) > window) continue;
        if (sharp_step && std::abs(e) <= 5.0 * bath.sigma) continue;
        const double exact = band.gamma * fermi(band.beta, e);
        const double err = std::abs(discrete.a_F(w) - exact) / band.gamma;
        ++result.tested;
        if (err > result.max_error) {
            result.max_error = err;
            result.worst_omega = w;
        }
    }
    return result;
}

} // namespace ahsim
