// bath.hpp — Fermionic bath spectra: F(omega), G(omega) and their a/b decompositions

#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

namespace ahsim {

// Fermi-Dirac occupation 1 / (1 + exp(beta z)). beta may be +infinity (step, 1/2 at z = 0).
double fermi(double beta, double z);

struct BathLevel {
    double energy{0.0};   // E_k, measured from the Fermi level
    double coupling{0.0}; // V_k (real)
    bool operator==(const BathLevel&) const = default;
};

struct DiscreteBath {
    std::vector<BathLevel> levels;
    double beta{1.0};
    double sigma{0.01}; // Lorentzian broadening of the delta / principal-value pair

    void validate() const;
    bool operator==(const DiscreteBath&) const = default;
};

// N equally spaced levels on [e_min, e_max] with 2 pi V^2 / spacing = gamma, so that the
// continuum limit is the wide band with level width gamma. sigma defaults to 2 x spacing.
DiscreteBath uniform_bath(std::size_t n_levels, double e_min, double e_max, double gamma, double beta,
                          std::optional<double> sigma = std::nullopt);

struct WideBand {
    double gamma{1.0};                                          // level width Gamma
    double half_width{std::numeric_limits<double>::infinity()}; // D
    double beta{1.0};

    void validate() const;
    bool finite_band() const noexcept { return std::isfinite(half_width); }
    bool operator==(const WideBand&) const = default;
};

// a_F, b_F, a_G, b_G tabulated on omega = -omega_max .. omega_max at the transition
// energies epsilon * omega + shift.
class CoeffSet {
public:
    CoeffSet() = default;
    CoeffSet(int omega_max, double epsilon, double shift);

    int omega_max() const noexcept { return omega_max_; }
    double epsilon() const noexcept { return epsilon_; }
    double shift() const noexcept { return shift_; }
    bool contains(int omega) const noexcept { return omega >= -omega_max_ && omega <= omega_max_; }
    double energy(int omega) const noexcept { return epsilon_ * omega + shift_; }

    double a_F(int omega) const { return a_F_[slot(omega)]; }
    double b_F(int omega) const { return b_F_[slot(omega)]; }
    double a_G(int omega) const { return a_G_[slot(omega)]; }
    double b_G(int omega) const { return b_G_[slot(omega)]; }

    // F = a_F / 2 + i b_F, G = a_G / 2 + i b_G.
    std::complex<double> F(int omega) const { return {0.5 * a_F(omega), b_F(omega)}; }
    std::complex<double> G(int omega) const { return {0.5 * a_G(omega), b_G(omega)}; }

    // Set when the band cutoff zeroed the a-coefficients at this omega.
    bool cut_off(int omega) const { return cut_off_[slot(omega)] != 0; }
    // Set when b-coefficients were not computed (infinite band: log divergent).
    bool lamb_shift_dropped() const noexcept { return lamb_shift_dropped_; }

    void set(int omega, double a_F, double b_F, double a_G, double b_G, bool cut_off = false);
    void set_lamb_shift_dropped(bool v) noexcept { lamb_shift_dropped_ = v; }

private:
    std::size_t slot(int omega) const;

    int omega_max_{0};
    double epsilon_{1.0};
    double shift_{0.0};
    bool lamb_shift_dropped_{false};
    std::vector<double> a_F_, b_F_, a_G_, b_G_;
    std::vector<char> cut_off_;
};

// Broadened discrete-bath coefficients:
//   a_F = 2 pi sum V^2 f(E_k) delta_s(E_k - E),  b_F = sum V^2 f(E_k) (E_k - E) / ((E_k - E)^2 + s^2)
// with delta_s the Lorentzian of half width s; G analogues with 1 - f.
CoeffSet coeffs_discrete(const DiscreteBath& bath, double epsilon, int omega_max, double shift = 0.0);

// Wide-band coefficients: a_F = Gamma f(E) chi(|E| <= D), a_G = Gamma (1 - f(E)) chi(|E| <= D);
// b's by principal-value quadrature of Gamma / (2 pi) PV int_{-D}^{D} f(E') / (E' - E) dE'
// (finite D only; for infinite D they diverge logarithmically and are set to zero).
CoeffSet coeffs_wideband(const WideBand& band, double epsilon, int omega_max, double shift = 0.0,
                         double pv_tolerance = 1e-10);

// Gamma / (2 pi) PV int_{-D}^{D} occupation(E') / (E' - E) dE' for finite D, occupation = f (fermi)
// or 1 - f (hole).
double wideband_pv(const WideBand& band, double energy, bool hole, double tolerance = 1e-10);

struct WidebandConvergence {
    double max_error{0.0};  // sup |a_F(omega) - Gamma f(E)| / Gamma over the tested omegas
    int worst_omega{0};
    std::size_t tested{0};
};

// Compares discrete-bath a_F against the wide-band closed form for |E| <= window. At
// zero temperature omegas within 5 sigma of the Fermi step are skipped.
WidebandConvergence convergence_to_wideband(const DiscreteBath& bath, const WideBand& band, double epsilon,
                                            double window, double shift = 0.0);

} // namespace ahsim
