// params.hpp — Dimensionless physical configuration of the Anderson-Holstein model

#pragma once

#include <optional>
#include <string>

namespace ahsim {

// All quantities are already non-dimensionalized: energies in units of the
// molecular energy scale, time in units of the inverse oscillator frequency.
struct ModelParams {
    double epsilon{0.5}; // semiclassical parameter (hbar in these units)
    double alpha{0.05};  // system-bath coupling strength
    double g{0.5};       // electron-phonon coupling; surface 1 is centered at -sqrt(2) g
    double ebar0{0.0};   // renormalized energy offset of surface 1
    double beta{1.0};    // inverse temperature, may be +infinity

    // Throws std::invalid_argument on epsilon <= 0, beta <= 0, alpha < 0 or non-finite values.
    void validate() const;

    // alpha^2 / epsilon, the prefactor of every dissipative term.
    double dissipative_scale() const { return alpha * alpha / epsilon; }

    // Relaxation time epsilon / alpha^2 (diagnostic only, infinite when alpha = 0).
    double relaxation_time() const;

    // Non-empty when alpha^2 / epsilon >= 0.1, i.e. outside the weak-coupling regime.
    std::optional<std::string> weak_coupling_warning() const;

    bool operator==(const ModelParams&) const = default;
};

} // namespace ahsim
