// semiclassical.hpp — Wigner projectors, phase-space hopping fields and the CME / LCME solvers
//
// Fields are Eigen::MatrixXd of shape (nx, np) sampled at cell centres; Hamiltonians used
// by the transport step live on the (nx + 1, np + 1) cell corners.

#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "ahsim/basis.hpp"
#include "ahsim/bath.hpp"

namespace ahsim {

struct PhaseGrid {
    double x_min{-4.0}, x_max{4.0};
    double p_min{-4.0}, p_max{4.0};
    std::size_t nx{128}, np{128};

    void validate() const; // ordered bounds, nx, np >= 16
    double dx() const noexcept { return (x_max - x_min) / static_cast<double>(nx); }
    double dp() const noexcept { return (p_max - p_min) / static_cast<double>(np); }
    double cell_area() const noexcept { return dx() * dp(); }
    double x(std::size_t i) const noexcept { return x_min + (static_cast<double>(i) + 0.5) * dx(); }
    double p(std::size_t j) const noexcept { return p_min + (static_cast<double>(j) + 0.5) * dp(); }
    double x_corner(std::size_t i) const noexcept { return x_min + static_cast<double>(i) * dx(); }
    double p_corner(std::size_t j) const noexcept { return p_min + static_cast<double>(j) * dp(); }
    Eigen::VectorXd x_centers() const;
    Eigen::VectorXd p_centers() const;
    Eigen::VectorXd x_corners() const;
    Eigen::VectorXd p_corners() const;

    bool operator==(const PhaseGrid&) const = default;
};

// Centre of the oscillator on electronic surface m: 0 for m = 0, -sqrt(2) g for m = 1.
double surface_center(const ModelParams& params, int level);

// Sizing rule: spacing <= sqrt(eps)/2 in both directions, and the box extends at least
// 6 sqrt(eps) beyond the turning radius sqrt(eps (2k+1)) around both surface centres.
// Throws std::invalid_argument naming the violated bound.
void check_grid(const PhaseGrid& grid, const ModelParams& params, int k_max);

// Quadrature of a cell-centred field: sum * dx * dp.
double integrate(const PhaseGrid& grid, const Eigen::MatrixXd& field);

// W_k^m(x, p) = (1 / 2 pi eps) (|phi_k^m><phi_k^m|)_W for k = 0 .. count - 1 on arbitrary
// tensor-product points, by trapezoid quadrature of the defining y-integral with step
// sqrt(eps)/20 over |y| <= 2 (sqrt(2k+1) + 6) sqrt(eps).
std::vector<Eigen::MatrixXd> wigner_table(const ModelParams& params, int level, int count, const Eigen::VectorXd& xs,
                                          const Eigen::VectorXd& ps);

// W_k^m on the cell centres; enforces check_grid for k.
Eigen::MatrixXd wigner_projector(const LadderBasis& basis, int k, int level, const PhaseGrid& grid);

// Closed form ((-1)^k / pi eps) exp(-r^2/eps) L_k(2 r^2/eps), r measured from the surface centre.
double wigner_closed_form(const ModelParams& params, int k, int level, double x, double p);

struct PhaseField {
    PhaseGrid grid;
    Eigen::MatrixXd rho0;
    Eigen::MatrixXd rho1;

    double mass0() const { return integrate(grid, rho0); }
    double mass1() const { return integrate(grid, rho1); }
    double mass() const { return mass0() + mass1(); }

    // Wigner function of the eigenprojector |phi_k^m, m><phi_k^m, m|.
    static PhaseField eigenstate(const LadderBasis& basis, int k, int level, const PhaseGrid& grid);
    // Weighted eigenprojectors (populations lambda on level 0, theta on level 1).
    static PhaseField populations(const LadderBasis& basis, const Eigen::VectorXd& lambda,
                                  const Eigen::VectorXd& theta, const PhaseGrid& grid);
};

enum class RateVariant { Full, WidebandHeuristic, LcmeEigenstate };
std::string to_string(RateVariant v);
RateVariant rate_variant_from_string(const std::string& s);

struct RateField {
    Eigen::MatrixXd gamma01;
    Eigen::MatrixXd gamma10;
    RateVariant variant{RateVariant::WidebandHeuristic};
    double clamped{0.0};          // largest negative value set to zero (lcme variant)
    double truncation_defect{0.0}; // lcme variant, see lcme_rate_fields
    std::optional<std::string> warning;
};

using BathModel = std::variant<DiscreteBath, WideBand>;

// U(x) = sqrt(2) g x + g^2 + ebar0
double energy_gap(const ModelParams& params, double x);

// CME hopping fields.
//   WidebandHeuristic: (alpha^2/eps) a_F(U(x)), (alpha^2/eps) a_G(U(x)); for a wide band this is
//                      Gamma f(U) and Gamma (1 - f(U)).
//   Full:              the tau-integral of sec^2(s/2) exp(-(2i/eps) U tan(s/2)) against the bath,
//                      expanded into its discrete Fourier comb (see README). Throws
//                      std::runtime_error when the comb series does not settle.
RateField cme_rates(const BathModel& bath, const ModelParams& params, const PhaseGrid& grid, RateVariant variant);

// Fourier-comb weights of the full CME kernel: energies sign(U) eps m, m = 1 .. count.
std::vector<double> cme_comb_weights(double kappa, int count);

struct Taper {
    int k_on{-1};  // last k with weight 1 is k_on - 1; default n_max / 2
    int k_off{-1}; // first k with weight 0; default 3 n_max / 4
    double weight(int k) const;
};

struct LcmeFields {
    RateField rates;
    Eigen::MatrixXd h0_corr; // script-H_0 on the corners
    Eigen::MatrixXd h1_corr; // script-H_1 on the corners
    Taper taper;
};

// Eigenstate-resolved LCME fields
//   gamma01 = (alpha^2/eps) 2 pi eps sum_k tau_k r_k W_k^0,  r_k = sum_w a_F(w) fc[k][k+w]^2
//   gamma10 = (alpha^2/eps) 2 pi eps sum_k tau_k s_k W_k^1,  s_k = sum_w a_G(w) fc[k-w][k]^2
// with a smooth cosine taper tau_k between k_on and k_off (the bare truncated sum of Wigner
// functions does not converge pointwise). truncation_defect is the mean of
// |1 - 2 pi eps sum_k tau_k W_k^0| over cells inside the fully weighted disc; a warning is
// attached when it exceeds 1e-3. Negative values are clamped to zero and reported.
LcmeFields lcme_rate_fields(const LadderBasis& basis, const CoeffSet& coeffs, const PhaseGrid& grid,
                            Taper taper = {});

struct TransportConfig {
    double t_end{1.0};
    double dt{0.0};       // 0 = largest step allowed by cfl
    double cfl{0.5};
    std::size_t stride{0}; // snapshot every stride steps (0 = none)
    bool transport{true};
    bool hopping{true};

    void validate() const;
    bool operator==(const TransportConfig&) const = default;
};

struct PhaseTrajectory {
    std::vector<double> times;
    std::vector<double> mass0;
    std::vector<double> mass1;
    std::vector<PhaseField> snapshots;
    PhaseField final_state;
    double max_mass_drift{0.0}; // max_t |mass(t) - mass(0)|
    double dt{0.0};
    std::size_t steps{0};
};

// Corner samples of H0 = p^2/2 + x^2/2 and H1 = p^2/2 + (x + sqrt(2) g)^2/2 + ebar0.
Eigen::MatrixXd corner_hamiltonian(const ModelParams& params, int level, const PhaseGrid& grid);

// Conservative finite-volume transport d rho/dt = {H, rho} (MUSCL, MC limiter, SSP-RK3;
// face velocities differenced from corner H so the discrete flow is divergence free),
// Strang-split with exact pointwise two-state exchange at rates gamma01 / gamma10.
// Throws std::invalid_argument on a CFL violation and std::runtime_error when the
// total mass drifts by more than 1e-4.
PhaseTrajectory solve_transport_hopping(const Eigen::MatrixXd& h0_corners, const Eigen::MatrixXd& h1_corners,
                                        const RateField& rates, const PhaseField& init, const TransportConfig& cfg);

PhaseTrajectory solve_cme(const RateField& rates, const ModelParams& params, const PhaseField& init,
                          const TransportConfig& cfg);

// Transport under H0 + alpha^2 script-H_0 and H1 - alpha^2 script-H_1.
PhaseTrajectory solve_lcme(const LcmeFields& fields, const ModelParams& params, const PhaseField& init,
                           const TransportConfig& cfg);

} // namespace ahsim
