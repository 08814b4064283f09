// dynamics.hpp — Time propagation of block densities and of the classical rate equations

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ahsim/generators.hpp"
#include "ahsim/params.hpp"

namespace ahsim {

enum class IntegratorMethod { RK4, DormandPrince };

struct IntegratorConfig {
    IntegratorMethod method{IntegratorMethod::RK4};
    double dt{0.0};          // RK4 step, initial step for the adaptive pair; 0 selects default_dt
    double tolerance{1e-10}; // adaptive: absolute and relative per-entry tolerance
    double t_end{1.0};
    std::size_t stride{1};   // record every stride-th accepted step (the final state is always recorded)
    bool keep_states{true};  // store full BlockDensity snapshots in the trajectory

    void validate() const;
    bool operator==(const IntegratorConfig&) const = default;
};

// min(0.01, 0.05 (epsilon / alpha^2) / 1000); 0.01 when alpha = 0.
double default_dt(const ModelParams& params);

struct Observables {
    double time{0.0};
    double trace{0.0};
    double trace0{0.0};
    double trace1{0.0};
    Eigen::VectorXd lambda;       // diagonal of rho0
    Eigen::VectorXd theta;        // diagonal of rho1
    double coherence{0.0};        // ||rho01||_F
    double block_offdiag{0.0};    // max |entry| off the diagonal inside rho0 and rho1
    double min_eigenvalue{0.0};   // of the full 2 n_max Hermitian matrix
    double hermiticity{0.0};      // ||rho - rho^dagger||_F
};

Observables observables(const BlockDensity& rho, double time = 0.0);
Observables observables(const Eigen::MatrixXcd& rho, double time = 0.0);

struct Trajectory {
    std::vector<double> times;
    std::vector<BlockDensity> states; // empty when keep_states = false
    std::vector<Observables> records;

    double max_trace_drift{0.0};        // max |Tr rho(t) - Tr rho(0)| over every step
    double max_hermiticity{0.0};        // max ||rho - rho^dagger||_F before re-symmetrization
    double min_eigenvalue{0.0};         // over recorded states
    double max_coherence{0.0};          // max ||rho01||_F over every step
    double max_block_offdiag{0.0};      // over every step
    std::size_t accepted_steps{0};
    std::size_t rejected_steps{0};
};

// Thrown when the state becomes non-finite. Carries the last finite state.
class PropagationError : public std::runtime_error {
public:
    PropagationError(const std::string& what, double time, BlockDensity last_good)
        : std::runtime_error(what), time_(time), last_good_(std::move(last_good)) {}
    double time() const noexcept { return time_; }
    const BlockDensity& last_good() const noexcept { return last_good_; }

private:
    double time_;
    BlockDensity last_good_;
};

// Integrates d rho/dt = gen.apply(rho). After every step rho <- (rho + rho^dagger) / 2;
// the Hermiticity residual is measured before that. No positivity projection.
Trajectory propagate(const Generator& gen, const BlockDensity& rho_init, const IntegratorConfig& cfg);

struct RateTrajectory {
    std::vector<double> times;
    std::vector<Eigen::VectorXd> lambda;
    std::vector<Eigen::VectorXd> theta;
    double max_probability_drift{0.0};
};

// RK4 on the balance equations of the rate matrix. Aborts (std::runtime_error) on a
// population below -1e-10. cfg.method is ignored; cfg.dt = 0 selects 0.01.
RateTrajectory propagate_rates(const RateMatrix& rates, const Eigen::VectorXd& lambda0, const Eigen::VectorXd& theta0,
                               const IntegratorConfig& cfg);

} // namespace ahsim
