// basis.hpp — Truncated two-ladder eigenbasis, Franck-Condon overlaps and D(omega)

#pragma once

#include <cstddef>

#include <Eigen/Dense>

#include "ahsim/params.hpp"

namespace ahsim {

// Overlap <phi_n^0 | phi_m^1> between eigenstates of the two displaced oscillators,
// evaluated from the Laguerre closed form in log space. Throws std::overflow_error
// when the result is not finite and std::invalid_argument on negative indices.
double franck_condon(const ModelParams& params, int n, int m);

// Generalized Laguerre polynomial L_n^(a)(x) by the ascending three-term recurrence.
double laguerre(int n, double a, double x);

// Eigenbasis of H_s truncated to n_max oscillator levels per electronic state.
//
// Index layout of the 2 n_max dimensional space:
//   k           -> |phi_k^0, 0>   (k = 0 .. n_max-1)
//   n_max + k   -> |phi_k^1, 1>
class LadderBasis {
public:
    LadderBasis(const ModelParams& params, std::size_t n_max);

    std::size_t n_max() const noexcept { return n_max_; }
    std::size_t dim() const noexcept { return 2 * n_max_; }
    const ModelParams& params() const noexcept { return params_; }

    // fc(n, m) = <phi_n^0 | phi_m^1>
    const Eigen::MatrixXd& fc() const noexcept { return fc_; }
    const Eigen::VectorXd& energies0() const noexcept { return energies0_; }
    const Eigen::VectorXd& energies1() const noexcept { return energies1_; }

    std::size_t index0(std::size_t k) const noexcept { return k; }
    std::size_t index1(std::size_t k) const noexcept { return n_max_ + k; }

    // Diagonal of H_s in the eigenbasis (length 2 n_max).
    Eigen::VectorXd hamiltonian_diagonal() const;
    Eigen::MatrixXd hamiltonian() const;

    // Electron annihilation operator d restricted to the truncated basis.
    Eigen::MatrixXd annihilation() const;

    // D(omega): sends |phi_{k+omega}^1, 1> to fc(k, k+omega) |phi_k^0, 0>.
    // Out-of-range omega yields the zero operator.
    Eigen::MatrixXd d_operator(int omega) const;

    // Largest |omega| with a nonzero D(omega) in the truncated basis.
    int omega_max() const noexcept { return static_cast<int>(n_max_) - 1; }

    // Energy gap of every D(omega) transition: epsilon * omega + ebar0.
    double transition_energy(int omega) const noexcept {
        return params_.epsilon * omega + params_.ebar0;
    }

private:
    ModelParams params_;
    std::size_t n_max_;
    Eigen::MatrixXd fc_;
    Eigen::VectorXd energies0_;
    Eigen::VectorXd energies1_;
};

// Same as constructing LadderBasis; rejects n_max < 2.
LadderBasis build_basis(const ModelParams& params, std::size_t n_max = 40);

// || [H_s, D(omega)] + epsilon omega D(omega) ||_F. Zero for ebar0 = 0;
// equals ebar0 * ||D(omega)||_F otherwise.
double commutator_check(const LadderBasis& basis, int omega);

} // namespace ahsim
