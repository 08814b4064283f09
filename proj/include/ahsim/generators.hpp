// generators.hpp — Redfield and Lindblad superoperators, corrected Hamiltonian, hopping-rate matrices

#pragma once

#include <memory>
#include <string>

#include <Eigen/Dense>

#include "ahsim/basis.hpp"
#include "ahsim/bath.hpp"

namespace ahsim {

// Block view of a density operator on the 2 n_max space:
//   rho = [[rho0, rho01], [rho01^dagger, rho1]]
struct BlockDensity {
    Eigen::MatrixXcd rho0;
    Eigen::MatrixXcd rho1;
    Eigen::MatrixXcd rho01;

    std::size_t n_max() const noexcept { return static_cast<std::size_t>(rho0.rows()); }
    Eigen::MatrixXcd full() const;
    static BlockDensity from_full(const Eigen::MatrixXcd& rho);

    // Pure eigenprojector |phi_k^m, m><phi_k^m, m|.
    static BlockDensity eigenstate(std::size_t n_max, std::size_t k, int level);
    // Diagonal state with populations lambda (level 0) and theta (level 1).
    static BlockDensity diagonal(const Eigen::VectorXd& lambda, const Eigen::VectorXd& theta);
};

// Tabulate the bath coefficients on the omega range and Bohr-frequency shift of the basis.
CoeffSet tabulate_coeffs(const LadderBasis& basis, const DiscreteBath& bath);
CoeffSet tabulate_coeffs(const LadderBasis& basis, const WideBand& band);

enum class GeneratorKind { VonNeumann, Redfield, Lindblad };

// How apply() is evaluated.
//   Factored       O(n^3): Redfield through A_F = sum F D^dagger, A_G = sum G D^dagger;
//                  Lindblad through diagonal anticommutator/Lamb terms and banded jumps.
//   OmegaResolved  explicit double sum over (omega, omega'); reference path for small n_max.
//   Secular        omega-resolved with only omega = omega' kept.
enum class GeneratorRoute { Factored, OmegaResolved, Secular };

std::string to_string(GeneratorKind kind);
std::string to_string(GeneratorRoute route);

// Diagonal of the Lindbladian correction: H_s + alpha^2 * diag(shift0, shift1).
struct CorrectedHamiltonian {
    Eigen::VectorXd shift0; // sum_omega b_F(omega) fc[k][k+omega]^2
    Eigen::VectorXd shift1; // -sum_omega b_G(omega) fc[k-omega][k]^2
    double alpha2{0.0};

    // Diagonal of H_s + alpha^2 H_corr in the 2 n_max layout.
    Eigen::VectorXd total(const LadderBasis& basis) const;
};

CorrectedHamiltonian corrected_hamiltonian(const LadderBasis& basis, const CoeffSet& coeffs);

class Generator {
public:
    GeneratorKind kind() const noexcept { return kind_; }
    GeneratorRoute route() const noexcept { return route_; }
    const LadderBasis& basis() const noexcept { return *basis_; }
    const CoeffSet& coeffs() const noexcept { return coeffs_; }
    // alpha^2 / epsilon
    double scale() const noexcept { return scale_; }
    std::size_t dim() const noexcept { return basis_->dim(); }

    // d rho / dt. Linear in rho (Hermitian conjugate terms are extended linearly as
    // X(rho) + X(rho^dagger)^dagger), so it is valid on non-Hermitian inputs too.
    Eigen::MatrixXcd apply(const Eigen::MatrixXcd& rho) const;
    BlockDensity apply(const BlockDensity& rho) const;

    // apply(rho) minus the bare -(i/epsilon)[H_s, rho] part.
    Eigen::MatrixXcd dissipative(const Eigen::MatrixXcd& rho) const;

    // Lamb-shifted diagonal energies used by the Lindblad route (empty otherwise).
    const CorrectedHamiltonian& correction() const noexcept { return correction_; }

private:
    friend Generator build_von_neumann(const LadderBasis&);
    friend Generator build_redfield(const LadderBasis&, const CoeffSet&, GeneratorRoute);
    friend Generator build_lindblad(const LadderBasis&, const CoeffSet&);
    friend Generator secular_project(const Generator&);

    Generator() = default;

    Eigen::MatrixXcd commutator_part(const Eigen::MatrixXcd& rho, const Eigen::VectorXd& energies) const;
    Eigen::MatrixXcd redfield_factored(const Eigen::MatrixXcd& rho) const;
    Eigen::MatrixXcd omega_resolved(const Eigen::MatrixXcd& rho, bool secular) const;
    Eigen::MatrixXcd lindblad_dissipator(const Eigen::MatrixXcd& rho) const;
    void prepare_omega_resolved();

    GeneratorKind kind_{GeneratorKind::VonNeumann};
    GeneratorRoute route_{GeneratorRoute::Factored};
    std::shared_ptr<const LadderBasis> basis_;
    CoeffSet coeffs_;
    double scale_{0.0};
    Eigen::VectorXd h_; // H_s diagonal

    // Redfield factored data.
    Eigen::MatrixXcd d_, a_F_, a_G_, d_aF_, aG_d_;

    // Omega-resolved data: D(omega) for omega = -omega_max .. omega_max.
    std::vector<Eigen::MatrixXcd> d_omega_;

    // Lindblad data.
    CorrectedHamiltonian correction_;
    Eigen::VectorXd anti_;        // diagonal of sum a_F D D^dagger + a_G D^dagger D
    Eigen::VectorXd lamb_energies_; // H_s + alpha^2 H_corr diagonal
};

Generator build_von_neumann(const LadderBasis& basis);

// Full Redfield generator including every omega != omega' cross term. Throws
// std::invalid_argument when the coefficient table does not match the basis.
Generator build_redfield(const LadderBasis& basis, const CoeffSet& coeffs,
                         GeneratorRoute route = GeneratorRoute::Factored);

// GKLS generator with jump operators D^dagger(omega) (weight a_F) and D(omega) (weight a_G).
// Throws std::domain_error on a negative weight.
Generator build_lindblad(const LadderBasis& basis, const CoeffSet& coeffs);

// Drops all omega != omega' terms of a Redfield generator. The result is a Lindblad
// generator evaluated through the omega-resolved route.
Generator secular_project(const Generator& redfield);

// Dense superoperator: column j = vec(apply(E_j)), E_j the j-th matrix unit,
// vec column-major (index r + c * dim). Guard: n_max <= 16.
Eigen::MatrixXcd matricize(const Generator& gen);

// First-order hopping rates between eigenstates.
//   k01(i, f): |phi_i^0,0> -> |phi_f^1,1>,  (alpha^2/eps) a_F(f - i) fc(i, f)^2
//   k10(i, f): |phi_i^1,1> -> |phi_f^0,0>,  (alpha^2/eps) a_G(i - f) fc(f, i)^2
struct RateMatrix {
    Eigen::MatrixXd k01;
    Eigen::MatrixXd k10;

    std::size_t n_max() const noexcept { return static_cast<std::size_t>(k01.rows()); }
    double escape0(std::size_t i) const { return k01.row(static_cast<Eigen::Index>(i)).sum(); }
    double escape1(std::size_t i) const { return k10.row(static_cast<Eigen::Index>(i)).sum(); }

    // Right-hand side of the balance equations.
    void derivative(const Eigen::VectorXd& lambda, const Eigen::VectorXd& theta, Eigen::VectorXd& dlambda,
                    Eigen::VectorXd& dtheta) const;

    // Normalized stationary populations (lambda, theta) stacked into one vector of length 2 n_max.
    Eigen::VectorXd stationary() const;
};

RateMatrix build_rate_matrix(const LadderBasis& basis, const CoeffSet& coeffs);

} // namespace ahsim
