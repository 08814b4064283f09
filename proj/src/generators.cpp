// generators.cpp — Redfield / Lindblad superoperators and rate matrices

#include "ahsim/generators.hpp"

#include <complex>
#include <sstream>
#include <stdexcept>

namespace ahsim {

using cd = std::complex<double>;

Eigen::MatrixXcd BlockDensity::full() const {
    const auto n = rho0.rows();
    if (rho1.rows() != n || rho01.rows() != n || rho0.cols() != n || rho1.cols() != n || rho01.cols() != n)
        throw std::invalid_argument("BlockDensity: inconsistent block sizes");
    Eigen::MatrixXcd out(2 * n, 2 * n);
    out.topLeftCorner(n, n) = rho0;
    out.topRightCorner(n, n) = rho01;
    out.bottomLeftCorner(n, n) = rho01.adjoint();
    out.bottomRightCorner(n, n) = rho1;
    return out;
}

BlockDensity BlockDensity::from_full(const Eigen::MatrixXcd& rho) {
    if (rho.rows() != rho.cols() || rho.rows() % 2 != 0)
        throw std::invalid_argument("BlockDensity: full matrix must be square with even dimension");
    const auto n = rho.rows() / 2;
    return {rho.topLeftCorner(n, n), rho.bottomRightCorner(n, n), rho.topRightCorner(n, n)};
}

BlockDensity BlockDensity::eigenstate(std::size_t n_max, std::size_t k, int level) {
    if (k >= n_max) throw std::invalid_argument("BlockDensity::eigenstate: k >= n_max");
    if (level != 0 && level != 1) throw std::invalid_argument("BlockDensity::eigenstate: level must be 0 or 1");
    const auto n = static_cast<Eigen::Index>(n_max);
    BlockDensity b{Eigen::MatrixXcd::Zero(n, n), Eigen::MatrixXcd::Zero(n, n), Eigen::MatrixXcd::Zero(n, n)};
    (level == 0 ? b.rho0 : b.rho1)(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) = 1.0;
    return b;
}

BlockDensity BlockDensity::diagonal(const Eigen::VectorXd& lambda, const Eigen::VectorXd& theta) {
    if (lambda.size() != theta.size()) throw std::invalid_argument("BlockDensity::diagonal: size mismatch");
    const auto n = lambda.size();
    BlockDensity b{Eigen::MatrixXcd::Zero(n, n), Eigen::MatrixXcd::Zero(n, n), Eigen::MatrixXcd::Zero(n, n)};
    b.rho0.diagonal() = lambda.cast<cd>();
    b.rho1.diagonal() = theta.cast<cd>();
    return b;
}

CoeffSet tabulate_coeffs(const LadderBasis& basis, const DiscreteBath& bath) {
    return coeffs_discrete(bath, basis.params().epsilon, basis.omega_max(), basis.params().ebar0);
}

CoeffSet tabulate_coeffs(const LadderBasis& basis, const WideBand& band) {
    return coeffs_wideband(band, basis.params().epsilon, basis.omega_max(), basis.params().ebar0);
}

std::string to_string(GeneratorKind kind) {
    switch (kind) {
    case GeneratorKind::VonNeumann: return "von_neumann";
    case GeneratorKind::Redfield: return "redfield";
    case GeneratorKind::Lindblad: return "lindblad";
    }
    return "unknown";
}

std::string to_string(GeneratorRoute route) {
    switch (route) {
    case GeneratorRoute::Factored: return "factored";
    case GeneratorRoute::OmegaResolved: return "omega_resolved";
    case GeneratorRoute::Secular: return "secular";
    }
    return "unknown";
}

namespace {

void check_match(const LadderBasis& basis, const CoeffSet& coeffs) {
    const auto& p = basis.params();
    std::ostringstream os;
    if (coeffs.omega_max() < basis.omega_max())
        os << "coefficients tabulated up to |omega| = " << coeffs.omega_max() << " but the basis needs "
           << basis.omega_max();
    else if (std::abs(coeffs.epsilon() - p.epsilon) > 1e-14 * p.epsilon)
        os << "coefficients tabulated at epsilon = " << coeffs.epsilon() << ", basis has " << p.epsilon;
    else if (std::abs(coeffs.shift() - p.ebar0) > 1e-14 * (1.0 + std::abs(p.ebar0)))
        os << "coefficients tabulated with shift " << coeffs.shift() << ", basis has ebar0 = " << p.ebar0;
    if (!os.str().empty()) throw std::invalid_argument("generator dimension mismatch: " + os.str());
}

} // namespace

Eigen::VectorXd CorrectedHamiltonian::total(const LadderBasis& basis) const {
    Eigen::VectorXd h = basis.hamiltonian_diagonal();
    const auto n = static_cast<Eigen::Index>(basis.n_max());
    h.head(n) += alpha2 * shift0;
    h.tail(n) += alpha2 * shift1;
    return h;
}

CorrectedHamiltonian corrected_hamiltonian(const LadderBasis& basis, const CoeffSet& coeffs) {
    check_match(basis, coeffs);
    const int n = static_cast<int>(basis.n_max());
    const auto& fc = basis.fc();
    CorrectedHamiltonian c;
    c.alpha2 = basis.params().alpha * basis.params().alpha;
    c.shift0 = Eigen::VectorXd::Zero(n);
    c.shift1 = Eigen::VectorXd::Zero(n);
    for (int k = 0; k < n; ++k)
        for (int m = 0; m < n; ++m) {
            const double w = fc(k, m) * fc(k, m);
            c.shift0[k] += coeffs.b_F(m - k) * w; // omega = m - k from level 0 state k
            c.shift1[m] -= coeffs.b_G(m - k) * w; // omega = m - k into level 1 state m
        }
    return c;
}

Eigen::MatrixXcd Generator::commutator_part(const Eigen::MatrixXcd& rho, const Eigen::VectorXd& energies) const {
    const double inv_eps = 1.0 / basis_->params().epsilon;
    Eigen::MatrixXcd out(rho.rows(), rho.cols());
    for (Eigen::Index c = 0; c < rho.cols(); ++c)
        for (Eigen::Index r = 0; r < rho.rows(); ++r)
            out(r, c) = cd(0.0, -inv_eps * (energies[r] - energies[c])) * rho(r, c);
    return out;
}

Eigen::MatrixXcd Generator::redfield_factored(const Eigen::MatrixXcd& rho) const {
    // X(rho) = d A_F rho - A_F rho d + rho A_G d - d rho A_G
    const Eigen::MatrixXcd x = d_aF_ * rho - a_F_ * rho * d_ + rho * aG_d_ - d_ * rho * a_G_;
    // X(rho^dagger)^dagger
    const Eigen::MatrixXcd xh = rho * d_aF_.adjoint() - d_.adjoint() * rho * a_F_.adjoint() +
                                aG_d_.adjoint() * rho - a_G_.adjoint() * rho * d_.adjoint();
    return -scale_ * (x + xh);
}

Eigen::MatrixXcd Generator::omega_resolved(const Eigen::MatrixXcd& rho, bool secular) const {
    const int wmax = basis_->omega_max();
    const auto dim = static_cast<Eigen::Index>(this->dim());
    Eigen::MatrixXcd x = Eigen::MatrixXcd::Zero(dim, dim);
    for (int w = -wmax; w <= wmax; ++w) {
        const cd F = coeffs_.F(w);
        const cd G = coeffs_.G(w);
        const Eigen::MatrixXcd& Dw = d_omega_[static_cast<std::size_t>(w + wmax)];
        const Eigen::MatrixXcd Ddag = Dw.adjoint();
        for (int wp = -wmax; wp <= wmax; ++wp) {
            if (secular && wp != w) continue;
            const Eigen::MatrixXcd& Dwp = d_omega_[static_cast<std::size_t>(wp + wmax)];
            x += F * (Dwp * Ddag * rho - Ddag * rho * Dwp);
            x += G * (rho * Ddag * Dwp - Dwp * rho * Ddag);
        }
    }
    // Linear extension of "+ h.c.": X(rho) + X(rho^dagger)^dagger.
    Eigen::MatrixXcd xh = Eigen::MatrixXcd::Zero(dim, dim);
    const Eigen::MatrixXcd rd = rho.adjoint();
    for (int w = -wmax; w <= wmax; ++w) {
        const cd F = coeffs_.F(w);
        const cd G = coeffs_.G(w);
        const Eigen::MatrixXcd& Dw = d_omega_[static_cast<std::size_t>(w + wmax)];
        const Eigen::MatrixXcd Ddag = Dw.adjoint();
        for (int wp = -wmax; wp <= wmax; ++wp) {
            if (secular && wp != w) continue;
            const Eigen::MatrixXcd& Dwp = d_omega_[static_cast<std::size_t>(wp + wmax)];
            xh += F * (Dwp * Ddag * rd - Ddag * rd * Dwp);
            xh += G * (rd * Ddag * Dwp - Dwp * rd * Ddag);
        }
    }
    return -scale_ * (x + xh.adjoint());
}

Eigen::MatrixXcd Generator::lindblad_dissipator(const Eigen::MatrixXcd& rho) const {
    const int n = static_cast<int>(basis_->n_max());
    const auto& fc = basis_->fc();
    const auto dim = rho.rows();
    Eigen::MatrixXcd out(dim, dim);
    for (Eigen::Index c = 0; c < dim; ++c)
        for (Eigen::Index r = 0; r < dim; ++r)
            out(r, c) = -0.5 * (anti_[r] + anti_[c]) * rho(r, c);

    // a_F D^dagger(omega) rho D(omega): block 00 -> block 11
    // a_G D(omega) rho D^dagger(omega): block 11 -> block 00
    for (int w = -(n - 1); w <= n - 1; ++w) {
        const double aF = coeffs_.a_F(w);
        const double aG = coeffs_.a_G(w);
        const int lo = std::max(0, -w);
        const int hi = std::min(n, n - w); // k in [lo, hi) has k + w in range
        for (int l = lo; l < hi; ++l) {
            const double fl = fc(l, l + w);
            for (int k = lo; k < hi; ++k) {
                const double fk = fc(k, k + w);
                out(n + k + w, n + l + w) += aF * fk * fl * rho(k, l);
                out(k, l) += aG * fk * fl * rho(n + k + w, n + l + w);
            }
        }
    }
    return scale_ * out;
}

Eigen::MatrixXcd Generator::apply(const Eigen::MatrixXcd& rho) const {
    const auto dim = static_cast<Eigen::Index>(this->dim());
    if (rho.rows() != dim || rho.cols() != dim) {
        std::ostringstream os;
        os << "Generator::apply: expected " << dim << "x" << dim << " density, got " << rho.rows() << "x"
           << rho.cols();
        throw std::invalid_argument(os.str());
    }
    switch (kind_) {
    case GeneratorKind::VonNeumann: return commutator_part(rho, h_);
    case GeneratorKind::Redfield:
        if (route_ == GeneratorRoute::Factored) return commutator_part(rho, h_) + redfield_factored(rho);
        return commutator_part(rho, h_) + omega_resolved(rho, false);
    case GeneratorKind::Lindblad:
        if (route_ == GeneratorRoute::Secular) return commutator_part(rho, h_) + omega_resolved(rho, true);
        return commutator_part(rho, lamb_energies_) + lindblad_dissipator(rho);
    }
    throw std::logic_error("Generator::apply: unknown kind");
}

BlockDensity Generator::apply(const BlockDensity& rho) const { return BlockDensity::from_full(apply(rho.full())); }

Eigen::MatrixXcd Generator::dissipative(const Eigen::MatrixXcd& rho) const {
    return apply(rho) - commutator_part(rho, h_);
}

void Generator::prepare_omega_resolved() {
    const int wmax = basis_->omega_max();
    d_omega_.clear();
    d_omega_.reserve(static_cast<std::size_t>(2 * wmax + 1));
    for (int w = -wmax; w <= wmax; ++w) d_omega_.push_back(basis_->d_operator(w).cast<cd>());
}

Generator build_von_neumann(const LadderBasis& basis) {
    Generator g;
    g.kind_ = GeneratorKind::VonNeumann;
    g.basis_ = std::make_shared<const LadderBasis>(basis);
    g.h_ = basis.hamiltonian_diagonal();
    return g;
}

Generator build_redfield(const LadderBasis& basis, const CoeffSet& coeffs, GeneratorRoute route) {
    check_match(basis, coeffs);
    if (route == GeneratorRoute::Secular)
        throw std::invalid_argument("build_redfield: use secular_project for the secular route");
    Generator g;
    g.kind_ = GeneratorKind::Redfield;
    g.route_ = route;
    g.basis_ = std::make_shared<const LadderBasis>(basis);
    g.coeffs_ = coeffs;
    g.scale_ = basis.params().dissipative_scale();
    g.h_ = basis.hamiltonian_diagonal();

    if (route == GeneratorRoute::OmegaResolved) {
        g.prepare_omega_resolved();
        return g;
    }
    const auto dim = static_cast<Eigen::Index>(basis.dim());
    g.d_ = basis.annihilation().cast<cd>();
    g.a_F_ = Eigen::MatrixXcd::Zero(dim, dim);
    g.a_G_ = Eigen::MatrixXcd::Zero(dim, dim);
    // D^dagger(omega) has entries (n + k + omega, k) = fc(k, k + omega); omega = m - k.
    const int n = static_cast<int>(basis.n_max());
    const auto& fc = basis.fc();
    for (int k = 0; k < n; ++k)
        for (int m = 0; m < n; ++m) {
            g.a_F_(n + m, k) = coeffs.F(m - k) * fc(k, m);
            g.a_G_(n + m, k) = coeffs.G(m - k) * fc(k, m);
        }
    g.d_aF_ = g.d_ * g.a_F_;
    g.aG_d_ = g.a_G_ * g.d_;
    return g;
}

Generator build_lindblad(const LadderBasis& basis, const CoeffSet& coeffs) {
    check_match(basis, coeffs);
    const int n = static_cast<int>(basis.n_max());
    for (int w = -(n - 1); w <= n - 1; ++w)
        if (coeffs.a_F(w) < 0.0 || coeffs.a_G(w) < 0.0) {
            std::ostringstream os;
            os << "build_lindblad: negative jump weight at omega = " << w << " (a_F = " << coeffs.a_F(w)
               << ", a_G = " << coeffs.a_G(w) << "); the bath coefficients are broken";
            throw std::domain_error(os.str());
        }

    Generator g;
    g.kind_ = GeneratorKind::Lindblad;
    g.route_ = GeneratorRoute::Factored;
    g.basis_ = std::make_shared<const LadderBasis>(basis);
    g.coeffs_ = coeffs;
    g.scale_ = basis.params().dissipative_scale();
    g.h_ = basis.hamiltonian_diagonal();
    g.correction_ = corrected_hamiltonian(basis, coeffs);
    g.lamb_energies_ = g.correction_.total(basis);

    const auto& fc = basis.fc();
    g.anti_ = Eigen::VectorXd::Zero(2 * n);
    for (int k = 0; k < n; ++k)
        for (int m = 0; m < n; ++m) {
            const double w = fc(k, m) * fc(k, m);
            g.anti_[k] += coeffs.a_F(m - k) * w;     // D D^dagger on |phi_k^0, 0>
            g.anti_[n + m] += coeffs.a_G(m - k) * w; // D^dagger D on |phi_m^1, 1>
        }
    return g;
}

Generator secular_project(const Generator& redfield) {
    if (redfield.kind() != GeneratorKind::Redfield)
        throw std::invalid_argument("secular_project: input must be a Redfield generator");
    Generator g;
    g.kind_ = GeneratorKind::Lindblad;
    g.route_ = GeneratorRoute::Secular;
    g.basis_ = redfield.basis_;
    g.coeffs_ = redfield.coeffs_;
    g.scale_ = redfield.scale_;
    g.h_ = redfield.h_;
    g.correction_ = corrected_hamiltonian(*g.basis_, g.coeffs_);
    g.d_omega_ = redfield.d_omega_;
    if (g.d_omega_.empty()) g.prepare_omega_resolved();
    return g;
}

Eigen::MatrixXcd matricize(const Generator& gen) {
    if (gen.basis().n_max() > 16)
        throw std::invalid_argument("matricize: n_max > 16 would need more than (2 n_max)^4 dense entries allowed");
    const auto dim = static_cast<Eigen::Index>(gen.dim());
    Eigen::MatrixXcd M(dim * dim, dim * dim);
    Eigen::MatrixXcd unit = Eigen::MatrixXcd::Zero(dim, dim);
    for (Eigen::Index c = 0; c < dim; ++c)
        for (Eigen::Index r = 0; r < dim; ++r) {
            unit(r, c) = 1.0;
            const Eigen::MatrixXcd out = gen.apply(unit);
            M.col(r + c * dim) = Eigen::Map<const Eigen::VectorXcd>(out.data(), dim * dim);
            unit(r, c) = 0.0;
        }
    return M;
}

void RateMatrix::derivative(const Eigen::VectorXd& lambda, const Eigen::VectorXd& theta, Eigen::VectorXd& dlambda,
                            Eigen::VectorXd& dtheta) const {
    const Eigen::VectorXd out0 = k01.rowwise().sum();
    const Eigen::VectorXd out1 = k10.rowwise().sum();
    dlambda = -lambda.cwiseProduct(out0) + k10.transpose() * theta;
    dtheta = k01.transpose() * lambda - theta.cwiseProduct(out1);
}

Eigen::VectorXd RateMatrix::stationary() const {
    const auto n = k01.rows();
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    for (Eigen::Index f = 0; f < n; ++f) {
        M(f, f) = -k01.row(f).sum();
        M(n + f, n + f) = -k10.row(f).sum();
        for (Eigen::Index i = 0; i < n; ++i) {
            M(f, n + i) += k10(i, f);
            M(n + f, i) += k01(i, f);
        }
    }
    M.row(2 * n - 1).setOnes();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(2 * n);
    rhs[2 * n - 1] = 1.0;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
    if (!lu.isInvertible()) throw std::runtime_error("RateMatrix::stationary: stationary state is not unique");
    return lu.solve(rhs);
}

RateMatrix build_rate_matrix(const LadderBasis& basis, const CoeffSet& coeffs) {
    check_match(basis, coeffs);
    const auto n = static_cast<Eigen::Index>(basis.n_max());
    const double s = basis.params().dissipative_scale();
    const auto& fc = basis.fc();
    RateMatrix r{Eigen::MatrixXd::Zero(n, n), Eigen::MatrixXd::Zero(n, n)};
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index f = 0; f < n; ++f) {
            r.k01(i, f) = s * coeffs.a_F(static_cast<int>(f - i)) * fc(i, f) * fc(i, f);
            r.k10(i, f) = s * coeffs.a_G(static_cast<int>(i - f)) * fc(f, i) * fc(f, i);
        }
    return r;
}

} // namespace ahsim
