// semiclassical.cpp — Wigner tables, CME/LCME hopping fields, finite-volume transport

#include "ahsim/semiclassical.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace ahsim {

namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

} // namespace

void PhaseGrid::validate() const {
    if (!(x_max > x_min)) throw std::invalid_argument("PhaseGrid: x_max must exceed x_min");
    if (!(p_max > p_min)) throw std::invalid_argument("PhaseGrid: p_max must exceed p_min");
    if (nx < 16 || np < 16) throw std::invalid_argument("PhaseGrid: nx and np must be >= 16");
}

Eigen::VectorXd PhaseGrid::x_centers() const {
    Eigen::VectorXd v(static_cast<Eigen::Index>(nx));
    for (std::size_t i = 0; i < nx; ++i) v[static_cast<Eigen::Index>(i)] = x(i);
    return v;
}

Eigen::VectorXd PhaseGrid::p_centers() const {
    Eigen::VectorXd v(static_cast<Eigen::Index>(np));
    for (std::size_t j = 0; j < np; ++j) v[static_cast<Eigen::Index>(j)] = p(j);
    return v;
}

Eigen::VectorXd PhaseGrid::x_corners() const {
    Eigen::VectorXd v(static_cast<Eigen::Index>(nx + 1));
    for (std::size_t i = 0; i <= nx; ++i) v[static_cast<Eigen::Index>(i)] = x_corner(i);
    return v;
}

Eigen::VectorXd PhaseGrid::p_corners() const {
    Eigen::VectorXd v(static_cast<Eigen::Index>(np + 1));
    for (std::size_t j = 0; j <= np; ++j) v[static_cast<Eigen::Index>(j)] = p_corner(j);
    return v;
}

double surface_center(const ModelParams& params, int level) {
    if (level == 0) return 0.0;
    if (level == 1) return -std::numbers::sqrt2 * params.g;
    throw std::invalid_argument("surface_center: level must be 0 or 1");
}

void check_grid(const PhaseGrid& grid, const ModelParams& params, int k_max) {
    grid.validate();
    if (k_max < 0) throw std::invalid_argument("check_grid: k_max must be >= 0");
    const double se = std::sqrt(params.epsilon);
    if (grid.dx() > 0.5 * se + 1e-15)
        throw std::invalid_argument("grid.nx: spacing dx = " + fmt(grid.dx()) + " exceeds sqrt(eps)/2 = " +
                                    fmt(0.5 * se));
    if (grid.dp() > 0.5 * se + 1e-15)
        throw std::invalid_argument("grid.np: spacing dp = " + fmt(grid.dp()) + " exceeds sqrt(eps)/2 = " +
                                    fmt(0.5 * se));
    const double R = std::sqrt(params.epsilon * (2.0 * k_max + 1.0)) + 6.0 * se;
    const double c0 = surface_center(params, 0), c1 = surface_center(params, 1);
    const double need_lo = std::min(c0, c1) - R, need_hi = std::max(c0, c1) + R;
    auto fail = [&](const std::string& key, double have, double need) {
        throw std::invalid_argument("grid." + key + " = " + fmt(have) + " does not cover " + fmt(need) +
                                    " (turning radius of k = " + std::to_string(k_max) + " plus 6 sqrt(eps))");
    };
    if (grid.x_min > need_lo) fail("x_min", grid.x_min, need_lo);
    if (grid.x_max < need_hi) fail("x_max", grid.x_max, need_hi);
    if (grid.p_min > -R) fail("p_min", grid.p_min, -R);
    if (grid.p_max < R) fail("p_max", grid.p_max, R);
}

double integrate(const PhaseGrid& grid, const Eigen::MatrixXd& field) { return field.sum() * grid.cell_area(); }

std::vector<Eigen::MatrixXd> wigner_table(const ModelParams& params, int level, int count, const Eigen::VectorXd& xs,
                                          const Eigen::VectorXd& ps) {
    params.validate();
    if (count < 1) throw std::invalid_argument("wigner_table: count must be >= 1");
    const double eps = params.epsilon;
    const double se = std::sqrt(eps);
    const double c = surface_center(params, level);
    const double h = se / 20.0;
    const double Y = 2.0 * (std::sqrt(2.0 * (count - 1) + 1.0) + 6.0) * se;
    const auto J = static_cast<Eigen::Index>(std::ceil(Y / h));
    const auto nx = xs.size(), np = ps.size();

    // Symmetric trapezoid: integrand is even in y, so fold y < 0 onto y > 0.
    Eigen::MatrixXd C(J + 1, np);
    for (Eigen::Index l = 0; l < np; ++l)
        for (Eigen::Index j = 0; j <= J; ++j)
            C(j, l) = (j == 0 ? 1.0 : 2.0) * std::cos(ps[l] * (static_cast<double>(j) * h) / eps);

    // Rows (k * nx + i): phi_k(x_i + y/2) phi_k(x_i - y/2) at y_j.
    Eigen::MatrixXd prod(static_cast<Eigen::Index>(count) * nx, J + 1);
    std::vector<double> a(static_cast<std::size_t>(count)), b(static_cast<std::size_t>(count));
    const double norm0 = std::pow(kPi, -0.25);
    auto hermite_functions = [&](double xi, std::vector<double>& out) {
        out[0] = norm0 * std::exp(-0.5 * xi * xi);
        if (count > 1) out[1] = std::numbers::sqrt2 * xi * out[0];
        for (int k = 1; k + 1 < count; ++k)
            out[static_cast<std::size_t>(k + 1)] =
                std::sqrt(2.0 / (k + 1.0)) * xi * out[static_cast<std::size_t>(k)] -
                std::sqrt(k / (k + 1.0)) * out[static_cast<std::size_t>(k - 1)];
    };
    for (Eigen::Index j = 0; j <= J; ++j) {
        const double half = 0.5 * static_cast<double>(j) * h;
        for (Eigen::Index i = 0; i < nx; ++i) {
            const double u = xs[i] - c;
            hermite_functions((u + half) / se, a);
            hermite_functions((u - half) / se, b);
            for (int k = 0; k < count; ++k)
                prod(static_cast<Eigen::Index>(k) * nx + i, j) =
                    a[static_cast<std::size_t>(k)] * b[static_cast<std::size_t>(k)] / se;
        }
    }
    const Eigen::MatrixXd all = (h / (2.0 * kPi * eps)) * (prod * C);
    std::vector<Eigen::MatrixXd> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) out.push_back(all.middleRows(static_cast<Eigen::Index>(k) * nx, nx));
    return out;
}

Eigen::MatrixXd wigner_projector(const LadderBasis& basis, int k, int level, const PhaseGrid& grid) {
    if (k < 0 || static_cast<std::size_t>(k) >= basis.n_max())
        throw std::invalid_argument("wigner_projector: k must satisfy 0 <= k < n_max");
    check_grid(grid, basis.params(), k);
    return wigner_table(basis.params(), level, k + 1, grid.x_centers(), grid.p_centers())
        .back();
}

double wigner_closed_form(const ModelParams& params, int k, int level, double x, double p) {
    const double eps = params.epsilon;
    const double dx = x - surface_center(params, level);
    const double r2 = dx * dx + p * p;
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    return sign / (kPi * eps) * std::exp(-r2 / eps) * laguerre(k, 0.0, 2.0 * r2 / eps);
}

PhaseField PhaseField::eigenstate(const LadderBasis& basis, int k, int level, const PhaseGrid& grid) {
    PhaseField f{grid, Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(grid.nx), static_cast<Eigen::Index>(grid.np)),
                 Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(grid.nx), static_cast<Eigen::Index>(grid.np))};
    (level == 0 ? f.rho0 : f.rho1) = wigner_projector(basis, k, level, grid);
    return f;
}

PhaseField PhaseField::populations(const LadderBasis& basis, const Eigen::VectorXd& lambda,
                                   const Eigen::VectorXd& theta, const PhaseGrid& grid) {
    const auto n = static_cast<Eigen::Index>(basis.n_max());
    if (lambda.size() != n || theta.size() != n)
        throw std::invalid_argument("PhaseField::populations: vectors must have length n_max");
    int k_top = 0;
    for (Eigen::Index k = 0; k < n; ++k)
        if (lambda[k] != 0.0 || theta[k] != 0.0) k_top = static_cast<int>(k);
    check_grid(grid, basis.params(), k_top);
    const auto xs = grid.x_centers();
    const auto ps = grid.p_centers();
    const auto w0 = wigner_table(basis.params(), 0, k_top + 1, xs, ps);
    const auto w1 = wigner_table(basis.params(), 1, k_top + 1, xs, ps);
    PhaseField f{grid, Eigen::MatrixXd::Zero(xs.size(), ps.size()), Eigen::MatrixXd::Zero(xs.size(), ps.size())};
    for (int k = 0; k <= k_top; ++k) {
        f.rho0 += lambda[k] * w0[static_cast<std::size_t>(k)];
        f.rho1 += theta[k] * w1[static_cast<std::size_t>(k)];
    }
    return f;
}

std::string to_string(RateVariant v) {
    switch (v) {
    case RateVariant::Full: return "full";
    case RateVariant::WidebandHeuristic: return "wideband-heuristic";
    case RateVariant::LcmeEigenstate: return "lcme-eigenstate";
    }
    return "unknown";
}

RateVariant rate_variant_from_string(const std::string& s) {
    if (s == "full") return RateVariant::Full;
    if (s == "wideband-heuristic" || s == "heuristic") return RateVariant::WidebandHeuristic;
    if (s == "lcme-eigenstate") return RateVariant::LcmeEigenstate;
    throw std::invalid_argument("unknown rate variant '" + s + "' (full | wideband-heuristic | lcme-eigenstate)");
}

double energy_gap(const ModelParams& params, double x) {
    return std::numbers::sqrt2 * params.g * x + params.g * params.g + params.ebar0;
}

namespace {

// a_F (hole = false) or a_G (hole = true) of the bath at an arbitrary energy.
double bath_a(const BathModel& bath, double energy, bool hole) {
    if (const auto* wb = std::get_if<WideBand>(&bath)) {
        if (wb->finite_band() && std::abs(energy) > wb->half_width) return 0.0;
        return wb->gamma * fermi(wb->beta, hole ? -energy : energy);
    }
    const auto& db = std::get<DiscreteBath>(bath);
    double sum = 0.0;
    const double s = db.sigma;
    for (const auto& lv : db.levels) {
        const double occ = fermi(db.beta, hole ? -lv.energy : lv.energy);
        const double x = lv.energy - energy;
        sum += lv.coupling * lv.coupling * occ * 2.0 * s / (x * x + s * s);
    }
    return sum;
}

// Sum_m w_m t_m with block-averaged partial sums; throws when it does not settle.
double comb_sum(const std::vector<double>& w, const std::vector<double>& terms, double scale, double U, bool finite) {
    const std::size_t M = std::min(w.size(), terms.size());
    if (finite) {
        double total = 0.0;
        for (std::size_t m = 0; m < M; ++m) total += w[m] * terms[m];
        return total;
    }
    constexpr std::size_t block = 256;
    double partial = 0.0, block_acc = 0.0;
    double prev_mean = std::numeric_limits<double>::quiet_NaN();
    int settled = 0;
    std::size_t in_block = 0;
    for (std::size_t m = 0; m < M; ++m) {
        partial += w[m] * terms[m];
        block_acc += partial;
        if (++in_block == block) {
            const double mean = block_acc / block;
            if (std::isfinite(prev_mean) && std::abs(mean - prev_mean) <= 1e-10 * (std::abs(mean) + scale)) {
                if (++settled >= 2) return mean;
            } else {
                settled = 0;
            }
            prev_mean = mean;
            block_acc = 0.0;
            in_block = 0;
        }
    }
    if (M < block) return partial; // exact zero tail
    std::ostringstream os;
    os << "cme_rates: full-variant comb series did not converge at U = " << U << " after " << M
       << " terms (last block means " << prev_mean << ", partial sum " << partial << ")";
    throw std::runtime_error(os.str());
}

} // namespace

std::vector<double> cme_comb_weights(double kappa, int count) {
    if (kappa < 0.0) throw std::invalid_argument("cme_comb_weights: kappa must be >= 0");
    std::vector<double> w(static_cast<std::size_t>(std::max(count, 0)));
    if (count <= 0) return w;
    const double x = 2.0 * kappa;
    double prev = 1.0, cur = 1.0, log_scale = 0.0; // L_0^(1) = 1
    for (int n = 0; n < count; ++n) {
        if (n == 1) {
            prev = 1.0;
            cur = 2.0 - x;
        } else if (n > 1) {
            const double next = ((2.0 * (n - 1) + 2.0 - x) * cur - static_cast<double>(n) * prev) / static_cast<double>(n);
            prev = cur;
            cur = next;
        }
        const double mag = std::abs(cur);
        if (mag > 1e150) {
            prev /= mag;
            cur /= mag;
            log_scale += std::log(mag);
        }
        const double sign = (n % 2 == 0) ? 1.0 : -1.0;
        w[static_cast<std::size_t>(n)] = 4.0 * sign * cur * std::exp(log_scale - kappa);
    }
    return w;
}

RateField cme_rates(const BathModel& bath, const ModelParams& params, const PhaseGrid& grid, RateVariant variant) {
    params.validate();
    grid.validate();
    std::visit([](const auto& b) { b.validate(); }, bath);
    if (variant == RateVariant::LcmeEigenstate)
        throw std::invalid_argument("cme_rates: use lcme_rate_fields for the lcme-eigenstate variant");

    const auto nx = static_cast<Eigen::Index>(grid.nx), np = static_cast<Eigen::Index>(grid.np);
    const double scale = params.dissipative_scale();
    RateField rf{Eigen::MatrixXd(nx, np), Eigen::MatrixXd(nx, np), variant, 0.0, 0.0, std::nullopt};

    if (variant == RateVariant::WidebandHeuristic) {
        for (Eigen::Index i = 0; i < nx; ++i) {
            const double U = energy_gap(params, grid.x(static_cast<std::size_t>(i)));
            rf.gamma01.row(i).setConstant(scale * bath_a(bath, U, false));
            rf.gamma10.row(i).setConstant(scale * bath_a(bath, U, true));
        }
        return rf;
    }

    // Full variant: gamma = (alpha^2/eps) sum_{m>=1} w_m(|kappa|) a(sign(U) eps m), kappa = 2U/eps.
    const double eps = params.epsilon;
    const auto* wb = std::get_if<WideBand>(&bath);
    int M = 0;
    double a_scale = 1.0;
    if (wb) {
        a_scale = wb->gamma;
        if (wb->finite_band())
            M = static_cast<int>(std::floor(wb->half_width / eps));
        else if (std::isinf(wb->beta))
            M = 1;
        else
            M = static_cast<int>(std::ceil(45.0 / (wb->beta * eps))) + 1024;
    } else {
        const auto& db = std::get<DiscreteBath>(bath);
        double e_max = 0.0, v2 = 0.0;
        for (const auto& lv : db.levels) {
            e_max = std::max(e_max, std::abs(lv.energy));
            v2 += lv.coupling * lv.coupling;
        }
        a_scale = std::max(v2 / db.sigma, 1e-300);
        M = static_cast<int>(std::ceil((e_max + 200.0 * db.sigma) / eps)) + 4096;
    }
    M = std::min(M, 1 << 20);

    // Bath factors at the comb energies +eps m and -eps m, independent of x.
    std::vector<double> pF(static_cast<std::size_t>(M)), pG(pF.size()), mF(pF.size()), mG(pF.size());
    for (int m = 1; m <= M; ++m) {
        const auto s = static_cast<std::size_t>(m - 1);
        pF[s] = bath_a(bath, eps * m, false);
        pG[s] = bath_a(bath, eps * m, true);
        mF[s] = bath_a(bath, -eps * m, false);
        mG[s] = bath_a(bath, -eps * m, true);
    }
    const bool sum_rule = wb && !wb->finite_band();
    const bool finite = wb && wb->finite_band();

    for (Eigen::Index i = 0; i < nx; ++i) {
        const double U = energy_gap(params, grid.x(static_cast<std::size_t>(i)));
        const double kappa = 2.0 * std::abs(U) / eps;
        const auto w = cme_comb_weights(kappa, M);
        double g01 = 0.0, g10 = 0.0;
        if (sum_rule) {
            // Only the decaying occupation is summed; the other follows from a_F + a_G = Gamma.
            if (U >= 0.0) {
                g01 = comb_sum(w, pF, a_scale, U, finite);
                g10 = wb->gamma - g01;
            } else {
                g10 = comb_sum(w, mG, a_scale, U, finite);
                g01 = wb->gamma - g10;
            }
        } else if (U >= 0.0) {
            g01 = comb_sum(w, pF, a_scale, U, finite);
            g10 = comb_sum(w, pG, a_scale, U, finite);
        } else {
            g01 = comb_sum(w, mF, a_scale, U, finite);
            g10 = comb_sum(w, mG, a_scale, U, finite);
        }
        rf.gamma01.row(i).setConstant(scale * g01);
        rf.gamma10.row(i).setConstant(scale * g10);
    }
    return rf;
}

double Taper::weight(int k) const {
    if (k < k_on) return 1.0;
    if (k >= k_off) return 0.0;
    const double s = static_cast<double>(k - k_on) / static_cast<double>(k_off - k_on);
    return 0.5 * (1.0 + std::cos(kPi * s));
}

LcmeFields lcme_rate_fields(const LadderBasis& basis, const CoeffSet& coeffs, const PhaseGrid& grid, Taper taper) {
    const auto& params = basis.params();
    const int n = static_cast<int>(basis.n_max());
    if (taper.k_on < 0) taper.k_on = n / 2;
    if (taper.k_off < 0) taper.k_off = (3 * n) / 4;
    if (!(taper.k_on >= 1 && taper.k_on < taper.k_off && taper.k_off <= n))
        throw std::invalid_argument("lcme_rate_fields: taper needs 1 <= k_on < k_off <= n_max");
    if (coeffs.omega_max() < basis.omega_max())
        throw std::invalid_argument("lcme_rate_fields: coefficient table shorter than the basis omega range");
    check_grid(grid, params, 0);

    const auto& fc = basis.fc();
    Eigen::VectorXd r = Eigen::VectorXd::Zero(n), s = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd hb0 = Eigen::VectorXd::Zero(n), hb1 = Eigen::VectorXd::Zero(n);
    bool any_b = false;
    for (int k = 0; k < n; ++k)
        for (int m = 0; m < n; ++m) {
            const double w = fc(k, m) * fc(k, m);
            r[k] += coeffs.a_F(m - k) * w;
            s[m] += coeffs.a_G(m - k) * w;
            hb0[k] += coeffs.b_F(m - k) * w;
            hb1[m] += coeffs.b_G(m - k) * w;
            any_b = any_b || coeffs.b_F(m - k) != 0.0 || coeffs.b_G(m - k) != 0.0;
        }

    const int count = taper.k_off;
    const double two_pi_eps = 2.0 * kPi * params.epsilon;
    const double scale = params.dissipative_scale();
    const auto xs = grid.x_centers(), ps = grid.p_centers();
    const auto w0 = wigner_table(params, 0, count, xs, ps);
    const auto w1 = wigner_table(params, 1, count, xs, ps);

    LcmeFields out;
    out.taper = taper;
    out.rates.variant = RateVariant::LcmeEigenstate;
    out.rates.gamma01 = Eigen::MatrixXd::Zero(xs.size(), ps.size());
    out.rates.gamma10 = Eigen::MatrixXd::Zero(xs.size(), ps.size());
    Eigen::MatrixXd partition = Eigen::MatrixXd::Zero(xs.size(), ps.size());
    for (int k = 0; k < count; ++k) {
        const double tk = taper.weight(k);
        if (tk == 0.0) continue;
        const auto ks = static_cast<std::size_t>(k);
        out.rates.gamma01 += (scale * two_pi_eps * tk * r[k]) * w0[ks];
        out.rates.gamma10 += (scale * two_pi_eps * tk * s[k]) * w1[ks];
        partition += (two_pi_eps * tk) * w0[ks];
    }

    // Truncation defect inside the disc where the taper is fully on.
    const double se = std::sqrt(params.epsilon);
    double r_on = std::sqrt(params.epsilon * (2.0 * taper.k_on + 1.0)) - 2.0 * se;
    if (r_on <= se) r_on = se;
    double defect = 0.0;
    std::size_t cells = 0;
    for (Eigen::Index j = 0; j < ps.size(); ++j)
        for (Eigen::Index i = 0; i < xs.size(); ++i)
            if (xs[i] * xs[i] + ps[j] * ps[j] < r_on * r_on) {
                defect += std::abs(1.0 - partition(i, j));
                ++cells;
            }
    out.rates.truncation_defect = cells ? defect / static_cast<double>(cells) : 0.0;
    if (out.rates.truncation_defect > 1e-3)
        out.rates.warning = "lcme_rate_fields: truncation defect " + fmt(out.rates.truncation_defect) +
                            " exceeds 1e-3; increase n_max or the taper window";

    double clamped = 0.0;
    for (auto* f : {&out.rates.gamma01, &out.rates.gamma10})
        for (Eigen::Index i = 0; i < f->size(); ++i)
            if (f->data()[i] < 0.0) {
                clamped = std::max(clamped, -f->data()[i]);
                f->data()[i] = 0.0;
            }
    out.rates.clamped = clamped;

    const auto xc = grid.x_corners(), pc = grid.p_corners();
    out.h0_corr = Eigen::MatrixXd::Zero(xc.size(), pc.size());
    out.h1_corr = Eigen::MatrixXd::Zero(xc.size(), pc.size());
    if (any_b) {
        const auto c0 = wigner_table(params, 0, count, xc, pc);
        const auto c1 = wigner_table(params, 1, count, xc, pc);
        for (int k = 0; k < count; ++k) {
            const double tk = taper.weight(k);
            if (tk == 0.0) continue;
            const auto ks = static_cast<std::size_t>(k);
            out.h0_corr += (two_pi_eps * tk * hb0[k]) * c0[ks];
            out.h1_corr += (two_pi_eps * tk * hb1[k]) * c1[ks];
        }
    }
    return out;
}

void TransportConfig::validate() const {
    if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw std::invalid_argument("TransportConfig: t_end must be >= 0");
    if (dt < 0.0 || !std::isfinite(dt)) throw std::invalid_argument("TransportConfig: dt must be >= 0");
    if (!(cfl > 0.0 && cfl <= 1.0)) throw std::invalid_argument("TransportConfig: cfl must be in (0, 1]");
}

Eigen::MatrixXd corner_hamiltonian(const ModelParams& params, int level, const PhaseGrid& grid) {
    const auto xc = grid.x_corners(), pc = grid.p_corners();
    const double c = surface_center(params, level);
    const double shift = level == 1 ? params.ebar0 : 0.0;
    Eigen::MatrixXd H(xc.size(), pc.size());
    for (Eigen::Index j = 0; j < pc.size(); ++j)
        for (Eigen::Index i = 0; i < xc.size(); ++i) {
            const double u = xc[i] - c;
            H(i, j) = 0.5 * pc[j] * pc[j] + 0.5 * u * u + shift;
        }
    return H;
}

namespace {

struct FaceVelocities {
    Eigen::MatrixXd u; // (nx + 1) x np, x-faces
    Eigen::MatrixXd v; // nx x (np + 1), p-faces
    double cfl_rate{0.0}; // max|u|/dx + max|v|/dp
};

FaceVelocities face_velocities(const Eigen::MatrixXd& Hc, const PhaseGrid& grid) {
    const auto nx = static_cast<Eigen::Index>(grid.nx), np = static_cast<Eigen::Index>(grid.np);
    if (Hc.rows() != nx + 1 || Hc.cols() != np + 1)
        throw std::invalid_argument("transport: corner Hamiltonian must be (nx+1) x (np+1)");
    FaceVelocities fv;
    const double dx = grid.dx(), dp = grid.dp();
    fv.u.resize(nx + 1, np);
    fv.v.resize(nx, np + 1);
    for (Eigen::Index j = 0; j < np; ++j)
        for (Eigen::Index i = 0; i <= nx; ++i) fv.u(i, j) = (Hc(i, j + 1) - Hc(i, j)) / dp;
    for (Eigen::Index j = 0; j <= np; ++j)
        for (Eigen::Index i = 0; i < nx; ++i) fv.v(i, j) = -(Hc(i + 1, j) - Hc(i, j)) / dx;
    fv.cfl_rate = fv.u.cwiseAbs().maxCoeff() / dx + fv.v.cwiseAbs().maxCoeff() / dp;
    return fv;
}

inline double mc_slope(double dm, double dp) {
    if (dm * dp <= 0.0) return 0.0;
    const double s = dm > 0.0 ? 1.0 : -1.0;
    return s * std::min({2.0 * std::abs(dm), 2.0 * std::abs(dp), 0.5 * std::abs(dm + dp)});
}

// out = -div(velocity * rho) with MUSCL-MC reconstruction and zero ghost cells.
void transport_rhs(const FaceVelocities& fv, const Eigen::MatrixXd& rho, double dx, double dp, Eigen::MatrixXd& out,
                   Eigen::MatrixXd& slope, std::vector<double>& flux) {
    const auto nx = rho.rows(), np = rho.cols();
    out.setZero(nx, np);
    slope.resize(nx, np);

    // x-direction
    flux.resize(static_cast<std::size_t>(nx + 1));
    for (Eigen::Index j = 0; j < np; ++j) {
        const double* r = rho.col(j).data();
        double* s = slope.col(j).data();
        for (Eigen::Index i = 0; i < nx; ++i) {
            const double left = i > 0 ? r[i - 1] : 0.0;
            const double right = i + 1 < nx ? r[i + 1] : 0.0;
            s[i] = mc_slope(r[i] - left, right - r[i]);
        }
        const double* u = fv.u.col(j).data();
        for (Eigen::Index i = 0; i <= nx; ++i) {
            const double L = i > 0 ? r[i - 1] + 0.5 * s[i - 1] : 0.0;
            const double R = i < nx ? r[i] - 0.5 * s[i] : 0.0;
            flux[static_cast<std::size_t>(i)] = u[i] > 0.0 ? u[i] * L : u[i] * R;
        }
        double* o = out.col(j).data();
        for (Eigen::Index i = 0; i < nx; ++i)
            o[i] -= (flux[static_cast<std::size_t>(i + 1)] - flux[static_cast<std::size_t>(i)]) / dx;
    }

    // p-direction
    for (Eigen::Index j = 0; j < np; ++j) {
        double* s = slope.col(j).data();
        const double* r = rho.col(j).data();
        const double* rl = j > 0 ? rho.col(j - 1).data() : nullptr;
        const double* rr = j + 1 < np ? rho.col(j + 1).data() : nullptr;
        for (Eigen::Index i = 0; i < nx; ++i) {
            const double left = rl ? rl[i] : 0.0;
            const double right = rr ? rr[i] : 0.0;
            s[i] = mc_slope(r[i] - left, right - r[i]);
        }
    }
    flux.resize(static_cast<std::size_t>(nx));
    std::vector<double> prev(static_cast<std::size_t>(nx), 0.0);
    for (Eigen::Index j = 0; j <= np; ++j) {
        const double* v = fv.v.col(j).data();
        for (Eigen::Index i = 0; i < nx; ++i) {
            const double L = j > 0 ? rho(i, j - 1) + 0.5 * slope(i, j - 1) : 0.0;
            const double R = j < np ? rho(i, j) - 0.5 * slope(i, j) : 0.0;
            flux[static_cast<std::size_t>(i)] = v[i] > 0.0 ? v[i] * L : v[i] * R;
        }
        if (j > 0) {
            double* o = out.col(j - 1).data();
            for (Eigen::Index i = 0; i < nx; ++i)
                o[i] -= (flux[static_cast<std::size_t>(i)] - prev[static_cast<std::size_t>(i)]) / dp;
        }
        prev.swap(flux);
        flux.resize(static_cast<std::size_t>(nx));
    }
}

struct TransportWork {
    Eigen::MatrixXd k, y1, y2, slope;
    std::vector<double> flux;
};

void ssp_rk3(const FaceVelocities& fv, Eigen::MatrixXd& rho, double dt, double dx, double dp, TransportWork& w) {
    transport_rhs(fv, rho, dx, dp, w.k, w.slope, w.flux);
    w.y1 = rho + dt * w.k;
    transport_rhs(fv, w.y1, dx, dp, w.k, w.slope, w.flux);
    w.y2 = 0.75 * rho + 0.25 * (w.y1 + dt * w.k);
    transport_rhs(fv, w.y2, dx, dp, w.k, w.slope, w.flux);
    rho = (1.0 / 3.0) * rho + (2.0 / 3.0) * (w.y2 + dt * w.k);
}

void hop(Eigen::MatrixXd& r0, Eigen::MatrixXd& r1, const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double tau) {
    for (Eigen::Index i = 0; i < r0.size(); ++i) {
        const double rate = a.data()[i] + b.data()[i];
        if (rate <= 0.0) continue;
        const double total = r0.data()[i] + r1.data()[i];
        const double eq0 = total * b.data()[i] / rate;
        const double x0 = eq0 + (r0.data()[i] - eq0) * std::exp(-rate * tau);
        r0.data()[i] = x0;
        r1.data()[i] = total - x0;
    }
}

} // namespace

PhaseTrajectory solve_transport_hopping(const Eigen::MatrixXd& h0_corners, const Eigen::MatrixXd& h1_corners,
                                        const RateField& rates, const PhaseField& init, const TransportConfig& cfg) {
    cfg.validate();
    const PhaseGrid& grid = init.grid;
    grid.validate();
    const auto nx = static_cast<Eigen::Index>(grid.nx), np = static_cast<Eigen::Index>(grid.np);
    for (const auto* m : {&init.rho0, &init.rho1, &rates.gamma01, &rates.gamma10})
        if (m->rows() != nx || m->cols() != np)
            throw std::invalid_argument("solve: fields must be nx x np on the initial grid");
    if (rates.gamma01.minCoeff() < 0.0 || rates.gamma10.minCoeff() < 0.0)
        throw std::invalid_argument("solve: hopping rates must be nonnegative");

    const FaceVelocities f0 = face_velocities(h0_corners, grid);
    const FaceVelocities f1 = face_velocities(h1_corners, grid);
    const double rate = std::max(f0.cfl_rate, f1.cfl_rate);

    PhaseTrajectory out;
    std::size_t steps = 1;
    double dt = cfg.t_end;
    if (cfg.transport) {
        if (cfg.dt > 0.0) {
            if (cfg.dt * rate > cfg.cfl + 1e-12)
                throw std::invalid_argument("solve: CFL violation, dt * (max|u|/dx + max|v|/dp) = " +
                                            fmt(cfg.dt * rate) + " > " + fmt(cfg.cfl));
            steps = static_cast<std::size_t>(std::ceil(cfg.t_end / cfg.dt - 1e-9));
        } else {
            steps = static_cast<std::size_t>(std::ceil(cfg.t_end * rate / cfg.cfl - 1e-9));
        }
    } else if (cfg.dt > 0.0) {
        steps = static_cast<std::size_t>(std::ceil(cfg.t_end / cfg.dt - 1e-9));
    }
    steps = std::max<std::size_t>(steps, 1);
    dt = cfg.t_end / static_cast<double>(steps);
    out.dt = dt;

    Eigen::MatrixXd r0 = init.rho0, r1 = init.rho1;
    const double area = grid.cell_area();
    const double mass_init = (r0.sum() + r1.sum()) * area;
    auto record = [&](double t) {
        out.times.push_back(t);
        out.mass0.push_back(r0.sum() * area);
        out.mass1.push_back(r1.sum() * area);
    };
    record(0.0);
    if (cfg.stride > 0) out.snapshots.push_back({grid, r0, r1});
    if (cfg.t_end == 0.0) {
        out.final_state = {grid, r0, r1};
        return out;
    }

    TransportWork work;
    for (std::size_t s = 1; s <= steps; ++s) {
        if (cfg.hopping) hop(r0, r1, rates.gamma01, rates.gamma10, 0.5 * dt);
        if (cfg.transport) {
            ssp_rk3(f0, r0, dt, grid.dx(), grid.dp(), work);
            ssp_rk3(f1, r1, dt, grid.dx(), grid.dp(), work);
        }
        if (cfg.hopping) hop(r0, r1, rates.gamma01, rates.gamma10, 0.5 * dt);
        const double t = s == steps ? cfg.t_end : static_cast<double>(s) * dt;
        record(t);
        const double drift = std::abs(out.mass0.back() + out.mass1.back() - mass_init);
        out.max_mass_drift = std::max(out.max_mass_drift, drift);
        if (!std::isfinite(drift) || drift > 1e-4)
            throw std::runtime_error("solve: total mass drift " + fmt(drift) + " exceeds 1e-4 at t = " + fmt(t));
        if (cfg.stride > 0 && (s % cfg.stride == 0 || s == steps)) out.snapshots.push_back({grid, r0, r1});
    }
    out.steps = steps;
    out.final_state = {grid, std::move(r0), std::move(r1)};
    return out;
}

PhaseTrajectory solve_cme(const RateField& rates, const ModelParams& params, const PhaseField& init,
                          const TransportConfig& cfg) {
    return solve_transport_hopping(corner_hamiltonian(params, 0, init.grid), corner_hamiltonian(params, 1, init.grid),
                                   rates, init, cfg);
}

PhaseTrajectory solve_lcme(const LcmeFields& fields, const ModelParams& params, const PhaseField& init,
                           const TransportConfig& cfg) {
    const double a2 = params.alpha * params.alpha;
    Eigen::MatrixXd h0 = corner_hamiltonian(params, 0, init.grid);
    Eigen::MatrixXd h1 = corner_hamiltonian(params, 1, init.grid);
    if (fields.h0_corr.rows() != h0.rows() || fields.h0_corr.cols() != h0.cols() ||
        fields.h1_corr.rows() != h1.rows() || fields.h1_corr.cols() != h1.cols())
        throw std::invalid_argument("solve_lcme: corrected-Hamiltonian fields do not match the grid");
    h0 += a2 * fields.h0_corr;
    h1 -= a2 * fields.h1_corr;
    return solve_transport_hopping(h0, h1, fields.rates, init, cfg);
}

} // namespace ahsim
