// io.cpp — CSV and binary writers

#include "ahsim/io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <stdexcept>

namespace ahsim::io {

namespace {

constexpr std::uint32_t kFormatVersion = 1;

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode = std::ios::out) {
    std::ofstream out(path, mode | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
}

template <typename T>
void put(std::ofstream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::ifstream& in, const std::filesystem::path& path) {
    T v{};
    if (!in.read(reinterpret_cast<char*>(&v), sizeof(T))) throw std::runtime_error("truncated file " + path.string());
    return v;
}

void check_header(std::ifstream& in, const std::filesystem::path& path, const char* magic) {
    std::array<char, 4> m{};
    if (!in.read(m.data(), 4) || std::string(m.data(), 4) != magic)
        throw std::runtime_error(path.string() + ": not an " + magic + " file");
    const auto version = get<std::uint32_t>(in, path);
    if (version != kFormatVersion)
        throw std::runtime_error(path.string() + ": unsupported version " + std::to_string(version));
}

static_assert(std::endian::native == std::endian::little, "binary dumps assume a little-endian host");

} // namespace

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::array<char, 32> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    if (ec != std::errc{}) throw std::runtime_error("format_double failed");
    return std::string(buf.data(), end);
}

std::string fnv1a_hex(const std::string& data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i, h >>= 4) out[static_cast<std::size_t>(i)] = digits[h & 0xf];
    return out;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : out_(open_out(path)), columns_(header.size()), path_(path) {
    for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
    out_ << '\n';
}

void CsvWriter::row(const std::vector<double>& values) {
    if (values.size() != columns_)
        throw std::logic_error(path_.string() + ": row has " + std::to_string(values.size()) + " columns, expected " +
                               std::to_string(columns_));
    for (std::size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << format_double(values[i]);
    out_ << '\n';
    if (!out_) throw std::runtime_error("write failed: " + path_.string());
}

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj) {
    const std::size_t n = traj.records.empty() ? 0 : static_cast<std::size_t>(traj.records.front().lambda.size());
    std::vector<std::string> header{"time",          "trace",          "trace0",     "trace1",
                                    "rho01_norm",    "block_offdiag",  "min_eigenvalue", "hermiticity"};
    for (std::size_t k = 0; k < n; ++k) header.push_back("lambda_" + std::to_string(k));
    for (std::size_t k = 0; k < n; ++k) header.push_back("theta_" + std::to_string(k));
    CsvWriter w(path, header);
    for (const auto& r : traj.records) {
        std::vector<double> row{r.time, r.trace, r.trace0, r.trace1, r.coherence, r.block_offdiag, r.min_eigenvalue,
                                r.hermiticity};
        for (Eigen::Index k = 0; k < r.lambda.size(); ++k) row.push_back(r.lambda[k]);
        for (Eigen::Index k = 0; k < r.theta.size(); ++k) row.push_back(r.theta[k]);
        w.row(row);
    }
}

void write_rate_trajectory_csv(const std::filesystem::path& path, const RateTrajectory& traj) {
    const std::size_t n = traj.lambda.empty() ? 0 : static_cast<std::size_t>(traj.lambda.front().size());
    std::vector<std::string> header{"time", "population0", "population1"};
    for (std::size_t k = 0; k < n; ++k) header.push_back("lambda_" + std::to_string(k));
    for (std::size_t k = 0; k < n; ++k) header.push_back("theta_" + std::to_string(k));
    CsvWriter w(path, header);
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        std::vector<double> row{traj.times[i], traj.lambda[i].sum(), traj.theta[i].sum()};
        for (Eigen::Index k = 0; k < traj.lambda[i].size(); ++k) row.push_back(traj.lambda[i][k]);
        for (Eigen::Index k = 0; k < traj.theta[i].size(); ++k) row.push_back(traj.theta[i][k]);
        w.row(row);
    }
}

void write_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& m) {
    std::vector<std::string> header{"row"};
    for (Eigen::Index j = 0; j < m.cols(); ++j) header.push_back("c" + std::to_string(j));
    CsvWriter w(path, header);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        std::vector<double> row{static_cast<double>(i)};
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        w.row(row);
    }
}

void write_coeffs_csv(const std::filesystem::path& path, const CoeffSet& c) {
    CsvWriter w(path, {"omega", "energy", "a_F", "b_F", "a_G", "b_G", "cut_off"});
    for (int om = -c.omega_max(); om <= c.omega_max(); ++om)
        w.row({static_cast<double>(om), c.energy(om), c.a_F(om), c.b_F(om), c.a_G(om), c.b_G(om),
               c.cut_off(om) ? 1.0 : 0.0});
}

void write_phase_mass_csv(const std::filesystem::path& path, const PhaseTrajectory& traj) {
    CsvWriter w(path, {"time", "mass0", "mass1", "mass"});
    for (std::size_t i = 0; i < traj.times.size(); ++i)
        w.row({traj.times[i], traj.mass0[i], traj.mass1[i], traj.mass0[i] + traj.mass1[i]});
}

void write_field_binary(const std::filesystem::path& path, const PhaseGrid& grid, const Eigen::MatrixXd& a,
                        const Eigen::MatrixXd& b) {
    const auto nx = static_cast<Eigen::Index>(grid.nx), np = static_cast<Eigen::Index>(grid.np);
    if (a.rows() != nx || a.cols() != np || b.rows() != nx || b.cols() != np)
        throw std::invalid_argument("write_field_binary: field shape does not match the grid");
    auto out = open_out(path, std::ios::binary);
    out.write("AHSF", 4);
    put<std::uint32_t>(out, kFormatVersion);
    put<std::uint64_t>(out, grid.nx);
    put<std::uint64_t>(out, grid.np);
    for (double v : {grid.x_min, grid.x_max, grid.p_min, grid.p_max}) put<double>(out, v);
    for (const auto* f : {&a, &b})
        for (Eigen::Index i = 0; i < nx; ++i)
            for (Eigen::Index j = 0; j < np; ++j) put<double>(out, (*f)(i, j));
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

PhaseField read_field_binary(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    check_header(in, path, "AHSF");
    PhaseField f;
    f.grid.nx = get<std::uint64_t>(in, path);
    f.grid.np = get<std::uint64_t>(in, path);
    f.grid.x_min = get<double>(in, path);
    f.grid.x_max = get<double>(in, path);
    f.grid.p_min = get<double>(in, path);
    f.grid.p_max = get<double>(in, path);
    const auto nx = static_cast<Eigen::Index>(f.grid.nx), np = static_cast<Eigen::Index>(f.grid.np);
    for (auto* m : {&f.rho0, &f.rho1}) {
        m->resize(nx, np);
        for (Eigen::Index i = 0; i < nx; ++i)
            for (Eigen::Index j = 0; j < np; ++j) (*m)(i, j) = get<double>(in, path);
    }
    return f;
}

void write_matrix_binary(const std::filesystem::path& path, const Eigen::MatrixXcd& m) {
    auto out = open_out(path, std::ios::binary);
    out.write("AHSM", 4);
    put<std::uint32_t>(out, kFormatVersion);
    put<std::uint64_t>(out, static_cast<std::uint64_t>(m.rows()));
    put<std::uint64_t>(out, static_cast<std::uint64_t>(m.cols()));
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            put<double>(out, m(i, j).real());
            put<double>(out, m(i, j).imag());
        }
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

Eigen::MatrixXcd read_matrix_binary(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    check_header(in, path, "AHSM");
    const auto rows = static_cast<Eigen::Index>(get<std::uint64_t>(in, path));
    const auto cols = static_cast<Eigen::Index>(get<std::uint64_t>(in, path));
    Eigen::MatrixXcd m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) {
            const double re = get<double>(in, path);
            m(i, j) = {re, get<double>(in, path)};
        }
    return m;
}

} // namespace ahsim::io
