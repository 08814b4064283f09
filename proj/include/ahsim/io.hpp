// io.hpp — CSV and binary writers for trajectories, coefficient tables and phase-space fields
//
// Layouts are documented in FORMATS.md. Doubles are printed in the shortest form that
// parses back to the same value.

#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ahsim/dynamics.hpp"
#include "ahsim/semiclassical.hpp"

namespace ahsim::io {

std::string format_double(double v);

// 64-bit FNV-1a, printed as 16 lowercase hex digits.
std::string fnv1a_hex(const std::string& data);

class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);
    void row(const std::vector<double>& values);
    void flush() { out_.flush(); }

private:
    std::ofstream out_;
    std::size_t columns_;
    std::filesystem::path path_;
};

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj);
void write_rate_trajectory_csv(const std::filesystem::path& path, const RateTrajectory& traj);
void write_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& m);
void write_coeffs_csv(const std::filesystem::path& path, const CoeffSet& coeffs);
void write_phase_mass_csv(const std::filesystem::path& path, const PhaseTrajectory& traj);

// "AHSF" field pair dump; rho0/rho1 (or gamma01/gamma10) on the cell centres.
void write_field_binary(const std::filesystem::path& path, const PhaseGrid& grid, const Eigen::MatrixXd& a,
                        const Eigen::MatrixXd& b);
PhaseField read_field_binary(const std::filesystem::path& path);

// "AHSM" dense complex matrix dump.
void write_matrix_binary(const std::filesystem::path& path, const Eigen::MatrixXcd& m);
Eigen::MatrixXcd read_matrix_binary(const std::filesystem::path& path);

} // namespace ahsim::io
