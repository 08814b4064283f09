// runner.hpp — Executes a RunConfig and writes its artifacts plus a manifest

#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "ahsim/config.hpp"

namespace ahsim {

struct RunOptions {
    std::filesystem::path out_dir{"."};
    bool verbose{false};
    std::ostream* log{nullptr}; // progress lines when verbose
};

struct RunResult {
    bool ok{false};
    std::string error;
    std::vector<std::filesystem::path> files;
    std::filesystem::path manifest;
    double seconds{0.0};
};

// Single run. Never throws on numerical failure: a <prefix>.FAILED marker and a
// <prefix>.error.json record are written next to whatever was already flushed.
RunResult run(const RunConfig& config, const RunOptions& options);

// One run per sweep value, <prefix>_<index> each, executed by a worker pool, followed
// by the <prefix>_sweep.csv table. ok is false when any entry failed.
RunResult run_sweep(const RunConfig& config, const RunOptions& options);

// Canonical config hash written into manifests.
std::string config_hash(const RunConfig& config);

} // namespace ahsim
