// ahsim.cpp — Command-line front end: run, sweep, check

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ahsim/acceptance.hpp"
#include "ahsim/config.hpp"
#include "ahsim/runner.hpp"

namespace {

int report(const ahsim::RunResult& r, bool verbose) {
    if (!r.ok) {
        std::cerr << "ahsim: error: " << r.error << '\n';
        if (!r.manifest.empty()) std::cerr << "ahsim: manifest " << r.manifest.string() << '\n';
        return 1;
    }
    if (verbose)
        for (const auto& f : r.files) std::cout << f.string() << '\n';
    std::cout << "ok: " << r.files.size() << " files, manifest " << r.manifest.string() << '\n';
    return 0;
}

int load_and(const std::string& path, const ahsim::RunOptions& opts, bool sweep) {
    ahsim::RunConfig cfg;
    try {
        cfg = ahsim::parse_config(path);
    } catch (const std::exception& e) {
        std::cerr << "ahsim: config error: " << e.what() << '\n';
        return 2;
    }
    if (sweep && !cfg.sweep) {
        std::cerr << "ahsim: config error: sweep: section required for the sweep command\n";
        return 2;
    }
    return report(sweep ? ahsim::run_sweep(cfg, opts) : ahsim::run(cfg, opts), opts.verbose);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Anderson-Holstein master-equation simulator"};
    app.set_version_flag("--version", std::string(AHSIM_VERSION));
    app.require_subcommand(1);

    std::string out_dir = ".";
    bool verbose = false;
    app.add_option("--out-dir", out_dir, "Directory for output files")->capture_default_str();
    app.add_flag("-v,--verbose", verbose, "Progress output");

    std::string config;
    auto* run = app.add_subcommand("run", "Execute one configured run");
    run->add_option("config", config, "JSON run configuration")->required()->check(CLI::ExistingFile);
    auto* sweep = app.add_subcommand("sweep", "Execute a parameter sweep");
    sweep->add_option("config", config, "JSON run configuration with a sweep section")
        ->required()
        ->check(CLI::ExistingFile);
    std::vector<int> only;
    auto* check = app.add_subcommand("check", "Run the acceptance suite");
    check->add_option("--only", only, "Criterion ids to run")->check(CLI::Range(1, ahsim::kCriterionCount));

    for (auto* sub : {run, sweep, check}) {
        sub->add_option("--out-dir", out_dir, "Directory for output files");
        sub->add_flag("-v,--verbose", verbose, "Progress output");
    }

    CLI11_PARSE(app, argc, argv);

    ahsim::RunOptions opts;
    opts.out_dir = out_dir;
    opts.verbose = verbose;
    opts.log = &std::cerr;

    if (*run) return load_and(config, opts, false);
    if (*sweep) return load_and(config, opts, true);

    const auto results = ahsim::run_acceptance(only, &std::cout);
    std::size_t passed = 0;
    for (const auto& r : results) passed += r.passed ? 1 : 0;
    std::cout << passed << "/" << results.size() << " criteria passed\n";
    return passed == results.size() ? 0 : 1;
}
