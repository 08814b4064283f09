// runner.cpp — Run dispatch, artifacts, manifests and the sweep worker pool

#include "ahsim/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include <Eigen/Core>
#include <boost/version.hpp>

#include "ahsim/basis.hpp"
#include "ahsim/generators.hpp"
#include "ahsim/io.hpp"

namespace ahsim {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Context {
    const RunConfig& config;
    const RunOptions& options;
    std::vector<fs::path> files;
    json diagnostics = json::object();
    std::vector<std::string> warnings;

    fs::path path(const std::string& suffix) const { return options.out_dir / (config.outputs.prefix + suffix); }
    fs::path add(const std::string& suffix) {
        files.push_back(path(suffix));
        return files.back();
    }
    void note(const std::string& line) const {
        if (options.verbose && options.log) *options.log << "[" << config.outputs.prefix << "] " << line << '\n';
    }
};

json versions() {
    std::ostringstream eigen, boost;
    eigen << EIGEN_WORLD_VERSION << '.' << EIGEN_MAJOR_VERSION << '.' << EIGEN_MINOR_VERSION;
    boost << BOOST_VERSION / 100000 << '.' << BOOST_VERSION / 100 % 1000 << '.' << BOOST_VERSION % 100;
    return {{"ahsim", AHSIM_VERSION}, {"eigen", eigen.str()}, {"boost", boost.str()}, {"compiler", __VERSION__}};
}

CoeffSet coeffs_for(const LadderBasis& basis, const BathModel& bath) {
    return std::visit([&](const auto& b) { return tabulate_coeffs(basis, b); }, bath);
}

int top_level(const RunConfig& c) {
    Eigen::VectorXd lambda, theta;
    initial_populations(c, lambda, theta);
    int k = 0;
    for (Eigen::Index i = 0; i < lambda.size(); ++i)
        if (lambda[i] > 0.0 || theta[i] > 0.0) k = static_cast<int>(i);
    return k;
}

void run_quantum(Context& ctx, const LadderBasis& basis, const CoeffSet& coeffs) {
    const RunConfig& c = ctx.config;
    io::write_coeffs_csv(ctx.add("_coeffs.csv"), coeffs);
    const Generator gen = c.kind == RunKind::Redfield ? build_redfield(basis, coeffs, c.route)
                                                      : build_lindblad(basis, coeffs);
    ctx.note("generator " + to_string(gen.kind()) + " / " + to_string(gen.route()) + ", dim " +
             std::to_string(gen.dim()));
    if (c.outputs.superoperator) io::write_matrix_binary(ctx.add("_superoperator.bin"), matricize(gen));

    BlockDensity rho;
    if (c.initial.kind == InitialKind::Eigenstate) {
        rho = BlockDensity::eigenstate(c.n_max, c.initial.k, c.initial.level);
    } else {
        Eigen::VectorXd lambda, theta;
        initial_populations(c, lambda, theta);
        rho = BlockDensity::diagonal(lambda, theta);
    }
    IntegratorConfig ic = c.integrator;
    ic.t_end = c.t_end;
    ic.keep_states = c.outputs.snapshots;
    const Trajectory traj = propagate(gen, rho, ic);
    io::write_trajectory_csv(ctx.add("_trajectory.csv"), traj);
    for (std::size_t i = 0; i < traj.states.size(); ++i) {
        std::ostringstream s;
        s << "_state_" << std::setw(5) << std::setfill('0') << i << ".bin";
        io::write_matrix_binary(ctx.add(s.str()), traj.states[i].full());
    }
    ctx.diagnostics["max_trace_drift"] = traj.max_trace_drift;
    ctx.diagnostics["max_hermiticity"] = traj.max_hermiticity;
    ctx.diagnostics["min_eigenvalue"] = traj.min_eigenvalue;
    ctx.diagnostics["max_rho01_norm"] = traj.max_coherence;
    ctx.diagnostics["max_block_offdiag"] = traj.max_block_offdiag;
    ctx.diagnostics["accepted_steps"] = traj.accepted_steps;
    ctx.diagnostics["rejected_steps"] = traj.rejected_steps;
    ctx.note("propagated " + std::to_string(traj.accepted_steps) + " steps");
}

void run_rates(Context& ctx, const LadderBasis& basis, const CoeffSet& coeffs) {
    const RunConfig& c = ctx.config;
    io::write_coeffs_csv(ctx.add("_coeffs.csv"), coeffs);
    const RateMatrix rm = build_rate_matrix(basis, coeffs);
    io::write_matrix_csv(ctx.add("_k01.csv"), rm.k01);
    io::write_matrix_csv(ctx.add("_k10.csv"), rm.k10);
    Eigen::VectorXd lambda, theta;
    initial_populations(c, lambda, theta);
    IntegratorConfig ic = c.integrator;
    ic.t_end = c.t_end;
    const RateTrajectory traj = propagate_rates(rm, lambda, theta, ic);
    io::write_rate_trajectory_csv(ctx.add("_populations.csv"), traj);
    ctx.diagnostics["max_probability_drift"] = traj.max_probability_drift;
    ctx.diagnostics["escape0_ground"] = rm.escape0(0);
    ctx.diagnostics["rate_00"] = rm.k01(0, 0);
}

TransportConfig transport_config(const RunConfig& c) {
    TransportConfig tc;
    tc.t_end = c.t_end;
    tc.dt = c.semiclassical.dt;
    tc.cfl = c.semiclassical.cfl;
    tc.stride = c.outputs.snapshots ? c.integrator.stride : 0;
    return tc;
}

void write_phase_outputs(Context& ctx, const PhaseTrajectory& traj, const RateField& rates) {
    const PhaseGrid& grid = traj.final_state.grid;
    io::write_phase_mass_csv(ctx.add("_mass.csv"), traj);
    io::write_field_binary(ctx.add("_rates.bin"), grid, rates.gamma01, rates.gamma10);
    io::write_field_binary(ctx.add("_final.bin"), grid, traj.final_state.rho0, traj.final_state.rho1);
    for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
        std::ostringstream s;
        s << "_field_" << std::setw(5) << std::setfill('0') << i << ".bin";
        io::write_field_binary(ctx.add(s.str()), grid, traj.snapshots[i].rho0, traj.snapshots[i].rho1);
    }
    ctx.diagnostics["max_mass_drift"] = traj.max_mass_drift;
    ctx.diagnostics["dt"] = traj.dt;
    ctx.diagnostics["steps"] = traj.steps;
    if (rates.warning) ctx.warnings.push_back(*rates.warning);
    ctx.note("transport finished in " + std::to_string(traj.steps) + " steps, dt " + io::format_double(traj.dt));
}

PhaseField initial_field(const RunConfig& c, const LadderBasis& basis) {
    const PhaseGrid& grid = *c.grid;
    if (c.initial.kind == InitialKind::Eigenstate)
        return PhaseField::eigenstate(basis, static_cast<int>(c.initial.k), c.initial.level, grid);
    Eigen::VectorXd lambda, theta;
    initial_populations(c, lambda, theta);
    return PhaseField::populations(basis, lambda, theta, grid);
}

void run_cme(Context& ctx, const LadderBasis& basis, const BathModel& bath) {
    const RunConfig& c = ctx.config;
    check_grid(*c.grid, c.model, top_level(c));
    const RateField rates = cme_rates(bath, c.model, *c.grid, c.semiclassical.rate_variant);
    const PhaseTrajectory traj = solve_cme(rates, c.model, initial_field(c, basis), transport_config(c));
    ctx.diagnostics["rate_variant"] = to_string(rates.variant);
    write_phase_outputs(ctx, traj, rates);
}

void run_lcme(Context& ctx, const LadderBasis& basis, const CoeffSet& coeffs) {
    const RunConfig& c = ctx.config;
    check_grid(*c.grid, c.model, top_level(c));
    io::write_coeffs_csv(ctx.add("_coeffs.csv"), coeffs);
    const LcmeFields fields =
        lcme_rate_fields(basis, coeffs, *c.grid, Taper{c.semiclassical.k_on, c.semiclassical.k_off});
    ctx.diagnostics["taper_k_on"] = fields.taper.k_on;
    ctx.diagnostics["taper_k_off"] = fields.taper.k_off;
    ctx.diagnostics["truncation_defect"] = fields.rates.truncation_defect;
    ctx.diagnostics["clamped"] = fields.rates.clamped;
    const PhaseTrajectory traj = solve_lcme(fields, c.model, initial_field(c, basis), transport_config(c));
    write_phase_outputs(ctx, traj, fields.rates);
}

void dispatch(Context& ctx) {
    const RunConfig& c = ctx.config;
    const LadderBasis basis = build_basis(c.model, c.n_max);
    const BathModel bath = make_bath(c);
    if (auto w = c.model.weak_coupling_warning()) ctx.warnings.push_back(*w);
    if (c.kind == RunKind::Cme) {
        run_cme(ctx, basis, bath);
        return;
    }
    const CoeffSet coeffs = coeffs_for(basis, bath);
    if (coeffs.lamb_shift_dropped())
        ctx.warnings.push_back("infinite band: b coefficients (Lamb shift) set to zero");
    switch (c.kind) {
    case RunKind::Coeffs: io::write_coeffs_csv(ctx.add("_coeffs.csv"), coeffs); break;
    case RunKind::Rates: run_rates(ctx, basis, coeffs); break;
    case RunKind::Redfield:
    case RunKind::Lindblad: run_quantum(ctx, basis, coeffs); break;
    case RunKind::Lcme: run_lcme(ctx, basis, coeffs); break;
    case RunKind::Cme: break;
    }
}

void write_json(const fs::path& path, const json& j) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

json file_list(const std::vector<fs::path>& files) {
    json a = json::array();
    for (const auto& f : files) a.push_back(f.filename().string());
    return a;
}

} // namespace

std::string config_hash(const RunConfig& config) { return io::fnv1a_hex(emit_config(config).dump()); }

RunResult run(const RunConfig& config, const RunOptions& options) {
    RunResult result;
    const auto start = std::chrono::steady_clock::now();
    Context ctx{config, options, {}, json::object(), {}};
    std::string error_type;
    try {
        validate(config);
        fs::create_directories(options.out_dir);
        fs::remove(ctx.path(".FAILED"));
        fs::remove(ctx.path(".error.json"));
        ctx.note("kind " + to_string(config.kind) + ", n_max " + std::to_string(config.n_max));
        dispatch(ctx);
        result.ok = true;
    } catch (const std::invalid_argument& e) {
        result.error = e.what();
        error_type = "invalid_argument";
    } catch (const PropagationError& e) {
        result.error = std::string(e.what()) + " (t = " + io::format_double(e.time()) + ")";
        error_type = "propagation_error";
    } catch (const std::exception& e) {
        result.error = e.what();
        error_type = "runtime_error";
    }
    result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.files = ctx.files;

    json manifest = {{"status", result.ok ? "ok" : "failed"},
                     {"config", emit_config(config)},
                     {"config_hash", config_hash(config)},
                     {"versions", versions()},
                     {"wall_time_seconds", result.seconds},
                     {"files", file_list(ctx.files)},
                     {"diagnostics", ctx.diagnostics},
                     {"warnings", ctx.warnings},
                     {"derived", {{"dissipative_scale", config.model.dissipative_scale()},
                                  {"relaxation_time", io::format_double(config.model.relaxation_time())},
                                  {"default_dt", default_dt(config.model)}}}};
    try {
        fs::create_directories(options.out_dir);
        if (!result.ok) {
            const json record = {{"status", "failed"},
                                 {"error", result.error},
                                 {"type", error_type},
                                 {"config_hash", config_hash(config)},
                                 {"files_written", file_list(ctx.files)}};
            manifest["error"] = record;
            write_json(ctx.path(".error.json"), record);
            std::ofstream(ctx.path(".FAILED"), std::ios::trunc) << result.error << '\n';
        }
        result.manifest = ctx.path(".manifest.json");
        write_json(result.manifest, manifest);
    } catch (const std::exception& e) {
        if (result.ok) {
            result.ok = false;
            result.error = e.what();
        }
    }
    for (const auto& w : ctx.warnings) ctx.note("warning: " + w);
    return result;
}

RunResult run_sweep(const RunConfig& config, const RunOptions& options) {
    RunResult result;
    const auto start = std::chrono::steady_clock::now();
    if (!config.sweep) {
        result.error = "sweep: section required for the sweep command";
        return result;
    }
    try {
        validate(config);
        fs::create_directories(options.out_dir);
    } catch (const std::exception& e) {
        result.error = e.what();
        return result;
    }
    const SweepConfig& sw = *config.sweep;
    const std::size_t n = sw.values.size();

    std::vector<RunConfig> entries;
    for (std::size_t i = 0; i < n; ++i) {
        RunConfig e = with_parameter(config, sw.parameter, sw.values[i]);
        e.sweep.reset();
        std::ostringstream p;
        p << config.outputs.prefix << '_' << std::setw(3) << std::setfill('0') << i;
        e.outputs.prefix = p.str();
        entries.push_back(std::move(e));
    }

    struct Row {
        RunResult res;
        double rate_00{std::nan("")}, escape_0{std::nan("")};
    };
    std::vector<Row> rows(n);
    std::atomic<std::size_t> next{0};
    std::mutex log_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            std::ostringstream log;
            RunOptions o = options;
            o.log = &log;
            rows[i].res = run(entries[i], o);
            try {
                const LadderBasis basis = build_basis(entries[i].model, entries[i].n_max);
                const BathModel bath = make_bath(entries[i]);
                const RateMatrix rm = build_rate_matrix(basis, coeffs_for(basis, bath));
                rows[i].rate_00 = rm.k01(0, 0);
                rows[i].escape_0 = rm.escape0(0);
            } catch (const std::exception&) {
            }
            if (options.verbose && options.log) {
                std::lock_guard lock(log_mutex);
                *options.log << log.str();
            }
        }
    };
    std::size_t workers = sw.workers ? sw.workers : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, n);
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    result.ok = true;
    const fs::path table = options.out_dir / (config.outputs.prefix + "_sweep.csv");
    try {
        io::CsvWriter w(table, {"index", "value", "g", "epsilon", "g2_over_eps", "rate_00", "escape_0", "log_rate_00",
                                "ok"});
        for (std::size_t i = 0; i < n; ++i) {
            const ModelParams& m = entries[i].model;
            w.row({static_cast<double>(i), sw.values[i], m.g, m.epsilon, m.g * m.g / m.epsilon, rows[i].rate_00,
                   rows[i].escape_0, std::log(rows[i].rate_00), rows[i].res.ok ? 1.0 : 0.0});
        }
        result.files.push_back(table);
    } catch (const std::exception& e) {
        result.ok = false;
        result.error = e.what();
    }
    std::vector<std::string> failed;
    for (std::size_t i = 0; i < n; ++i) {
        result.files.insert(result.files.end(), rows[i].res.files.begin(), rows[i].res.files.end());
        if (!rows[i].res.ok) failed.push_back(entries[i].outputs.prefix + ": " + rows[i].res.error);
    }
    if (!failed.empty()) {
        result.ok = false;
        for (const auto& f : failed) result.error += (result.error.empty() ? "" : "; ") + f;
    }
    result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    json manifest = {{"status", result.ok ? "ok" : "failed"},
                     {"config", emit_config(config)},
                     {"config_hash", config_hash(config)},
                     {"versions", versions()},
                     {"wall_time_seconds", result.seconds},
                     {"workers", workers},
                     {"entries", json::array()}};
    for (std::size_t i = 0; i < n; ++i)
        manifest["entries"].push_back({{"prefix", entries[i].outputs.prefix},
                                       {"value", sw.values[i]},
                                       {"status", rows[i].res.ok ? "ok" : "failed"},
                                       {"error", rows[i].res.error}});
    result.manifest = options.out_dir / (config.outputs.prefix + "_sweep.manifest.json");
    write_json(result.manifest, manifest);
    return result;
}

} // namespace ahsim
