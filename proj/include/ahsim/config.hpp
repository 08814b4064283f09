// config.hpp — Run configuration: JSON schema, validation, defaults, canonical emission

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ahsim/bath.hpp"
#include "ahsim/dynamics.hpp"
#include "ahsim/params.hpp"
#include "ahsim/semiclassical.hpp"

namespace ahsim {

enum class RunKind { Redfield, Lindblad, Rates, Cme, Lcme, Coeffs };
enum class BathKind { Wideband, Discrete, Uniform };
enum class InitialKind { Eigenstate, Populations, Thermal };

std::string to_string(RunKind k);
std::string to_string(BathKind k);
std::string to_string(InitialKind k);

struct BathConfig {
    BathKind kind{BathKind::Wideband};
    // wideband
    double gamma{1.0};
    double half_width{std::numeric_limits<double>::infinity()};
    // discrete
    std::vector<BathLevel> levels;
    // uniform
    std::size_t n_levels{4000};
    double e_min{-5.0};
    double e_max{5.0};
    // discrete + uniform; nullopt = 2 x mean level spacing
    std::optional<double> sigma;

    bool operator==(const BathConfig&) const = default;
};

struct InitialConfig {
    InitialKind kind{InitialKind::Eigenstate};
    std::size_t k{0};
    int level{0};
    std::vector<double> lambda;
    std::vector<double> theta;

    bool operator==(const InitialConfig&) const = default;
};

struct SemiclassicalConfig {
    RateVariant rate_variant{RateVariant::WidebandHeuristic}; // cme only
    double cfl{0.5};
    double dt{0.0};
    int k_on{-1};
    int k_off{-1};

    bool operator==(const SemiclassicalConfig&) const = default;
};

struct OutputConfig {
    std::string prefix{"run"};
    bool superoperator{false}; // dump matricize() (quantum runs, n_max <= 16)
    bool snapshots{false};     // dump states / fields at every recorded time

    bool operator==(const OutputConfig&) const = default;
};

struct SweepConfig {
    std::string parameter{"g"}; // epsilon | alpha | g | ebar0 | beta
    std::vector<double> values;
    std::size_t workers{0};     // 0 = hardware concurrency

    bool operator==(const SweepConfig&) const = default;
};

struct RunConfig {
    ModelParams model;
    std::size_t n_max{40};
    BathConfig bath;
    RunKind kind{RunKind::Lindblad};
    GeneratorRoute route{GeneratorRoute::Factored}; // redfield only
    double t_end{1.0};
    InitialConfig initial;
    IntegratorConfig integrator;
    std::optional<PhaseGrid> grid;
    SemiclassicalConfig semiclassical;
    OutputConfig outputs;
    std::optional<SweepConfig> sweep;

    bool operator==(const RunConfig&) const = default;
};

// Throws std::invalid_argument. Messages start with the offending field path
// ("model.epsilon: ...") or list every unknown key.
RunConfig parse_config(const std::filesystem::path& path);
RunConfig parse_config_json(const nlohmann::json& j);

// Fully resolved canonical form; parse_config_json(emit_config(c)) == c.
nlohmann::json emit_config(const RunConfig& c);

void validate(const RunConfig& c);

// Materialize the bath described by the config (beta taken from the model).
BathModel make_bath(const RunConfig& c);

// Initial populations (lambda, theta) implied by the config.
void initial_populations(const RunConfig& c, Eigen::VectorXd& lambda, Eigen::VectorXd& theta);

// Returns a copy with the sweep parameter set to value.
RunConfig with_parameter(const RunConfig& c, const std::string& parameter, double value);

} // namespace ahsim
