// config.cpp — JSON run configuration

#include "ahsim/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace ahsim {

using nlohmann::json;

std::string to_string(RunKind k) {
    switch (k) {
    case RunKind::Redfield: return "redfield";
    case RunKind::Lindblad: return "lindblad";
    case RunKind::Rates: return "rates";
    case RunKind::Cme: return "cme";
    case RunKind::Lcme: return "lcme";
    case RunKind::Coeffs: return "coeffs";
    }
    return "unknown";
}

std::string to_string(BathKind k) {
    switch (k) {
    case BathKind::Wideband: return "wideband";
    case BathKind::Discrete: return "discrete";
    case BathKind::Uniform: return "uniform";
    }
    return "unknown";
}

std::string to_string(InitialKind k) {
    switch (k) {
    case InitialKind::Eigenstate: return "eigenstate";
    case InitialKind::Populations: return "populations";
    case InitialKind::Thermal: return "thermal";
    }
    return "unknown";
}

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw std::invalid_argument(path + ": " + what);
}

// Reads keys from one JSON object and remembers which ones were consumed.
class Section {
public:
    Section(const json* obj, std::string path, std::vector<std::string>& unknown)
        : obj_(obj), path_(std::move(path)), unknown_(unknown) {
        if (obj_ && !obj_->is_object()) fail(path_, "must be an object");
    }
    ~Section() = default;

    bool present() const { return obj_ != nullptr; }
    bool has(const std::string& key) const { return obj_ && obj_->contains(key); }
    std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    const json* child(const std::string& key) {
        if (!has(key)) return nullptr;
        used_.insert(key);
        return &(*obj_)[key];
    }

    double number(const std::string& key, double fallback) {
        const json* v = child(key);
        if (!v) return fallback;
        return to_number(*v, at(key));
    }

    static double to_number(const json& v, const std::string& path) {
        if (v.is_number()) return v.get<double>();
        if (v.is_string()) {
            const auto s = v.get<std::string>();
            if (s == "inf" || s == "infinity" || s == "+inf") return std::numeric_limits<double>::infinity();
            if (s == "-inf" || s == "-infinity") return -std::numeric_limits<double>::infinity();
        }
        fail(path, "expected a number (or \"inf\")");
    }

    std::size_t count(const std::string& key, std::size_t fallback) {
        const json* v = child(key);
        if (!v) return fallback;
        if (!v->is_number_integer() || v->get<long long>() < 0) fail(at(key), "expected a nonnegative integer");
        return v->get<std::size_t>();
    }

    int integer(const std::string& key, int fallback) {
        const json* v = child(key);
        if (!v) return fallback;
        if (!v->is_number_integer()) fail(at(key), "expected an integer");
        return v->get<int>();
    }

    bool boolean(const std::string& key, bool fallback) {
        const json* v = child(key);
        if (!v) return fallback;
        if (!v->is_boolean()) fail(at(key), "expected true or false");
        return v->get<bool>();
    }

    std::string string(const std::string& key, const std::string& fallback) {
        const json* v = child(key);
        if (!v) return fallback;
        if (!v->is_string()) fail(at(key), "expected a string");
        return v->get<std::string>();
    }

    std::vector<double> numbers(const std::string& key) {
        const json* v = child(key);
        if (!v) return {};
        if (!v->is_array()) fail(at(key), "expected an array of numbers");
        std::vector<double> out;
        for (std::size_t i = 0; i < v->size(); ++i)
            out.push_back(to_number((*v)[i], at(key) + "[" + std::to_string(i) + "]"));
        return out;
    }

    void finish() {
        if (!obj_) return;
        for (auto it = obj_->begin(); it != obj_->end(); ++it)
            if (!used_.count(it.key())) unknown_.push_back(at(it.key()));
    }

private:
    const json* obj_;
    std::string path_;
    std::vector<std::string>& unknown_;
    std::set<std::string> used_;
};

json number_json(double v) {
    if (std::isinf(v)) return v > 0 ? json("inf") : json("-inf");
    return json(v);
}

template <typename E>
E pick(const std::string& path, const std::string& value, std::initializer_list<std::pair<const char*, E>> options) {
    std::string names;
    for (const auto& [name, e] : options) {
        if (value == name) return e;
        names += names.empty() ? name : std::string(" | ") + name;
    }
    fail(path, "unknown value '" + value + "' (expected " + names + ")");
}

} // namespace

RunConfig parse_config_json(const json& root) {
    if (!root.is_object()) throw std::invalid_argument("config: top level must be a JSON object");
    std::vector<std::string> unknown;
    RunConfig c;
    Section top(&root, "", unknown);

    {
        Section s(top.child("model"), "model", unknown);
        c.model.epsilon = s.number("epsilon", c.model.epsilon);
        c.model.alpha = s.number("alpha", c.model.alpha);
        c.model.g = s.number("g", c.model.g);
        c.model.ebar0 = s.number("ebar0", c.model.ebar0);
        c.model.beta = s.number("beta", c.model.beta);
        s.finish();
    }
    {
        Section s(top.child("basis"), "basis", unknown);
        c.n_max = s.count("n_max", c.n_max);
        s.finish();
    }
    {
        Section s(top.child("bath"), "bath", unknown);
        c.bath.kind = pick<BathKind>("bath.type", s.string("type", "wideband"),
                                     {{"wideband", BathKind::Wideband},
                                      {"discrete", BathKind::Discrete},
                                      {"uniform", BathKind::Uniform}});
        if (c.bath.kind == BathKind::Wideband) {
            c.bath.gamma = s.number("gamma", c.bath.gamma);
            c.bath.half_width = s.number("half_width", c.bath.half_width);
        } else {
            if (s.has("sigma")) c.bath.sigma = s.number("sigma", 0.0);
        }
        if (c.bath.kind == BathKind::Discrete) {
            const json* lv = s.child("levels");
            if (!lv) fail("bath.levels", "required for bath.type = discrete");
            if (!lv->is_array()) fail("bath.levels", "expected an array of [energy, coupling] pairs");
            for (std::size_t i = 0; i < lv->size(); ++i) {
                const auto& e = (*lv)[i];
                const std::string p = "bath.levels[" + std::to_string(i) + "]";
                if (!e.is_array() || e.size() != 2) fail(p, "expected [energy, coupling]");
                c.bath.levels.push_back({Section::to_number(e[0], p + "[0]"), Section::to_number(e[1], p + "[1]")});
            }
        }
        if (c.bath.kind == BathKind::Uniform) {
            c.bath.n_levels = s.count("n_levels", c.bath.n_levels);
            c.bath.e_min = s.number("e_min", c.bath.e_min);
            c.bath.e_max = s.number("e_max", c.bath.e_max);
            c.bath.gamma = s.number("gamma", c.bath.gamma);
        }
        s.finish();
    }
    {
        Section s(top.child("run"), "run", unknown);
        c.kind = pick<RunKind>("run.kind", s.string("kind", "lindblad"),
                               {{"redfield", RunKind::Redfield},
                                {"lindblad", RunKind::Lindblad},
                                {"rates", RunKind::Rates},
                                {"cme", RunKind::Cme},
                                {"lcme", RunKind::Lcme},
                                {"coeffs", RunKind::Coeffs}});
        c.route = pick<GeneratorRoute>("run.route", s.string("route", "factored"),
                                       {{"factored", GeneratorRoute::Factored},
                                        {"omega_resolved", GeneratorRoute::OmegaResolved}});
        c.t_end = s.number("t_end", c.t_end);
        s.finish();
    }
    {
        Section s(top.child("initial"), "initial", unknown);
        c.initial.kind = pick<InitialKind>("initial.type", s.string("type", "eigenstate"),
                                           {{"eigenstate", InitialKind::Eigenstate},
                                            {"populations", InitialKind::Populations},
                                            {"thermal", InitialKind::Thermal}});
        if (c.initial.kind == InitialKind::Eigenstate) {
            c.initial.k = s.count("k", 0);
            c.initial.level = s.integer("level", 0);
        } else if (c.initial.kind == InitialKind::Populations) {
            c.initial.lambda = s.numbers("lambda");
            c.initial.theta = s.numbers("theta");
        }
        s.finish();
    }
    {
        Section s(top.child("integrator"), "integrator", unknown);
        c.integrator.method = pick<IntegratorMethod>("integrator.method", s.string("method", "rk4"),
                                                     {{"rk4", IntegratorMethod::RK4},
                                                      {"dopri5", IntegratorMethod::DormandPrince}});
        c.integrator.dt = s.number("dt", 0.0);
        c.integrator.tolerance = s.number("tolerance", c.integrator.tolerance);
        c.integrator.stride = s.count("stride", c.integrator.stride);
        s.finish();
    }
    if (const json* g = top.child("grid")) {
        Section s(g, "grid", unknown);
        PhaseGrid grid;
        grid.x_min = s.number("x_min", grid.x_min);
        grid.x_max = s.number("x_max", grid.x_max);
        grid.p_min = s.number("p_min", grid.p_min);
        grid.p_max = s.number("p_max", grid.p_max);
        grid.nx = s.count("nx", grid.nx);
        grid.np = s.count("np", grid.np);
        c.grid = grid;
        s.finish();
    }
    {
        Section s(top.child("semiclassical"), "semiclassical", unknown);
        const std::string v = s.string("rate_variant", "wideband-heuristic");
        try {
            c.semiclassical.rate_variant = rate_variant_from_string(v);
        } catch (const std::invalid_argument& e) {
            fail("semiclassical.rate_variant", e.what());
        }
        c.semiclassical.cfl = s.number("cfl", c.semiclassical.cfl);
        c.semiclassical.dt = s.number("dt", c.semiclassical.dt);
        c.semiclassical.k_on = s.integer("k_on", c.semiclassical.k_on);
        c.semiclassical.k_off = s.integer("k_off", c.semiclassical.k_off);
        s.finish();
    }
    {
        Section s(top.child("outputs"), "outputs", unknown);
        c.outputs.prefix = s.string("prefix", c.outputs.prefix);
        c.outputs.superoperator = s.boolean("superoperator", c.outputs.superoperator);
        c.outputs.snapshots = s.boolean("snapshots", c.outputs.snapshots);
        s.finish();
    }
    if (const json* sw = top.child("sweep")) {
        Section s(sw, "sweep", unknown);
        SweepConfig sc;
        sc.parameter = s.string("parameter", sc.parameter);
        sc.values = s.numbers("values");
        sc.workers = s.count("workers", sc.workers);
        c.sweep = sc;
        s.finish();
    }
    top.finish();

    if (!unknown.empty()) {
        std::string list;
        for (const auto& k : unknown) list += (list.empty() ? "" : ", ") + k;
        throw std::invalid_argument("config: unknown keys: " + list);
    }
    c.integrator.t_end = c.t_end;
    validate(c);
    return c;
}

RunConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open " + path.string());
    json j;
    try {
        j = json::parse(in, nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument("config: " + path.string() + ": " + e.what());
    }
    return parse_config_json(j);
}

void validate(const RunConfig& c) {
    const auto& m = c.model;
    if (!(m.epsilon > 0.0) || !std::isfinite(m.epsilon)) fail("model.epsilon", "must be finite and > 0");
    if (!(m.alpha >= 0.0) || !std::isfinite(m.alpha)) fail("model.alpha", "must be finite and >= 0");
    if (!(m.beta > 0.0)) fail("model.beta", "must be > 0 (\"inf\" allowed)");
    if (!std::isfinite(m.g)) fail("model.g", "must be finite");
    if (!std::isfinite(m.ebar0)) fail("model.ebar0", "must be finite");
    if (c.n_max < 2) fail("basis.n_max", "must be >= 2");

    const auto& b = c.bath;
    if (b.kind == BathKind::Wideband) {
        if (!(b.gamma > 0.0) || !std::isfinite(b.gamma)) fail("bath.gamma", "must be finite and > 0");
        if (!(b.half_width > 0.0)) fail("bath.half_width", "must be > 0 (\"inf\" allowed)");
    } else {
        if (b.sigma && !(*b.sigma > 0.0)) fail("bath.sigma", "must be > 0");
    }
    if (b.kind == BathKind::Discrete) {
        if (b.levels.empty()) fail("bath.levels", "must not be empty");
        if (b.levels.size() == 1 && !b.sigma) fail("bath.sigma", "required when the bath has a single level");
        for (std::size_t i = 0; i < b.levels.size(); ++i)
            if (!std::isfinite(b.levels[i].energy) || !std::isfinite(b.levels[i].coupling))
                fail("bath.levels[" + std::to_string(i) + "]", "must be finite");
    }
    if (b.kind == BathKind::Uniform) {
        if (b.n_levels < 2) fail("bath.n_levels", "must be >= 2");
        if (!(b.e_max > b.e_min)) fail("bath.e_max", "must exceed bath.e_min");
        if (!(b.gamma > 0.0)) fail("bath.gamma", "must be > 0");
    }

    if (!(c.t_end >= 0.0) || !std::isfinite(c.t_end)) fail("run.t_end", "must be finite and >= 0");

    const auto& ini = c.initial;
    if (ini.kind == InitialKind::Eigenstate) {
        if (ini.k >= c.n_max) fail("initial.k", "must be < basis.n_max = " + std::to_string(c.n_max));
        if (ini.level != 0 && ini.level != 1) fail("initial.level", "must be 0 or 1");
    } else if (ini.kind == InitialKind::Populations) {
        if (ini.lambda.size() > c.n_max) fail("initial.lambda", "longer than basis.n_max");
        if (ini.theta.size() > c.n_max) fail("initial.theta", "longer than basis.n_max");
        double sum = 0.0;
        for (double v : ini.lambda) {
            if (!(v >= 0.0)) fail("initial.lambda", "populations must be >= 0");
            sum += v;
        }
        for (double v : ini.theta) {
            if (!(v >= 0.0)) fail("initial.theta", "populations must be >= 0");
            sum += v;
        }
        if (std::abs(sum - 1.0) > 1e-12) fail("initial", "lambda and theta must sum to 1");
    }

    const auto& it = c.integrator;
    if (it.dt < 0.0) fail("integrator.dt", "must be >= 0 (0 = default)");
    if (!(it.tolerance > 0.0)) fail("integrator.tolerance", "must be > 0");
    if (it.stride == 0) fail("integrator.stride", "must be >= 1");

    const bool semiclassical = c.kind == RunKind::Cme || c.kind == RunKind::Lcme;
    if (semiclassical && !c.grid) fail("grid", "section required for run.kind = " + to_string(c.kind));
    if (c.grid) {
        const auto& g = *c.grid;
        if (!(g.x_max > g.x_min)) fail("grid.x_max", "must exceed grid.x_min");
        if (!(g.p_max > g.p_min)) fail("grid.p_max", "must exceed grid.p_min");
        if (g.nx < 16) fail("grid.nx", "must be >= 16");
        if (g.np < 16) fail("grid.np", "must be >= 16");
    }
    const auto& sc = c.semiclassical;
    if (!(sc.cfl > 0.0 && sc.cfl <= 1.0)) fail("semiclassical.cfl", "must be in (0, 1]");
    if (sc.dt < 0.0) fail("semiclassical.dt", "must be >= 0");
    if (c.kind == RunKind::Cme && sc.rate_variant == RateVariant::LcmeEigenstate)
        fail("semiclassical.rate_variant", "lcme-eigenstate belongs to run.kind = lcme");
    if ((sc.k_on >= 0) != (sc.k_off >= 0)) fail("semiclassical.k_off", "set k_on and k_off together");
    if (sc.k_on >= 0 && !(sc.k_on >= 1 && sc.k_on < sc.k_off && static_cast<std::size_t>(sc.k_off) <= c.n_max))
        fail("semiclassical.k_on", "need 1 <= k_on < k_off <= basis.n_max");

    if (c.outputs.prefix.empty() || c.outputs.prefix.find('/') != std::string::npos)
        fail("outputs.prefix", "must be a non-empty file name stem");
    if (c.outputs.superoperator && c.n_max > 16) fail("outputs.superoperator", "requires basis.n_max <= 16");

    if (c.sweep) {
        static const std::set<std::string> allowed{"epsilon", "alpha", "g", "ebar0", "beta"};
        if (!allowed.count(c.sweep->parameter))
            fail("sweep.parameter", "must be one of epsilon | alpha | g | ebar0 | beta");
        if (c.sweep->values.empty()) fail("sweep.values", "must not be empty");
        for (double v : c.sweep->values) {
            RunConfig probe = with_parameter(c, c.sweep->parameter, v);
            probe.sweep.reset();
            try {
                validate(probe);
            } catch (const std::invalid_argument& e) {
                fail("sweep.values", std::string("value ") + std::to_string(v) + " invalid: " + e.what());
            }
        }
    }
}

json emit_config(const RunConfig& c) {
    json j;
    j["model"] = {{"epsilon", number_json(c.model.epsilon)},
                  {"alpha", number_json(c.model.alpha)},
                  {"g", number_json(c.model.g)},
                  {"ebar0", number_json(c.model.ebar0)},
                  {"beta", number_json(c.model.beta)}};
    j["basis"] = {{"n_max", c.n_max}};
    json b = {{"type", to_string(c.bath.kind)}};
    if (c.bath.kind == BathKind::Wideband) {
        b["gamma"] = number_json(c.bath.gamma);
        b["half_width"] = number_json(c.bath.half_width);
    } else {
        if (c.bath.sigma) b["sigma"] = number_json(*c.bath.sigma);
    }
    if (c.bath.kind == BathKind::Discrete) {
        json lv = json::array();
        for (const auto& l : c.bath.levels) lv.push_back({number_json(l.energy), number_json(l.coupling)});
        b["levels"] = lv;
    }
    if (c.bath.kind == BathKind::Uniform) {
        b["n_levels"] = c.bath.n_levels;
        b["e_min"] = number_json(c.bath.e_min);
        b["e_max"] = number_json(c.bath.e_max);
        b["gamma"] = number_json(c.bath.gamma);
    }
    j["bath"] = b;
    j["run"] = {{"kind", to_string(c.kind)}, {"route", to_string(c.route)}, {"t_end", number_json(c.t_end)}};
    json ini = {{"type", to_string(c.initial.kind)}};
    if (c.initial.kind == InitialKind::Eigenstate) {
        ini["k"] = c.initial.k;
        ini["level"] = c.initial.level;
    } else if (c.initial.kind == InitialKind::Populations) {
        ini["lambda"] = c.initial.lambda;
        ini["theta"] = c.initial.theta;
    }
    j["initial"] = ini;
    j["integrator"] = {{"method", c.integrator.method == IntegratorMethod::RK4 ? "rk4" : "dopri5"},
                       {"dt", number_json(c.integrator.dt)},
                       {"tolerance", number_json(c.integrator.tolerance)},
                       {"stride", c.integrator.stride}};
    if (c.grid)
        j["grid"] = {{"x_min", number_json(c.grid->x_min)}, {"x_max", number_json(c.grid->x_max)},
                     {"p_min", number_json(c.grid->p_min)}, {"p_max", number_json(c.grid->p_max)},
                     {"nx", c.grid->nx},                     {"np", c.grid->np}};
    j["semiclassical"] = {{"rate_variant", to_string(c.semiclassical.rate_variant)},
                          {"cfl", number_json(c.semiclassical.cfl)},
                          {"dt", number_json(c.semiclassical.dt)},
                          {"k_on", c.semiclassical.k_on},
                          {"k_off", c.semiclassical.k_off}};
    j["outputs"] = {{"prefix", c.outputs.prefix},
                    {"superoperator", c.outputs.superoperator},
                    {"snapshots", c.outputs.snapshots}};
    if (c.sweep)
        j["sweep"] = {{"parameter", c.sweep->parameter}, {"values", c.sweep->values}, {"workers", c.sweep->workers}};
    return j;
}

BathModel make_bath(const RunConfig& c) {
    const auto& b = c.bath;
    switch (b.kind) {
    case BathKind::Wideband: {
        WideBand wb{b.gamma, b.half_width, c.model.beta};
        wb.validate();
        return wb;
    }
    case BathKind::Uniform: return uniform_bath(b.n_levels, b.e_min, b.e_max, b.gamma, c.model.beta, b.sigma);
    case BathKind::Discrete: {
        DiscreteBath db;
        db.levels = b.levels;
        db.beta = c.model.beta;
        if (b.sigma) {
            db.sigma = *b.sigma;
        } else {
            double lo = b.levels.front().energy, hi = lo;
            for (const auto& l : b.levels) {
                lo = std::min(lo, l.energy);
                hi = std::max(hi, l.energy);
            }
            const double spacing = (hi - lo) / static_cast<double>(b.levels.size() - 1);
            if (!(spacing > 0.0)) fail("bath.sigma", "required when all levels are degenerate");
            db.sigma = 2.0 * spacing;
        }
        db.validate();
        return db;
    }
    }
    throw std::logic_error("make_bath: unknown bath kind");
}

void initial_populations(const RunConfig& c, Eigen::VectorXd& lambda, Eigen::VectorXd& theta) {
    const auto n = static_cast<Eigen::Index>(c.n_max);
    lambda = Eigen::VectorXd::Zero(n);
    theta = Eigen::VectorXd::Zero(n);
    switch (c.initial.kind) {
    case InitialKind::Eigenstate:
        (c.initial.level == 0 ? lambda : theta)[static_cast<Eigen::Index>(c.initial.k)] = 1.0;
        return;
    case InitialKind::Populations:
        for (std::size_t k = 0; k < c.initial.lambda.size(); ++k) lambda[static_cast<Eigen::Index>(k)] = c.initial.lambda[k];
        for (std::size_t k = 0; k < c.initial.theta.size(); ++k) theta[static_cast<Eigen::Index>(k)] = c.initial.theta[k];
        return;
    case InitialKind::Thermal: {
        const double eps = c.model.epsilon;
        Eigen::VectorXd e(2 * n);
        for (Eigen::Index k = 0; k < n; ++k) {
            e[k] = eps * (static_cast<double>(k) + 0.5);
            e[n + k] = e[k] + c.model.ebar0;
        }
        const double e0 = e.minCoeff();
        Eigen::VectorXd w(2 * n);
        for (Eigen::Index i = 0; i < 2 * n; ++i) {
            const double de = e[i] - e0;
            w[i] = std::isinf(c.model.beta) ? (de <= 1e-14 * std::max(1.0, std::abs(e0)) ? 1.0 : 0.0)
                                            : std::exp(-c.model.beta * de);
        }
        w /= w.sum();
        lambda = w.head(n);
        theta = w.tail(n);
        return;
    }
    }
}

RunConfig with_parameter(const RunConfig& c, const std::string& parameter, double value) {
    RunConfig out = c;
    if (parameter == "epsilon") out.model.epsilon = value;
    else if (parameter == "alpha") out.model.alpha = value;
    else if (parameter == "g") out.model.g = value;
    else if (parameter == "ebar0") out.model.ebar0 = value;
    else if (parameter == "beta") out.model.beta = value;
    else fail("sweep.parameter", "unknown parameter '" + parameter + "'");
    return out;
}

} // namespace ahsim
