// ahsim_py.cpp — pybind11 bindings for the core library

#include <sstream>

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "ahsim/acceptance.hpp"
#include "ahsim/config.hpp"
#include "ahsim/generators.hpp"
#include "ahsim/runner.hpp"
#include "ahsim/semiclassical.hpp"

namespace py = pybind11;
using namespace ahsim;

namespace {

BathModel as_bath(const py::object& o) {
    if (py::isinstance<WideBand>(o)) return o.cast<WideBand>();
    if (py::isinstance<DiscreteBath>(o)) return o.cast<DiscreteBath>();
    throw py::type_error("bath must be WideBand or DiscreteBath");
}

CoeffSet coeffs_for(const LadderBasis& b, const BathModel& bath) {
    return std::visit([&](const auto& x) { return tabulate_coeffs(b, x); }, bath);
}

py::dict coeff_table(const CoeffSet& c) {
    std::vector<int> omega;
    std::vector<double> energy, aF, bF, aG, bG;
    for (int w = -c.omega_max(); w <= c.omega_max(); ++w) {
        omega.push_back(w);
        energy.push_back(c.energy(w));
        aF.push_back(c.a_F(w));
        bF.push_back(c.b_F(w));
        aG.push_back(c.a_G(w));
        bG.push_back(c.b_G(w));
    }
    py::dict d;
    d["omega"] = omega;
    d["energy"] = energy;
    d["a_F"] = aF;
    d["b_F"] = bF;
    d["a_G"] = aG;
    d["b_G"] = bG;
    return d;
}

Generator make_generator(const std::string& kind, const LadderBasis& b, const CoeffSet& c, const std::string& route) {
    if (kind == "redfield")
        return build_redfield(b, c, route == "omega_resolved" ? GeneratorRoute::OmegaResolved : GeneratorRoute::Factored);
    if (kind == "lindblad") return build_lindblad(b, c);
    if (kind == "von_neumann") return build_von_neumann(b);
    throw py::value_error("kind must be redfield, lindblad or von_neumann");
}

py::dict run_result(const RunResult& r) {
    py::dict d;
    d["ok"] = r.ok;
    d["error"] = r.error;
    d["files"] = r.files;
    d["manifest"] = r.manifest;
    d["seconds"] = r.seconds;
    return d;
}

} // namespace

PYBIND11_MODULE(_ahsim, m) {
    m.doc() = "Anderson-Holstein master equations and classical master equations";
    m.attr("__version__") = AHSIM_VERSION;

    py::class_<ModelParams>(m, "ModelParams")
        .def(py::init([](double epsilon, double alpha, double g, double ebar0, double beta) {
                 ModelParams p{epsilon, alpha, g, ebar0, beta};
                 p.validate();
                 return p;
             }),
             py::arg("epsilon") = 0.5, py::arg("alpha") = 0.05, py::arg("g") = 0.5, py::arg("ebar0") = 0.0,
             py::arg("beta") = 1.0)
        .def_readwrite("epsilon", &ModelParams::epsilon)
        .def_readwrite("alpha", &ModelParams::alpha)
        .def_readwrite("g", &ModelParams::g)
        .def_readwrite("ebar0", &ModelParams::ebar0)
        .def_readwrite("beta", &ModelParams::beta)
        .def_property_readonly("dissipative_scale", &ModelParams::dissipative_scale)
        .def("__repr__", [](const ModelParams& p) {
            std::ostringstream s;
            s << "ModelParams(epsilon=" << p.epsilon << ", alpha=" << p.alpha << ", g=" << p.g
              << ", ebar0=" << p.ebar0 << ", beta=" << p.beta << ")";
            return s.str();
        });

    py::class_<WideBand>(m, "WideBand")
        .def(py::init([](double gamma, double half_width, double beta) { return WideBand{gamma, half_width, beta}; }),
             py::arg("gamma") = 1.0, py::arg("half_width") = std::numeric_limits<double>::infinity(),
             py::arg("beta") = 1.0)
        .def_readwrite("gamma", &WideBand::gamma)
        .def_readwrite("half_width", &WideBand::half_width)
        .def_readwrite("beta", &WideBand::beta);

    py::class_<DiscreteBath>(m, "DiscreteBath")
        .def_static(
            "uniform",
            [](std::size_t n, double e_min, double e_max, double gamma, double beta) {
                return uniform_bath(n, e_min, e_max, gamma, beta);
            },
            py::arg("n_levels"), py::arg("e_min"), py::arg("e_max"), py::arg("gamma"), py::arg("beta"))
        .def_readwrite("beta", &DiscreteBath::beta)
        .def_readwrite("sigma", &DiscreteBath::sigma)
        .def_property_readonly("size", [](const DiscreteBath& b) { return b.levels.size(); });

    m.def("franck_condon", &franck_condon, py::arg("params"), py::arg("n"), py::arg("m"),
          "Overlap <phi_n^0 | phi_m^1>.");
    m.def(
        "fc_matrix", [](const ModelParams& p, std::size_t n) { return build_basis(p, n).fc(); }, py::arg("params"),
        py::arg("n_max"));
    m.def(
        "energies",
        [](const ModelParams& p, std::size_t n) { return build_basis(p, n).hamiltonian_diagonal(); },
        py::arg("params"), py::arg("n_max"));
    m.def(
        "coefficients",
        [](const ModelParams& p, std::size_t n, const py::object& bath) {
            return coeff_table(coeffs_for(build_basis(p, n), as_bath(bath)));
        },
        py::arg("params"), py::arg("n_max"), py::arg("bath"));
    m.def(
        "superoperator",
        [](const std::string& kind, const ModelParams& p, std::size_t n, const py::object& bath,
           const std::string& route) {
            const LadderBasis b = build_basis(p, n);
            return matricize(make_generator(kind, b, coeffs_for(b, as_bath(bath)), route));
        },
        py::arg("kind"), py::arg("params"), py::arg("n_max"), py::arg("bath"), py::arg("route") = "factored",
        "Column-stacked matrix of the generator, shape (4 n_max^2, 4 n_max^2).");
    m.def(
        "apply_generator",
        [](const std::string& kind, const ModelParams& p, std::size_t n, const py::object& bath,
           const Eigen::MatrixXcd& rho, const std::string& route) {
            const LadderBasis b = build_basis(p, n);
            return make_generator(kind, b, coeffs_for(b, as_bath(bath)), route).apply(rho);
        },
        py::arg("kind"), py::arg("params"), py::arg("n_max"), py::arg("bath"), py::arg("rho"),
        py::arg("route") = "factored");
    m.def(
        "propagate",
        [](const std::string& kind, const ModelParams& p, std::size_t n, const py::object& bath,
           const Eigen::MatrixXcd& rho0, double t_end, double dt, std::size_t stride) {
            const LadderBasis b = build_basis(p, n);
            const Generator gen = make_generator(kind, b, coeffs_for(b, as_bath(bath)), "factored");
            IntegratorConfig cfg;
            cfg.dt = dt;
            cfg.t_end = t_end;
            cfg.stride = stride;
            const Trajectory t = propagate(gen, BlockDensity::from_full(rho0), cfg);
            std::vector<Eigen::MatrixXcd> states;
            for (const auto& s : t.states) states.push_back(s.full());
            return py::make_tuple(t.times, states);
        },
        py::arg("kind"), py::arg("params"), py::arg("n_max"), py::arg("bath"), py::arg("rho0"), py::arg("t_end"),
        py::arg("dt") = 0.0, py::arg("stride") = 1);
    m.def(
        "rate_matrices",
        [](const ModelParams& p, std::size_t n, const py::object& bath) {
            const LadderBasis b = build_basis(p, n);
            const RateMatrix r = build_rate_matrix(b, coeffs_for(b, as_bath(bath)));
            return py::make_tuple(r.k01, r.k10);
        },
        py::arg("params"), py::arg("n_max"), py::arg("bath"));
    m.def(
        "wigner",
        [](const ModelParams& p, int k, int level, const Eigen::VectorXd& xs, const Eigen::VectorXd& ps) {
            return wigner_table(p, level, k + 1, xs, ps).back();
        },
        py::arg("params"), py::arg("k"), py::arg("level"), py::arg("x"), py::arg("p"),
        "Wigner function of eigenstate k on surface level, sampled on the tensor grid x by p.");
    m.def(
        "cme_rates",
        [](const ModelParams& p, const py::object& bath, const Eigen::VectorXd& xs, const std::string& variant) {
            if (xs.size() < 2) throw py::value_error("x needs at least two points");
            const double dx = xs(1) - xs(0);
            const auto nx = static_cast<std::size_t>(xs.size());
            const PhaseGrid g{xs(0) - dx / 2, xs(xs.size() - 1) + dx / 2, -1.0, 1.0, std::max<std::size_t>(nx, 16), 16};
            const RateField r = cme_rates(as_bath(bath), p, g, rate_variant_from_string(variant));
            return py::make_tuple(Eigen::VectorXd(r.gamma01.col(0).head(xs.size())),
                                  Eigen::VectorXd(r.gamma10.col(0).head(xs.size())));
        },
        py::arg("params"), py::arg("bath"), py::arg("x"), py::arg("variant") = "wideband-heuristic",
        "Hopping rates gamma01(x), gamma10(x) at evenly spaced positions.");
    m.def(
        "run_config",
        [](const std::string& json_text, const std::string& out_dir) {
            const RunConfig c = parse_config_json(nlohmann::json::parse(json_text));
            RunOptions o;
            o.out_dir = out_dir;
            return run_result(c.sweep ? run_sweep(c, o) : run(c, o));
        },
        py::arg("config_json"), py::arg("out_dir") = ".");
    m.def(
        "canonical_config",
        [](const std::string& json_text) { return emit_config(parse_config_json(nlohmann::json::parse(json_text))).dump(); },
        py::arg("config_json"));
    m.def(
        "check",
        [](const std::vector<int>& only) {
            py::list out;
            for (const auto& r : run_acceptance(only)) out.append(py::make_tuple(r.id, r.name, r.passed, r.detail));
            return out;
        },
        py::arg("only") = std::vector<int>{});
}
