#include "sbridge/bridge.hpp"
#include "sbridge/burgers.hpp"
#include "sbridge/closed_forms.hpp"
#include "sbridge/dynamics.hpp"
#include "sbridge/errors.hpp"
#include "sbridge/gallery.hpp"
#include "sbridge/kernel.hpp"
#include "sbridge/scenario.hpp"

#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace sbridge;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Array to_array(std::span<const double> v) {
    Array out(static_cast<py::ssize_t>(v.size()));
    std::copy(v.begin(), v.end(), out.mutable_data());
    return out;
}

ScalarField to_field(const Grid1D& grid, const Array& a, double t) {
    if (a.ndim() != 1 || static_cast<std::size_t>(a.shape(0)) != grid.size())
        throw ValidationError("array length must equal the number of grid points");
    return ScalarField(grid, std::vector<double>(a.data(), a.data() + a.shape(0)), t);
}

Array series_to_array(const FieldSeries& s) {
    const std::size_t n = s.empty() ? 0 : s.front().size();
    Array out({static_cast<py::ssize_t>(s.size()), static_cast<py::ssize_t>(n)});
    auto m = out.mutable_unchecked<2>();
    for (std::size_t k = 0; k < s.size(); ++k)
        for (std::size_t i = 0; i < n; ++i)
            m(static_cast<py::ssize_t>(k), static_cast<py::ssize_t>(i)) = s[k][i];
    return out;
}

FieldSeries array_to_series(const Grid1D& grid, const TimeGrid& lattice, const Array& a) {
    if (a.ndim() != 2 || static_cast<std::size_t>(a.shape(0)) != lattice.n_slices() ||
        static_cast<std::size_t>(a.shape(1)) != grid.size())
        throw ValidationError("array shape must be (time slices, grid points)");
    FieldSeries out;
    auto m = a.unchecked<2>();
    for (std::size_t k = 0; k < lattice.n_slices(); ++k) {
        std::vector<double> row(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i)
            row[i] = m(static_cast<py::ssize_t>(k), static_cast<py::ssize_t>(i));
        out.emplace_back(grid, std::move(row), lattice.time(k));
    }
    return out;
}

// Vectorized closed-form evaluator.
template <class F>
Array vectorize(F f, const Array& x, double t) {
    Array out(x.request().shape);
    const double* in = x.data();
    double* o = out.mutable_data();
    for (py::ssize_t i = 0; i < x.size(); ++i)
        o[i] = f(in[i], t);
    return out;
}

py::dict solution_dict(const BridgeSolution& sol) {
    py::dict d;
    d["t"] = to_array(sol.lattice.times());
    d["x"] = to_array(sol.grid().nodes());
    d["u"] = series_to_array(sol.u);
    d["v"] = series_to_array(sol.v);
    d["rho"] = series_to_array(sol.rho);
    d["b"] = series_to_array(sol.b);
    d["b_star"] = series_to_array(sol.b_star);
    return d;
}

py::list checks_list(const gallery::CheckReport& r) {
    py::list out;
    for (const auto& c : r.checks) {
        py::dict d;
        d["name"] = c.name;
        d["value"] = c.value;
        d["lower"] = c.lower;
        d["upper"] = c.upper;
        d["pass"] = c.pass;
        out.append(d);
    }
    return out;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Schrodinger bridge toolkit: kernels, boundary systems, diffusions, closed-form gallery";

    auto base = py::register_exception<Error>(m, "Error");
    py::register_exception<NumericDomainError>(m, "NumericDomainError", base.ptr());
    py::register_exception<NormalizationError>(m, "NormalizationError", base.ptr());
    py::register_exception<OrderingError>(m, "OrderingError", base.ptr());
    py::register_exception<PositivityError>(m, "PositivityError", base.ptr());
    py::register_exception<NonConvergenceError>(m, "NonConvergenceError", base.ptr());
    py::register_exception<IncompatibilityError>(m, "IncompatibilityError", base.ptr());
    py::register_exception<PropagationConsistencyError>(m, "PropagationConsistencyError", base.ptr());
    py::register_exception<BoundaryLeakError>(m, "BoundaryLeakError", base.ptr());
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<MissingFileError>(m, "MissingFileError", base.ptr());
    py::register_exception<ValidationError>(m, "ValidationError", base.ptr());

    py::class_<Grid1D>(m, "Grid1D")
        .def(py::init<double, double, std::size_t>(), py::arg("x_min"), py::arg("x_max"), py::arg("n_points"))
        .def_static("standard", &Grid1D::standard)
        .def_property_readonly("x_min", &Grid1D::x_min)
        .def_property_readonly("x_max", &Grid1D::x_max)
        .def_property_readonly("size", &Grid1D::size)
        .def_property_readonly("spacing", &Grid1D::spacing)
        .def("nodes", [](const Grid1D& g) { return to_array(g.nodes()); })
        .def("refined", &Grid1D::refined)
        .def("__repr__", [](const Grid1D& g) {
            return "Grid1D(" + std::to_string(g.x_min()) + ", " + std::to_string(g.x_max()) + ", " +
                   std::to_string(g.size()) + ")";
        });

    py::class_<TimeGrid>(m, "TimeGrid")
        .def(py::init<double, double, std::size_t>(), py::arg("t_start"), py::arg("t_end"), py::arg("n_steps"))
        .def_property_readonly("n_steps", &TimeGrid::n_steps)
        .def_property_readonly("dt", &TimeGrid::dt)
        .def("times", [](const TimeGrid& t) { return to_array(t.times()); });

    py::class_<Kernel>(m, "Kernel")
        .def_static("heat", &Kernel::heat, py::arg("nu") = 1.0)
        .def_static("example1", &Kernel::example1)
        .def_static("quantum_k1", &Kernel::quantum_k1)
        .def_static("pinned_example2", &Kernel::pinned_example2)
        .def_static("quantum_k2", &Kernel::quantum_k2)
        .def_static("markov_family", &Kernel::markov_family, py::arg("label_y"), py::arg("label_s"))
        .def_static(
            "numeric_fk",
            [](const std::string& potential, const Grid1D& grid, double nu, double lam) {
                Potential p = potential == "quantum"    ? Potential::quantum_half_omega()
                              : potential == "constant" ? Potential::constant(lam, nu)
                              : potential == "zero"     ? Potential::zero(nu)
                                                        : throw ValidationError("potential must be zero, constant or quantum");
                return Kernel::numeric_fk(std::move(p), grid);
            },
            py::arg("potential"), py::arg("grid"), py::arg("nu") = 1.0, py::arg("lam") = 0.0)
        .def_property_readonly("tag", [](const Kernel& k) { return std::string(k.tag()); })
        .def_property_readonly("nu", &Kernel::nu)
        .def("__call__", &Kernel::evaluate, py::arg("y"), py::arg("s"), py::arg("x"), py::arg("t"))
        .def(
            "matrix",
            [](const Kernel& k, const Grid1D& g, double s, double t) {
                const KernelMatrix km = kernel_matrix(k, g, s, t);
                return Array({km.entries.rows(), km.entries.cols()},
                             {sizeof(double), sizeof(double) * static_cast<std::size_t>(km.entries.rows())},
                             km.entries.data())
                    .attr("copy")();
            },
            py::arg("grid"), py::arg("s"), py::arg("t"), "entries[i, j] = k(y_i, s, x_j, t)");

    m.def("kernel_tags", &kernel_tags);
    m.def("check_chapman_kolmogorov", &check_chapman_kolmogorov, py::arg("kernel"), py::arg("s"), py::arg("tau"),
          py::arg("t"), py::arg("grid"));
    m.def(
        "short_time_moments",
        [](const Kernel& k, double y, double t, double epsilon) {
            const MomentRates r = short_time_moments(k, y, t, {}, epsilon);
            py::dict d;
            d["leak_rate"] = r.leak_rate;
            d["first_moment_rate"] = r.first_moment_rate;
            d["second_moment_rate"] = r.second_moment_rate;
            d["warning"] = r.warning;
            return d;
        },
        py::arg("kernel"), py::arg("y"), py::arg("t"), py::arg("epsilon") = 1.0);
    m.def(
        "extract_forward_drift", [](const Kernel& k, double x, double t) { return extract_forward_drift(k, x, t); },
        py::arg("kernel"), py::arg("x"), py::arg("t"));
    m.def(
        "propagate_forward",
        [](const Kernel& k, const Grid1D& g, const Array& f, double s, double t) {
            return to_array(propagate_forward(k, to_field(g, f, s), t).values());
        },
        py::arg("kernel"), py::arg("grid"), py::arg("f"), py::arg("s"), py::arg("t"));
    m.def(
        "propagate_backward",
        [](const Kernel& k, const Grid1D& g, const Array& f, double t, double s) {
            return to_array(propagate_backward(k, to_field(g, f, t), s).values());
        },
        py::arg("kernel"), py::arg("grid"), py::arg("g"), py::arg("t"), py::arg("s"));

    m.def(
        "solve_boundary_system",
        [](const Kernel& k, const Grid1D& g, const Array& rho0, const Array& rhoT, double T, double tol,
           std::size_t max_iter) {
            const BoundaryData bd(to_field(g, rho0, 0.0), to_field(g, rhoT, T), T);
            const BridgeFactors f = solve_boundary_system(kernel_matrix(k, g, 0.0, T), bd, IpfOptions{tol, max_iter});
            py::dict d;
            d["u0"] = to_array(f.u0.values());
            d["vT"] = to_array(f.vT.values());
            d["gauge"] = f.gauge;
            d["iterations"] = f.iterations;
            d["residual_history"] = f.residual_history;
            return d;
        },
        py::arg("kernel"), py::arg("grid"), py::arg("rho0"), py::arg("rhoT"), py::arg("T") = 1.0,
        py::arg("tol") = 1e-12, py::arg("max_iter") = 500);
    m.def(
        "solve_bridge",
        [](const Kernel& k, const Grid1D& g, const Array& rho0, const Array& rhoT, double T, std::size_t n_steps,
           double tol) {
            const BoundaryData bd(to_field(g, rho0, 0.0), to_field(g, rhoT, T), T);
            const BridgeFactors f = solve_boundary_system(kernel_matrix(k, g, 0.0, T), bd, IpfOptions{tol, 500});
            return solution_dict(propagate_factors(f, k, TimeGrid(0.0, T, n_steps)));
        },
        py::arg("kernel"), py::arg("grid"), py::arg("rho0"), py::arg("rhoT"), py::arg("T") = 1.0,
        py::arg("n_steps") = 100, py::arg("tol") = 1e-12,
        "Solve the boundary system and propagate; returns t, x and (slices, nodes) arrays u, v, rho, b, b_star.");

    m.def(
        "simulate",
        [](const py::object& drift, const Grid1D& g, const Array& start, double T, bool forward, std::size_t n_paths,
           double dt, std::uint64_t seed, double nu, const std::string& boundary, std::size_t n_records) {
            SDEConfig cfg;
            cfg.nu = nu;
            cfg.n_paths = n_paths;
            cfg.dt = dt;
            cfg.seed = seed;
            cfg.n_records = n_records;
            cfg.boundary = boundary == "absorb" ? BoundaryPolicy::Absorb : BoundaryPolicy::Reflect;
            DriftField b = DriftField::zero();
            if (py::isinstance<py::array>(drift)) {
                const Array a = drift.cast<Array>();
                b = DriftField(array_to_series(g, TimeGrid(0.0, T, static_cast<std::size_t>(a.shape(0)) - 1), a));
            } else if (py::isinstance<py::str>(drift)) {
                const std::string name = drift.cast<std::string>();
                if (name == "packet-forward")
                    b = DriftField(gallery::forward_drift);
                else if (name == "packet-backward")
                    b = DriftField(gallery::backward_drift);
                else if (name != "zero")
                    throw ValidationError("drift name must be packet-forward, packet-backward or zero");
            } else if (!drift.is_none()) {
                b = DriftField(drift.cast<std::function<double(double, double)>>());
            }
            PathEnsemble ens;
            {
                py::gil_scoped_release release;
                ens = forward ? simulate_forward(b, to_field(g, start, 0.0), cfg, T)
                              : simulate_backward(b, to_field(g, start, T), cfg, T);
            }
            const auto rows = static_cast<py::ssize_t>(ens.positions.size() / ens.n_slices());
            Array pos({rows, static_cast<py::ssize_t>(ens.n_slices())});
            std::copy(ens.positions.begin(), ens.positions.end(), pos.mutable_data());
            py::dict d;
            d["t"] = to_array(ens.times);
            d["positions"] = pos;
            d["live_paths"] = ens.live_paths;
            return d;
        },
        py::arg("drift"), py::arg("grid"), py::arg("start"), py::arg("T") = 1.0, py::arg("forward") = true,
        py::arg("n_paths") = 100000, py::arg("dt") = 1e-3, py::arg("seed") = 0, py::arg("nu") = 1.0,
        py::arg("boundary") = "reflect", py::arg("n_records") = 10,
        "drift: None, 'zero', 'packet-forward', 'packet-backward', a callable b(x, t), or a (slices, nodes) lattice "
        "array on [0, T]. Positions have shape (paths, records + 1); absorbed samples are NaN.");

    m.def(
        "hopf_cole_forward",
        [](const Grid1D& g, const Array& theta, double nu) {
            return to_array(hopf_cole_forward(to_field(g, theta, 0.0), nu).values());
        },
        py::arg("grid"), py::arg("theta"), py::arg("nu"));
    m.def(
        "hopf_cole_inverse",
        [](const Grid1D& g, const Array& v, double nu, std::size_t anchor) {
            return to_array(hopf_cole_inverse(to_field(g, v, 0.0), nu, anchor).values());
        },
        py::arg("grid"), py::arg("v"), py::arg("nu"), py::arg("anchor"));
    m.def(
        "burgers_residual",
        [](const Grid1D& g, const TimeGrid& l, const Array& v, double nu, const Array& force) {
            return burgers_residual(array_to_series(g, l, v), nu, array_to_series(g, l, force));
        },
        py::arg("grid"), py::arg("lattice"), py::arg("v"), py::arg("nu"), py::arg("force"));

    py::module_ gal = m.def_submodule("gallery", "closed-form free packet and the scenario suites");
    gal.def("rho", [](const Array& x, double t) { return vectorize(gallery::rho, x, t); }, py::arg("x"), py::arg("t"));
    gal.def("theta", [](const Array& x, double t) { return vectorize(gallery::theta, x, t); }, py::arg("x"), py::arg("t"));
    gal.def("theta_star", [](const Array& x, double t) { return vectorize(gallery::theta_star, x, t); }, py::arg("x"),
            py::arg("t"));
    gal.def("half_omega", [](const Array& x, double t) { return vectorize(gallery::half_omega, x, t); }, py::arg("x"),
            py::arg("t"));
    gal.def("forward_drift", [](const Array& x, double t) { return vectorize(gallery::forward_drift, x, t); },
            py::arg("x"), py::arg("t"));
    gal.def("backward_drift", [](const Array& x, double t) { return vectorize(gallery::backward_drift, x, t); },
            py::arg("x"), py::arg("t"));
    gal.def("current_velocity", [](const Array& x, double t) { return vectorize(gallery::current_velocity, x, t); },
            py::arg("x"), py::arg("t"));
    gal.def("psi", &gallery::psi, py::arg("x"), py::arg("t"));
    gal.def("scenario_names", &gallery::scenario_names);
    gal.def(
        "run_scenario",
        [](const std::string& name) {
            const auto r = gallery::run_scenario(name);
            py::dict d;
            d["scenario"] = r.scenario;
            d["passed"] = r.passed();
            d["checks"] = checks_list(r);
            return d;
        },
        py::arg("name"));

    m.def(
        "run_config",
        [](const std::string& text, const std::filesystem::path& out_dir) {
            ConfigMap map = ConfigMap::parse(text, "<string>");
            map.set("output.dir", out_dir.string());
            const RunReport r = run(ScenarioConfig::from_map(map));
            return r.to_json();
        },
        py::arg("text"), py::arg("out_dir"), "Run a key = value configuration; returns the JSON report.");
}
