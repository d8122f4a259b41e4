#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "reiflab/errors.hpp"
#include "reiflab/experiment.hpp"
#include "reiflab/parallel.hpp"

namespace py = pybind11;
using namespace reiflab;

namespace {

py::array_t<std::uint8_t> mask_array(const GridDomain& dom) {
  std::vector<py::ssize_t> shape;
  for (int d = 0; d < dom.dim(); ++d) shape.push_back(dom.shape()[d]);
  py::array_t<std::uint8_t> out(shape);
  std::copy(dom.mask().begin(), dom.mask().end(), out.mutable_data());
  return out;
}

py::array_t<double> values_array(const LatticeField& u) {
  std::vector<py::ssize_t> shape;
  for (int d = 0; d < u.domain().dim(); ++d) shape.push_back(u.domain().shape()[d]);
  py::array_t<double> out(shape);
  std::copy(u.values().begin(), u.values().end(), out.mutable_data());
  return out;
}

py::dict report_dict(const SolveReport& r) {
  py::dict d;
  d["iterations"] = r.iterations;
  d["relative_residual"] = r.relative_residual;
  d["energy"] = r.energy;
  d["converged"] = r.converged;
  d["error_energy_bound"] = r.error_energy_bound;
  return d;
}

ExperimentConfig load(const std::filesystem::path& config, std::optional<std::uint64_t> seed, int threads) {
  if (threads > 0) set_thread_count(threads);
  return load_config(config, seed);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Lattice experiments for higher-order elliptic problems";

  static py::exception<InvalidInput> invalid(m, "InvalidInput", PyExc_ValueError);
  static py::exception<SolverError> solver(m, "SolverError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const InvalidInput& e) {
      PyErr_SetString(invalid.ptr(), e.what());
    } catch (const SolverError& e) {
      PyErr_SetString(solver.ptr(), e.what());
    }
  });

  py::class_<GridDomain, std::shared_ptr<GridDomain>>(m, "Domain")
      .def_property_readonly("dim", &GridDomain::dim)
      .def_property_readonly("h", &GridDomain::spacing)
      .def_property_readonly("label", &GridDomain::label)
      .def_property_readonly("inside_count", &GridDomain::inside_count)
      .def_property_readonly("lo", [](const GridDomain& d) {
        return std::vector<std::int64_t>(d.lo().begin(), d.lo().begin() + d.dim());
      })
      .def_property_readonly("mask", &mask_array)
      .def_property_readonly("params", [](const GridDomain& d) { return d.params().dump(); });

  const auto domain = [](DomainPtr p) { return std::const_pointer_cast<GridDomain>(p); };
  m.def("ball", [=](double R, double h, int dim) { return domain(ball_domain(R, h, dim)); }, py::arg("R"),
        py::arg("h"), py::arg("dim") = 2);
  m.def("half_space_ball", [=](double R, double h, int dim) { return domain(half_space_ball(R, h, dim)); },
        py::arg("R"), py::arg("h"), py::arg("dim") = 2);
  m.def("cone", [=](double omega, double R, double h) { return domain(cone_domain(omega, R, h)); }, py::arg("omega"),
        py::arg("R"), py::arg("h"));
  m.def("koch", [=](double delta, int depth, double R, double h, int sides) {
        return domain(koch_domain(delta, depth, R, h, sides));
      },
        py::arg("delta"), py::arg("depth"), py::arg("R"), py::arg("h"), py::arg("sides") = 6);

  m.def("flatness", [](const std::shared_ptr<GridDomain>& dom, std::vector<double> radii, std::size_t n_centers,
                       std::uint64_t seed) { return measure_flatness(*dom, radii, n_centers, seed).eps_max; },
        py::arg("domain"), py::arg("radii"), py::arg("n_centers") = 32, py::arg("seed") = 1,
        "Largest sampled flatness ratio eps(x, r).");

  m.def("ellipticity_constant", [](int N, int m_) { return ellipticity_constant(EllipticOperator::polyharmonic(N, m_)); },
        py::arg("N"), py::arg("m"), "Smallest eigenvalue of the polyharmonic coefficient matrix.");

  m.def("solve",
        [](const std::filesystem::path& config, std::optional<std::uint64_t> seed, int threads) {
          const auto cfg = load(config, seed, threads);
          const auto sol = solve_problem(cfg);
          return py::make_tuple(values_array(sol.u), report_dict(sol.report));
        },
        py::arg("config"), py::arg("seed") = py::none(), py::arg("threads") = 0,
        "Solve the configured problem; returns (values on the box, report).");

  using Path = const std::filesystem::path&;
  m.def("run_solve", [](Path c, Path out, std::optional<std::uint64_t> seed, int threads) {
        return report_dict(run_solve(load(c, seed, threads), out).report);
      },
        py::arg("config"), py::arg("out"), py::arg("seed") = py::none(), py::arg("threads") = 0);
  m.def("run_decay", [](Path c, Path out, std::optional<std::uint64_t> seed, int threads) {
        std::vector<double> p;
        for (const auto& r : run_decay(load(c, seed, threads), out)) p.push_back(r.fitted_exponent);
        return p;
      },
        py::arg("config"), py::arg("out"), py::arg("seed") = py::none(), py::arg("threads") = 0,
        "Writes decay.csv and decay_summary.csv; returns the fitted exponent per center.");
  m.def("run_holder", [](Path c, Path out, std::optional<std::uint64_t> seed, int threads) {
        std::vector<double> a;
        for (const auto& r : run_holder(load(c, seed, threads), out)) a.push_back(r.exponent_estimate);
        return a;
      },
        py::arg("config"), py::arg("out"), py::arg("seed") = py::none(), py::arg("threads") = 0);
  m.def("run_flatness", [](Path c, Path out, std::optional<std::uint64_t> seed, int threads) {
        return run_flatness(load(c, seed, threads), out).eps_max;
      },
        py::arg("config"), py::arg("out"), py::arg("seed") = py::none(), py::arg("threads") = 0);
  m.def("run_verify", [](Path c, Path out, std::optional<std::uint64_t> seed, int threads) {
        py::list rows;
        for (const auto& v : run_verify(load(c, seed, threads), out))
          rows.append(py::make_tuple(v.name, v.margin, v.tolerance, v.verdict));
        return rows;
      },
        py::arg("config"), py::arg("out"), py::arg("seed") = py::none(), py::arg("threads") = 0,
        "Writes verify.csv; returns (name, margin, tolerance, verdict) rows.");
}
