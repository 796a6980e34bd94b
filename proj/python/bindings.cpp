#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fstefan/fbp.hpp"
#include "fstefan/io.hpp"
#include "fstefan/props.hpp"

namespace py = pybind11;
using namespace fstefan;

namespace {

FbpRun run_config(const RunConfig& cfg) {
  validate_config(cfg);
  const Grid g(cfg.n_cells);
  const FracWeights w = build_weights(cfg.alpha, g);
  FbpOptions opt;
  opt.output_every = cfg.output_every;
  opt.advection = cfg.advection == "explicit" ? AdvectionMode::Explicit : AdvectionMode::Implicit;
  opt.blend = Blend{cfg.blend_lo, cfg.blend_hi};
  const StefanProblem pb = make_problem(cfg, g);
  if (cfg.mode == "fixed-point")
    return fixed_point_P(pb, resting_front(pb.b, time_grid(pb.t_start, pb.horizon, cfg.dt)), cfg.max_iters,
                         cfg.fp_tol, g, w, opt);
  return solve_fbp(pb, g, w, cfg.dt, opt);
}

py::dict report_dict(const PropertyReport& r) {
  py::dict d;
  d["name"] = r.name;
  d["status"] = to_string(r.status);
  d["worst_violation"] = r.worst_violation;
  d["x"] = r.x;
  d["t"] = r.t;
  d["tolerance"] = r.tolerance;
  d["note"] = r.note;
  return d;
}

}  // namespace

PYBIND11_MODULE(_fstefan, m) {
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);

  m.def("ml3", [](double a, double b, double g, double z) { return ml3(MLParams{a, b, g}, z).value; },
        py::arg("a"), py::arg("b"), py::arg("g"), py::arg("z"));
  m.def("eta", [](double alpha, double h0, double tol) { return eta_solve(alpha, h0, tol); }, py::arg("alpha"),
        py::arg("h0") = 1.0, py::arg("tol") = 1e-12);
  m.def("h_alpha", [](double alpha, double h0, double x) { return h_alpha(alpha, h0, x, 1e-12); }, py::arg("alpha"),
        py::arg("h0"), py::arg("x"));

  py::class_<AnalyticBenchmark>(m, "AnalyticBenchmark")
      .def(py::init([](double alpha, double h0) { return AnalyticBenchmark(alpha, h0); }), py::arg("alpha"),
           py::arg("h0") = 1.0)
      .def_property_readonly("eta", &AnalyticBenchmark::eta)
      .def("flux", &AnalyticBenchmark::flux)
      .def("front", &AnalyticBenchmark::front)
      .def("front_velocity", &AnalyticBenchmark::front_velocity)
      .def("temperature", &AnalyticBenchmark::temperature)
      .def("mass", &AnalyticBenchmark::mass);

  py::class_<FbpRun>(m, "Run")
      .def_property_readonly("alpha", [](const FbpRun& r) { return r.problem.alpha; })
      .def_property_readonly("n_cells", [](const FbpRun& r) { return r.n_cells; })
      .def_property_readonly("times", [](const FbpRun& r) { return r.front().times; })
      .def_property_readonly("s", [](const FbpRun& r) { return r.front().s_values; })
      .def_property_readonly("s_dot", [](const FbpRun& r) { return r.front().s_dots; })
      .def_property_readonly("frame_times",
                             [](const FbpRun& r) {
                               std::vector<double> t;
                               for (const Frame& f : r.solution.frames) t.push_back(f.t);
                               return t;
                             })
      .def_property_readonly("residuals", [](const FbpRun& r) { return r.residuals; })
      .def_property_readonly("iterations", [](const FbpRun& r) { return r.iterations; })
      .def("temperature", [](const FbpRun& r, std::size_t k) { return r.solution.temperature(k); })
      .def("s_final", &FbpRun::s_final)
      .def("max_residual", &FbpRun::max_residual);

  m.def("parse_config", [](const std::string& text) { return canonical_config(parse_config_text(text)); },
        "Canonical form of a key = value config text.");
  m.def("solve", [](const std::string& text) { return run_config(parse_config_text(text)); }, py::arg("config"),
        "Solves the free-boundary problem described by a key = value config text.");
  m.def("check", [](const FbpRun& run, double window_frac) {
    py::list out;
    for (const PropertyReport& r :
         {check_positivity(run), check_envelope(run), check_velocity_bounds(run), check_boundary_exponent(run, window_frac)})
      out.append(report_dict(r));
    return out;
  }, py::arg("run"), py::arg("window_frac") = 0.05);
}
