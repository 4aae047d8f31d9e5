#include <pybind11/iostream.h>
#include <pybind11/numpy.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <iostream>
#include <string>
#include <vector>

#include "mfc/cli.hpp"
#include "mfc/config_io.hpp"
#include "mfc/controller.hpp"
#include "mfc/dynamics.hpp"
#include "mfc/errors.hpp"
#include "mfc/linsolve.hpp"
#include "mfc/network.hpp"
#include "mfc/trainer.hpp"

namespace py = pybind11;
using namespace mfc;

namespace {

py::array_t<double> to_matrix(const std::vector<std::vector<double>>& rows, std::size_t cols) {
  py::array_t<double> out({rows.size(), cols});
  auto view = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols; ++j) view(i, j) = rows[i][j];
  }
  return out;
}

py::dict trace_to_dict(const std::vector<TraceRecord>& trace, std::size_t q) {
  const std::size_t n = trace.size();
  py::array_t<std::uint64_t> k(n);
  py::array_t<double> t(n), y(n), y_ref(n);
  py::array_t<double> w({n, q}), u({n, q});
  auto kv = k.mutable_unchecked<1>();
  auto tv = t.mutable_unchecked<1>();
  auto yv = y.mutable_unchecked<1>();
  auto rv = y_ref.mutable_unchecked<1>();
  auto wv = w.mutable_unchecked<2>();
  auto uv = u.mutable_unchecked<2>();
  for (std::size_t i = 0; i < n; ++i) {
    const TraceRecord& r = trace[i];
    kv(i) = r.k;
    tv(i) = r.t;
    yv(i) = r.y;
    rv(i) = r.y_ref;
    for (std::size_t j = 0; j < q; ++j) {
      wv(i, j) = r.w[j];
      uv(i, j) = r.u[j];
    }
  }
  py::dict d;
  d["k"] = k;
  d["t"] = t;
  d["y"] = y;
  d["y_ref"] = y_ref;
  d["w"] = w;
  d["u"] = u;
  return d;
}

py::dict linsolve_to_dict(const LinearSolveResult& r, std::size_t n) {
  py::dict d;
  d["x"] = to_matrix(r.x_trace, n);
  d["y"] = to_matrix(r.y_trace, n);
  d["converged"] = r.converged;
  d["settled_at"] = r.settled_at;
  d["final_residual"] = r.final_residual;
  return d;
}

}  // namespace

PYBIND11_MODULE(mfctune, m) {
  m.doc() = "Model-free (para-model) control: online tuning of network weights and a linear-system demo";

  auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<InvalidParams>(m, "InvalidParams", error.ptr());
  py::register_exception<DimensionMismatch>(m, "DimensionMismatch", error.ptr());
  py::register_exception<IndexOutOfRange>(m, "IndexOutOfRange", error.ptr());
  py::register_exception<InvalidEvent>(m, "InvalidEvent", error.ptr());
  py::register_exception<InvalidTopology>(m, "InvalidTopology", error.ptr());
  py::register_exception<Divergence>(m, "Divergence", error.ptr());
  py::register_exception<ParseError>(m, "ParseError", error.ptr());
  py::register_exception<ValidationError>(m, "ValidationError", error.ptr());
  py::register_exception<IoError>(m, "IoError", error.ptr());

  py::enum_<InitDecay>(m, "InitDecay")
      .value("ELAPSED_TIME", InitDecay::kElapsedTime)
      .value("ITERATION", InitDecay::kIteration);

  py::class_<ControllerParams>(m, "ControllerParams")
      .def(py::init<double, double, double, double, double, InitDecay>(), py::arg("kp"), py::arg("ki"),
           py::arg("k_alpha"), py::arg("k_beta"), py::arg("dt"), py::arg("decay") = InitDecay::kElapsedTime)
      .def_readwrite("kp", &ControllerParams::kp)
      .def_readwrite("ki", &ControllerParams::ki)
      .def_readwrite("k_alpha", &ControllerParams::k_alpha)
      .def_readwrite("k_beta", &ControllerParams::k_beta)
      .def_readwrite("dt", &ControllerParams::dt)
      .def_readwrite("decay", &ControllerParams::decay)
      .def("validate", &ControllerParams::validate)
      .def("init_term", &ControllerParams::init_term)
      .def(py::self == py::self)
      .def("__repr__", [](const ControllerParams& p) {
        return "ControllerParams(kp=" + format_double(p.kp) + ", ki=" + format_double(p.ki) +
               ", k_alpha=" + format_double(p.k_alpha) + ", k_beta=" + format_double(p.k_beta) +
               ", dt=" + format_double(p.dt) + ")";
      });

  py::class_<ControllerState>(m, "ControllerState")
      .def(py::init<>())
      .def_readwrite("psi", &ControllerState::psi)
      .def_readwrite("integral", &ControllerState::integral)
      .def_readwrite("k", &ControllerState::k)
      .def_readwrite("last_y", &ControllerState::last_y)
      .def(py::self == py::self);

  m.def("controller_new", &controller_new, py::arg("params"), py::arg("psi0") = 0.0, py::arg("y0") = 0.0);
  m.def(
      "controller_step",
      [](const ControllerState& s, const ControllerParams& p, double y_ref, double y_meas) {
        const ControllerStep step = controller_step(s, p, y_ref, y_meas);
        return py::make_tuple(step.state, step.control);
      },
      py::arg("state"), py::arg("params"), py::arg("y_ref"), py::arg("y_meas"),
      "Returns (new_state, control).");

  py::class_<FirstOrderFilter>(m, "FirstOrderFilter")
      .def(py::init<double, double>(), py::arg("tau"), py::arg("state") = 0.0)
      .def_readonly("tau", &FirstOrderFilter::tau)
      .def_readonly("state", &FirstOrderFilter::state)
      .def("step", &FirstOrderFilter::step, py::arg("input"), py::arg("dt"));

  py::class_<FeedforwardNet>(m, "FeedforwardNet")
      .def_static("default_topology", &FeedforwardNet::default_topology)
      .def("forward", [](const FeedforwardNet& net, const std::vector<double>& x) { return net.forward(x); })
      .def("set_weight", &FeedforwardNet::set_weight)
      .def("set_mask", &FeedforwardNet::set_mask)
      .def("set_weights", [](FeedforwardNet& net, const std::vector<double>& w) { net.set_weights(w); })
      .def_property_readonly("weights", &FeedforwardNet::weights)
      .def_property_readonly("mask", &FeedforwardNet::mask)
      .def_property_readonly("weight_count", &FeedforwardNet::weight_count)
      .def_property_readonly("input_count", &FeedforwardNet::input_count)
      .def_property_readonly("w_max", &FeedforwardNet::w_max);

  m.def("stagger_params", &stagger_params, py::arg("base"), py::arg("n"), py::arg("rho"));
  m.def(
      "solve_linear",
      [](const Matrix& a, const Vector& b, const std::vector<ControllerParams>& controllers, double tau,
         std::uint64_t horizon, double tolerance) {
        LinearTrackingProblem p;
        p.a = a;
        p.b = b;
        p.controllers = controllers;
        p.filters.assign(b.size(), FirstOrderFilter(tau));
        p.horizon = horizon;
        p.tolerance = tolerance;
        LinearSolveResult r;
        {
          py::gil_scoped_release release;
          r = solve_linear(p);
        }
        return linsolve_to_dict(r, b.size());
      },
      py::arg("a"), py::arg("b"), py::arg("controllers"), py::arg("tau") = 1e-5, py::arg("horizon") = 200000,
      py::arg("tolerance") = 1e-2);

  py::class_<SetInput>(m, "SetInput")
      .def(py::init<std::size_t, double>(), py::arg("index"), py::arg("value"))
      .def_readwrite("index", &SetInput::index)
      .def_readwrite("value", &SetInput::value);
  py::class_<SetReference>(m, "SetReference")
      .def(py::init<double>(), py::arg("value"))
      .def_readwrite("value", &SetReference::value);
  py::class_<DropWeight>(m, "DropWeight")
      .def(py::init<std::size_t>(), py::arg("index"))
      .def_readwrite("index", &DropWeight::index);
  py::class_<RestoreWeight>(m, "RestoreWeight")
      .def(py::init<std::size_t>(), py::arg("index"))
      .def_readwrite("index", &RestoreWeight::index);
  py::class_<ScenarioEvent>(m, "ScenarioEvent")
      .def(py::init<std::uint64_t, EventAction>(), py::arg("at"), py::arg("action"))
      .def_readwrite("at", &ScenarioEvent::at)
      .def_readwrite("action", &ScenarioEvent::action);

  py::class_<Scenario>(m, "Scenario")
      .def(py::init<>())
      .def_readwrite("net", &Scenario::net)
      .def_readwrite("base_params", &Scenario::base_params)
      .def_readwrite("stagger_rho", &Scenario::stagger_rho)
      .def_readwrite("tau", &Scenario::tau)
      .def_readwrite("psi0", &Scenario::psi0)
      .def_property(
          "sample_x", [](const Scenario& s) { return s.initial_sample.x; },
          [](Scenario& s, std::vector<double> x) { s.initial_sample.x = std::move(x); })
      .def_property(
          "sample_y", [](const Scenario& s) { return s.initial_sample.y; },
          [](Scenario& s, double y) { s.initial_sample.y = y; })
      .def_readwrite("events", &Scenario::events)
      .def_readwrite("horizon", &Scenario::horizon)
      .def("validate", &Scenario::validate)
      .def(py::self == py::self);

  m.def("builtin_scenarios", &builtin_scenarios);
  m.def("builtin_names", [] {
    std::vector<std::string> names;
    for (const BuiltinInfo& b : builtin_catalog()) names.push_back(b.name);
    return names;
  });
  m.def(
      "train_online",
      [](const Scenario& s) {
        std::vector<TraceRecord> trace;
        {
          py::gil_scoped_release release;
          trace = train_online(s);
        }
        return trace_to_dict(trace, s.net.weight_count());
      },
      py::arg("scenario"), "Runs the closed loop; returns a dict of numpy arrays k, t, y, y_ref, w, u.");
  m.def(
      "settling",
      [](const Scenario& s, double tol) {
        const std::vector<TraceRecord> trace = train_online(s);
        py::list out;
        for (const SegmentSettling& seg : settling_report(trace, s, tol)) {
          py::dict d;
          d["start"] = seg.start;
          d["end"] = seg.end;
          d["settled"] = seg.settled;
          d["settled_at"] = seg.settled_at;
          d["settle_iterations"] = seg.settle_iterations;
          out.append(d);
        }
        return out;
      },
      py::arg("scenario"), py::arg("tol") = 0.01);

  m.def(
      "run_config",
      [](const std::string& text) {
        const RunConfig cfg = parse_config(text);
        if (cfg.mode == RunMode::kTrain) {
          return trace_to_dict(train_online(cfg.scenario), cfg.scenario.net.weight_count());
        }
        const LinearTrackingProblem p = cfg.system.to_problem(cfg.tolerance);
        return linsolve_to_dict(solve_linear(p), p.size());
      },
      py::arg("text"), "Parses a YAML config and runs it, returning the full trace.");
  m.def(
      "normalize_config", [](const std::string& text) { return serialize_config(parse_config(text)); },
      py::arg("text"), "Parses a YAML config and re-emits it with every field spelled out.");

  m.def(
      "cli",
      [](const std::vector<std::string>& args) {
        std::vector<const char*> argv = {"mfctune"};
        for (const std::string& a : args) argv.push_back(a.c_str());
        py::scoped_ostream_redirect out_redirect(std::cout, py::module_::import("sys").attr("stdout"));
        return cli::main(static_cast<int>(argv.size()), argv.data(), std::cout, std::cerr);
      },
      py::arg("args"), "Runs the command-line interface in-process and returns its exit code.");
}
