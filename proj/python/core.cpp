#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "slip/benchmarks.hpp"
#include "slip/control.hpp"
#include "slip/driver.hpp"
#include "slip/errors.hpp"
#include "slip/experiment.hpp"
#include "slip/subproblem.hpp"

namespace py = pybind11;
using namespace slip;

namespace {

std::vector<double> to_vector(std::span<const double> s) { return {s.begin(), s.end()}; }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Trust-region method for integer controls with total-variation regularization.";

  py::register_exception<StructuralError>(m, "StructuralError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<GuardError>(m, "GuardError", PyExc_ValueError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);

  py::class_<Grid>(m, "Grid")
      .def(py::init<int, double, double>(), py::arg("n_cells"), py::arg("a"), py::arg("b"))
      .def_property_readonly("n_cells", &Grid::n_cells)
      .def_property_readonly("a", &Grid::a)
      .def_property_readonly("b", &Grid::b)
      .def_property_readonly("h", &Grid::h)
      .def("interface", &Grid::interface)
      .def(py::self == py::self)
      .def("__repr__", [](const Grid& g) {
        return "Grid(" + std::to_string(g.n_cells()) + ", " + std::to_string(g.a()) + ", " + std::to_string(g.b()) + ")";
      });

  py::class_<LabelSet>(m, "LabelSet")
      .def(py::init<std::vector<int>>(), py::arg("values"))
      .def_static("range", &LabelSet::range, py::arg("lo"), py::arg("hi"))
      .def_property_readonly("values", [](const LabelSet& w) { return std::vector<int>(w.values().begin(), w.values().end()); })
      .def_property_readonly("span", &LabelSet::span)
      .def("__len__", &LabelSet::size)
      .def("__contains__", &LabelSet::contains);

  py::class_<Control>(m, "Control")
      .def(py::init<Grid, LabelSet, std::vector<int>>(), py::arg("grid"), py::arg("labels"), py::arg("cells"))
      .def_static("constant", &Control::constant, py::arg("grid"), py::arg("labels"), py::arg("value"))
      .def_property_readonly("grid", &Control::grid)
      .def_property_readonly("labels", &Control::labels)
      .def_property_readonly("cells", [](const Control& w) { return std::vector<int>(w.cells().begin(), w.cells().end()); })
      .def("with_cells", &Control::with_cells)
      .def("__len__", &Control::size)
      .def(py::self == py::self);

  py::class_<SwitchPoint>(m, "SwitchPoint")
      .def_readonly("interface", &SwitchPoint::interface)
      .def_readonly("position", &SwitchPoint::position)
      .def_readonly("jump", &SwitchPoint::jump);

  m.def("tv", py::overload_cast<const Control&>(&tv));
  m.def("switch_count", &switch_count);
  m.def("l1_distance", &l1_distance);
  m.def("switch_points", &switch_points);
  m.def("criticality", [](const Control& w, std::vector<double> g) { return criticality(w, g); });
  m.def("min_opposite_switch_distance", py::overload_cast<const Control&>(&min_opposite_switch_distance));
  m.def(
      "min_opposite_switch_distance",
      [](const Control& w, std::vector<double> g) { return min_opposite_switch_distance(w, g); }, py::arg("w"),
      py::arg("interface_gradient"));
  m.def("switch_count_bound", &switch_count_bound, py::arg("j0"), py::arg("f_lower_bound"), py::arg("alpha"));

  py::class_<SubproblemInput>(m, "SubproblemInput")
      .def(py::init<Control, std::vector<double>, double, double>(), py::arg("w_bar"), py::arg("cell_means"),
           py::arg("delta"), py::arg("alpha"))
      .def_readwrite("w_bar", &SubproblemInput::w_bar)
      .def_readwrite("cell_means", &SubproblemInput::cell_means)
      .def_readwrite("delta", &SubproblemInput::delta)
      .def_readwrite("alpha", &SubproblemInput::alpha);

  py::class_<SubproblemSolution>(m, "SubproblemSolution")
      .def_readonly("w_star", &SubproblemSolution::w_star)
      .def_readonly("model_value", &SubproblemSolution::model_value)
      .def_readonly("pred", &SubproblemSolution::pred)
      .def_readonly("budget_used", &SubproblemSolution::budget_used);

  m.def("solve_tr_dp", [](const SubproblemInput& in) { return solve_tr_dp(in); });
  m.def("solve_tr_bruteforce", &solve_tr_bruteforce);
  m.def(
      "pred", [](const Control& w, std::vector<double> g, double delta, double alpha) { return pred(w, g, delta, alpha); },
      py::arg("w_bar"), py::arg("cell_means"), py::arg("delta"), py::arg("alpha"));

  py::class_<Gradient>(m, "Gradient")
      .def_readonly("cell_means", &Gradient::cell_means)
      .def_readonly("interface_values", &Gradient::interface_values);

  py::class_<Problem>(m, "Problem")
      .def_property_readonly("grid", &Problem::grid)
      .def_property_readonly("labels", &Problem::labels)
      .def_property_readonly("name", [](const Problem& p) { return std::string(p.name()); })
      .def("objective", &Problem::objective)
      .def("gradient", &Problem::gradient)
      .def("objective_at", [](const Problem& p, std::vector<double> x) { return p.objective_at(x); })
      .def("gradient_at", [](const Problem& p, std::vector<double> x) { return p.gradient_at(x); });

  py::class_<HeatProblem, Problem>(m, "HeatProblem")
      .def(py::init<int>(), py::arg("n_cells"))
      .def(py::init<int, std::vector<double>>(), py::arg("n_cells"), py::arg("target_nodes"))
      .def_static("for_target_control", &HeatProblem::for_target_control)
      .def("solve_state", [](const HeatProblem& p, std::vector<double> x) { return p.solve_state(x); })
      .def_property_readonly("target", [](const HeatProblem& p) { return to_vector(p.target()); });

  py::class_<DeconvProblem, Problem>(m, "DeconvProblem")
      .def(py::init<int, double>(), py::arg("n_cells"), py::arg("kernel_width") = data::kDeconvKernelWidth)
      .def("apply_kernel", [](const DeconvProblem& p, std::vector<double> x) { return p.apply_kernel(x); })
      .def_property_readonly("observation_nodes", [](const DeconvProblem& p) { return to_vector(p.observation_nodes()); })
      .def_property_readonly("target_samples", [](const DeconvProblem& p) { return to_vector(p.target_samples()); })
      .def_static("source", &DeconvProblem::source);

  m.def(
      "fd_gradient_check",
      [](const Problem& p, std::vector<double> x, double probe) { return fd_gradient_check(p, x, probe); },
      py::arg("problem"), py::arg("cells"), py::arg("probe_scale") = 1.0);

  py::enum_<RadiusPolicy>(m, "RadiusPolicy")
      .value("DoubleNoReset", RadiusPolicy::DoubleNoReset)
      .value("ResetOnSuccess", RadiusPolicy::ResetOnSuccess);
  py::enum_<Termination>(m, "Termination")
      .value("PredZero", Termination::PredZero)
      .value("RadiusBelowMesh", Termination::RadiusBelowMesh)
      .value("IterationCap", Termination::IterationCap);

  py::class_<TrustRegionConfig>(m, "TrustRegionConfig")
      .def(py::init<>())
      .def_static("defaults", &TrustRegionConfig::defaults, py::arg("grid"), py::arg("labels"), py::arg("alpha"),
                  py::arg("policy") = RadiusPolicy::DoubleNoReset)
      .def_readwrite("sigma", &TrustRegionConfig::sigma)
      .def_readwrite("delta0", &TrustRegionConfig::delta0)
      .def_readwrite("delta_max", &TrustRegionConfig::delta_max)
      .def_readwrite("policy", &TrustRegionConfig::policy)
      .def_readwrite("alpha", &TrustRegionConfig::alpha)
      .def_readwrite("delta_min", &TrustRegionConfig::delta_min)
      .def_readwrite("max_iterations", &TrustRegionConfig::max_iterations)
      .def("validate", &TrustRegionConfig::validate);

  py::class_<IterationRecord>(m, "IterationRecord")
      .def_readonly("n", &IterationRecord::n)
      .def_readonly("delta", &IterationRecord::delta)
      .def_readonly("pred", &IterationRecord::pred)
      .def_readonly("ared", &IterationRecord::ared)
      .def_readonly("accepted", &IterationRecord::accepted)
      .def_readonly("objective", &IterationRecord::objective)
      .def_readonly("criticality", &IterationRecord::criticality)
      .def_readonly("tv", &IterationRecord::tv)
      .def_readonly("r_n", &IterationRecord::r_n)
      .def_readonly("wall_time", &IterationRecord::wall_time)
      .def_readonly("delta_a", &IterationRecord::delta_a)
      .def_readonly("c0", &IterationRecord::c0)
      .def_readonly("c1", &IterationRecord::c1)
      .def_readonly("n_max", &IterationRecord::n_max);

  py::class_<SolveResult>(m, "SolveResult")
      .def_readonly("final_control", &SolveResult::final_control)
      .def_readonly("history", &SolveResult::history)
      .def_readonly("termination", &SolveResult::termination)
      .def_readonly("initial_objective", &SolveResult::initial_objective)
      .def_readonly("final_objective", &SolveResult::final_objective)
      .def_property_readonly("accepted_iterations", &SolveResult::accepted_iterations);

  m.def("ared", &ared, py::arg("problem"), py::arg("w_bar"), py::arg("w"), py::arg("alpha"));
  m.def("objective", &objective, py::arg("problem"), py::arg("w"), py::arg("alpha"));
  m.def("run", &run, py::arg("problem"), py::arg("w0"), py::arg("config"), py::call_guard<py::gil_scoped_release>());

  py::class_<ExperimentRow>(m, "ExperimentRow")
      .def(py::init<>())
      .def_readwrite("alpha", &ExperimentRow::alpha)
      .def_readwrite("policy", &ExperimentRow::policy)
      .def_readwrite("runtime_seconds", &ExperimentRow::runtime_seconds)
      .def_readwrite("final_objective", &ExperimentRow::final_objective)
      .def_readwrite("iterations", &ExperimentRow::iterations)
      .def_readwrite("accepted_iterations", &ExperimentRow::accepted_iterations)
      .def_readwrite("final_criticality", &ExperimentRow::final_criticality)
      .def_readwrite("final_tv", &ExperimentRow::final_tv);

  py::class_<SummaryRow>(m, "SummaryRow")
      .def_readonly("alpha", &SummaryRow::alpha)
      .def_readonly("complete", &SummaryRow::complete)
      .def_readonly("warning", &SummaryRow::warning)
      .def_readonly("runtime_improvement", &SummaryRow::runtime_improvement)
      .def_readonly("objective_gap", &SummaryRow::objective_gap);

  m.def(
      "run_sweep",
      [](const std::string& benchmark, int n_cells, std::vector<double> alphas, std::vector<RadiusPolicy> policies,
         int jobs) {
        ExperimentConfig cfg;
        cfg.benchmark = parse_benchmark(benchmark);
        cfg.n_cells = n_cells;
        cfg.alphas = std::move(alphas);
        cfg.policies = std::move(policies);
        cfg.jobs = jobs;
        py::gil_scoped_release release;
        return run_sweep(cfg);
      },
      py::arg("benchmark"), py::arg("n_cells") = 512,
      py::arg("alphas") = std::vector<double>{1e-6, 5e-6, 1e-5, 5e-5, 1e-4, 5e-4, 1e-3},
      py::arg("policies") = std::vector<RadiusPolicy>{RadiusPolicy::DoubleNoReset, RadiusPolicy::ResetOnSuccess},
      py::arg("jobs") = 1);
  m.def("summarize", &summarize);
  m.def("summary_markdown", &summary_markdown);
  m.def("write_rows_csv", &write_rows_csv);
  m.def("read_rows_csv", &read_rows_csv);
  m.def("control_plot_svg", &control_plot_svg, py::arg("w"), py::arg("title") = "");
  m.def("emit_control_plot", &emit_control_plot, py::arg("w"), py::arg("path"), py::arg("title") = "");
}
