#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "superrad/coupling.hpp"
#include "superrad/cumulant.hpp"
#include "superrad/errors.hpp"
#include "superrad/full_quantum.hpp"
#include "superrad/harness.hpp"
#include "superrad/observables.hpp"
#include "superrad/serialization.hpp"

namespace py = pybind11;
using namespace superrad;

namespace {

std::vector<Vec3> rows_to_positions(const Eigen::MatrixXd& m) {
    if (m.cols() != 3) throw InvalidInput("positions must have shape (N, 3)");
    std::vector<Vec3> out;
    for (Eigen::Index i = 0; i < m.rows(); ++i) out.emplace_back(m.row(i).transpose());
    return out;
}

Eigen::MatrixXd positions_to_rows(const std::vector<Vec3>& p) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(p.size()), 3);
    for (std::size_t i = 0; i < p.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = p[i].transpose();
    return m;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Exact and cumulant steady states of incoherently pumped emitter arrays";
    m.attr("__version__") = library_version();

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<InvalidInput>(m, "InvalidInput", base.ptr());
    py::register_exception<DomainError>(m, "DomainError", base.ptr());
    py::register_exception<CapacityError>(m, "CapacityError", base.ptr());
    py::register_exception<NonUniqueSteadyState>(m, "NonUniqueSteadyState", base.ptr());
    py::register_exception<IntegratorFailure>(m, "IntegratorFailure", base.ptr());
    py::register_exception<SolverFailure>(m, "SolverFailure", base.ptr());
    py::register_exception<UndefinedResult>(m, "UndefinedResult", base.ptr());
    py::register_exception<GridTooNarrow>(m, "GridTooNarrow", base.ptr());
    py::register_exception<EmptyMap>(m, "EmptyMap", base.ptr());
    py::register_exception<ValidationError>(m, "ValidationError", base.ptr());

    py::class_<EmitterArray>(m, "EmitterArray")
        .def(py::init([](const Eigen::MatrixXd& positions, const Vec3& dipole, double gamma0) {
                 return EmitterArray(rows_to_positions(positions), dipole, gamma0);
             }),
             py::arg("positions"), py::arg("dipole") = Vec3(0, 0, 1), py::arg("gamma0") = 1.0)
        .def_property_readonly("positions", [](const EmitterArray& a) { return positions_to_rows(a.positions()); })
        .def_property_readonly("dipole", &EmitterArray::dipole)
        .def_property_readonly("gamma0", &EmitterArray::gamma0)
        .def("__len__", &EmitterArray::size)
        .def("centroid", &EmitterArray::centroid)
        .def("translated", &EmitterArray::translated)
        .def("positions_csv", &EmitterArray::positions_csv);

    py::class_<PumpPattern>(m, "PumpPattern")
        .def(py::init<std::vector<double>>(), py::arg("rates"))
        .def_property_readonly("rates", &PumpPattern::rates)
        .def("__len__", &PumpPattern::size);

    py::class_<DisorderConfig>(m, "DisorderConfig")
        .def(py::init([](double eps, std::size_t realizations, std::uint64_t seed) {
                 return DisorderConfig{eps, realizations, seed};
             }),
             py::arg("epsilon"), py::arg("realizations") = 1, py::arg("seed") = 0)
        .def_readwrite("epsilon", &DisorderConfig::epsilon)
        .def_readwrite("realizations", &DisorderConfig::realizations)
        .def_readwrite("seed", &DisorderConfig::seed);

    m.def("build_chain", &build_chain, py::arg("n"), py::arg("spacing"), py::arg("dipole") = Vec3(0, 0, 1),
          py::arg("gamma0") = 1.0);
    m.def("pump_pattern_first", &pump_pattern_first, py::arg("n"), py::arg("n_pumped"), py::arg("rate"));
    m.def("pump_pattern_last", &pump_pattern_last, py::arg("n"), py::arg("n_pumped"), py::arg("rate"));
    m.def(
        "apply_disorder",
        [](const EmitterArray& a, const DisorderConfig& cfg, double spacing, std::size_t realization) {
            return apply_disorder(a, cfg, spacing, realization).array;
        },
        py::arg("array"), py::arg("config"), py::arg("spacing"), py::arg("realization"));

    py::class_<CouplingMatrices>(m, "CouplingMatrices")
        .def_readonly("omega", &CouplingMatrices::omega)
        .def_readonly("gamma", &CouplingMatrices::gamma)
        .def_readonly("g", &CouplingMatrices::g)
        .def_readonly("gamma0", &CouplingMatrices::gamma0)
        .def("to_csv", &CouplingMatrices::to_csv);
    m.def("coupling_matrices", &coupling_matrices, py::arg("array"));
    m.def("green_tensor", &green_tensor, py::arg("r"));

    py::class_<DensityMatrix>(m, "DensityMatrix")
        .def_readonly("emitters", &DensityMatrix::emitters)
        .def_readonly("data", &DensityMatrix::data)
        .def("trace_error", &DensityMatrix::trace_error)
        .def("min_eigenvalue", &DensityMatrix::min_eigenvalue);

    py::class_<Liouvillian>(m, "Liouvillian")
        .def(py::init<const CouplingMatrices&, const PumpPattern&, std::size_t>(), py::arg("couplings"), py::arg("pump"),
             py::arg("max_emitters") = kDefaultExactCap)
        .def_property_readonly("dim", &Liouvillian::dim);
    m.def("steady_state", [](const Liouvillian& L) { return steady_state(L); }, py::arg("liouvillian"));
    m.def("stationarity_residual", &stationarity_residual);

    py::class_<PairCorrelations>(m, "PairCorrelations")
        .def_readonly("populations", &PairCorrelations::populations)
        .def_readonly("coherences", &PairCorrelations::coherences)
        .def_readonly("joint", &PairCorrelations::joint);
    m.def("pair_correlations", &pair_correlations, py::arg("rho"));

    py::class_<Direction>(m, "Direction")
        .def(py::init([](double phi, double theta) { return Direction{phi, theta}; }), py::arg("phi") = 0.0,
             py::arg("theta") = kPi / 2)
        .def_readwrite("phi", &Direction::phi)
        .def_readwrite("theta", &Direction::theta)
        .def("unit", &Direction::unit)
        .def("__repr__", [](const Direction& d) {
            return "Direction(phi=" + std::to_string(d.phi) + ", theta=" + std::to_string(d.theta) + ")";
        });

    py::enum_<G2Ordering>(m, "G2Ordering")
        .value("FIELD_OPERATOR", G2Ordering::FieldOperator)
        .value("PHOTODETECTION", G2Ordering::Photodetection);
    m.def("g2_zero", &g2_zero, py::arg("rho"), py::arg("array"), py::arg("direction"),
          py::arg("ordering") = G2Ordering::FieldOperator);

    py::class_<CumulantState>(m, "CumulantState")
        .def_readonly("ee", &CumulantState::ee)
        .def_readonly("pm", &CumulantState::pm)
        .def_readonly("eeee", &CumulantState::eeee)
        .def_static("ground", &CumulantState::ground);
    py::class_<CumulantSteadyResult>(m, "CumulantSteadyResult")
        .def_readonly("state", &CumulantSteadyResult::state)
        .def_readonly("converged", &CumulantSteadyResult::converged)
        .def_readonly("rhs_norm", &CumulantSteadyResult::rhs_norm)
        .def_readonly("warnings", &CumulantSteadyResult::warnings);
    m.def("cumulant_steady_state", [](const CouplingMatrices& c, const PumpPattern& p) { return cumulant_steady_state(c, p); },
          py::arg("couplings"), py::arg("pump"));

    py::class_<LinearCorrelationModel>(m, "LinearCorrelationModel")
        .def_readonly("generator", &LinearCorrelationModel::generator)
        .def_readonly("initial", &LinearCorrelationModel::initial);
    m.def("regression_model", &regression_model, py::arg("state"), py::arg("couplings"), py::arg("pump"));

    m.def("total_emission", &total_emission, py::arg("couplings"), py::arg("pm"));
    m.def("independent_emission", &independent_emission, py::arg("n_pumped"), py::arg("rate"), py::arg("gamma0") = 1.0);
    m.def("field_intensity", &field_intensity, py::arg("array"), py::arg("pm"), py::arg("r"));
    m.def("far_field_intensity", &far_field_intensity, py::arg("array"), py::arg("pm"), py::arg("direction"));
    m.def(
        "max_emission_direction",
        [](const EmitterArray& a, const Eigen::MatrixXcd& pm, std::size_t phi_points, std::size_t theta_points,
           double radius) { return max_emission_direction(a, pm, AngularGrid{phi_points, theta_points}, radius); },
        py::arg("array"), py::arg("pm"), py::arg("phi_points") = 360, py::arg("theta_points") = 180,
        py::arg("detector_radius") = kDefaultDetectorRadius);

    py::class_<SpectrumResult>(m, "SpectrumResult")
        .def_readonly("omega", &SpectrumResult::omega)
        .def_readonly("values", &SpectrumResult::values)
        .def_readonly("direction", &SpectrumResult::direction)
        .def_readonly("fwhm", &SpectrumResult::fwhm)
        .def_readonly("peak_position", &SpectrumResult::peak_position)
        .def_readonly("peak_count", &SpectrumResult::peak_count)
        .def_readonly("dark", &SpectrumResult::dark)
        .def("integrated_power", &SpectrumResult::integrated_power)
        .def("to_csv", &SpectrumResult::to_csv)
        .def("to_json", &SpectrumResult::to_json);
    m.def(
        "far_field_spectrum",
        [](const LinearCorrelationModel& model, const EmitterArray& a, const Direction& d) {
            return far_field_spectrum(model, a, d);
        },
        py::arg("model"), py::arg("array"), py::arg("direction"));
    m.def(
        "exact_far_field_spectrum",
        [](const Liouvillian& L, const DensityMatrix& rho, const EmitterArray& a, const Direction& d, double half_width) {
            SpectrumOptions o;
            o.half_width = half_width;
            return far_field_spectrum(L, rho, a, d, o);
        },
        py::arg("liouvillian"), py::arg("rho"), py::arg("array"), py::arg("direction"), py::arg("half_width"));
    m.def("default_half_width", &default_half_width, py::arg("couplings"), py::arg("pump"));
    m.def(
        "linewidth_fwhm",
        [](const std::vector<double>& w, const std::vector<double>& s) {
            const auto l = linewidth_fwhm(w, s);
            return py::make_tuple(l.fwhm, l.peak_position, l.peak_count);
        },
        py::arg("omega"), py::arg("values"), "Returns (fwhm, peak_position, peak_count).");

    py::enum_<Engine>(m, "Engine").value("EXACT", Engine::Exact).value("CUMULANT", Engine::Cumulant).value("BOTH", Engine::Both);
    py::enum_<RowStatus>(m, "RowStatus").value("OK", RowStatus::Ok).value("PARTIAL", RowStatus::Partial).value("FAILED", RowStatus::Failed);

    py::class_<ExperimentConfig>(m, "ExperimentConfig")
        .def_readonly("name", &ExperimentConfig::name)
        .def_readonly("engine", &ExperimentConfig::engine)
        .def_readwrite("output_dir", &ExperimentConfig::output_dir)
        .def("to_json", [](const ExperimentConfig& c) { return config_to_json(c); })
        .def("grid_size", [](const ExperimentConfig& c) { return expand_grid(c).size(); });
    m.def("parse_config", &parse_config, py::arg("text"));
    m.def("load_config", &load_config, py::arg("path"));

    py::class_<SweepResult>(m, "SweepResult")
        .def_readonly("name", &SweepResult::name)
        .def_readonly("wall_time", &SweepResult::wall_time)
        .def_property_readonly("row_count", [](const SweepResult& r) { return r.rows.size(); })
        .def("count", &SweepResult::count)
        .def("flagged", &SweepResult::flagged)
        .def("exit_code", &SweepResult::exit_code)
        .def("results_csv", &SweepResult::results_csv)
        .def("realizations_csv", &SweepResult::realizations_csv);
    m.def(
        "run",
        [](const ExperimentConfig& cfg, std::optional<std::filesystem::path> output_dir, std::optional<std::size_t> workers,
           bool write_artifacts) {
            py::gil_scoped_release release;
            return run(cfg, RunOptions{std::move(output_dir), workers, write_artifacts});
        },
        py::arg("config"), py::arg("output_dir") = py::none(), py::arg("workers") = py::none(),
        py::arg("write_artifacts") = true);

    py::class_<CompareReport>(m, "CompareReport")
        .def_readonly("equal", &CompareReport::equal)
        .def_readonly("rows_compared", &CompareReport::rows_compared)
        .def_readonly("max_abs_diff", &CompareReport::max_abs_diff)
        .def_readonly("max_rel_diff", &CompareReport::max_rel_diff)
        .def_readonly("mismatches", &CompareReport::mismatches);
    m.def("compare_runs", &compare_runs, py::arg("run_a"), py::arg("run_b"), py::arg("tol") = 1e-12);
}
