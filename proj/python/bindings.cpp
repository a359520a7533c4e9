#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "xbarfilt/cli.hpp"
#include "xbarfilt/error.hpp"
#include "xbarfilt/extract.hpp"
#include "xbarfilt/fit.hpp"
#include "xbarfilt/io/csv.hpp"
#include "xbarfilt/io/design_file.hpp"
#include "xbarfilt/io/touchstone.hpp"
#include "xbarfilt/ladder.hpp"
#include "xbarfilt/material.hpp"
#include "xbarfilt/mbvd.hpp"
#include "xbarfilt/metrics.hpp"
#include "xbarfilt/synth.hpp"

namespace py = pybind11;
using namespace xbarfilt;

namespace {

using RealArray = py::array_t<double, py::array::c_style | py::array::forcecast>;
using ComplexArray = py::array_t<complex, py::array::c_style | py::array::forcecast>;

std::vector<double> to_vector(const RealArray& a) { return {a.data(), a.data() + a.size()}; }

std::vector<complex> to_vector(const ComplexArray& a) { return {a.data(), a.data() + a.size()}; }

template <class T>
py::array_t<T> to_array(const std::vector<T>& v) {
    return py::array_t<T>(static_cast<py::ssize_t>(v.size()), v.data());
}

py::dict response_dict(const FrequencyResponse& r) {
    py::dict d;
    d["f"] = to_array(r.grid.points());
    d["s11"] = to_array(r.s11);
    d["s21"] = to_array(r.s21);
    d["s12"] = to_array(r.s12);
    d["s22"] = to_array(r.s22);
    d["z0"] = r.z0;
    return d;
}

FrequencyResponse response_from(const RealArray& f, const ComplexArray& s11, const ComplexArray& s21,
                                const ComplexArray& s22, double z0) {
    FrequencyResponse r;
    r.grid = FrequencyGrid::from_points(to_vector(f));
    r.s11 = to_vector(s11);
    r.s21 = to_vector(s21);
    r.s12 = r.s21;
    r.s22 = to_vector(s22);
    r.z0 = z0;
    r.validate();
    return r;
}

py::dict metrics_dict(const FilterMetrics& m) {
    py::dict d;
    d["fc_hz"] = m.fc;
    d["min_il_db"] = m.min_il;
    d["fbw3"] = m.fbw3;
    d["fbw20"] = m.fbw20;
    d["band3_hz"] = py::make_tuple(m.band3.lo, m.band3.hi);
    d["band20_hz"] = py::make_tuple(m.band20.lo, m.band20.hi);
    d["oob_lower_db"] = m.oob_lower.db;
    d["oob_lower_hz"] = m.oob_lower.freq;
    d["oob_upper_db"] = m.oob_upper.db;
    d["oob_upper_hz"] = m.oob_upper.freq;
    d["tz_hz"] = m.tz_list;
    return d;
}

MetricOptions metric_options(const std::string& fbw_ref, double tz_threshold_db) {
    MetricOptions o;
    if (fbw_ref == "absolute") {
        o.fbw20_reference = FbwReference::Absolute;
    } else if (fbw_ref != "peak") {
        throw InvalidArgument("fbw_ref must be 'peak' or 'absolute'");
    }
    o.tz_threshold_db = tz_threshold_db;
    return o;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "XBAR ladder filter modeling: mBVD resonators, two-port cascades, metrics, synthesis and fitting";

    auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<InvalidArgument>(m, "InvalidArgument", error.ptr());
    py::register_exception<SchemaError>(m, "SchemaError", error.ptr());
    auto solver = py::register_exception<SolverError>(m, "SolverError", error.ptr());
    py::register_exception<UnboundedBandError>(m, "UnboundedBandError", solver.ptr());

    py::class_<MbvdParams>(m, "MbvdParams")
        .def(py::init([](double fs, double k2, double q, double c0, double rs, double ls) {
                 MbvdParams p{fs, k2, q, c0, rs, ls};
                 p.validate();
                 return p;
             }),
             py::arg("fs"), py::arg("k2"), py::arg("q"), py::arg("c0"), py::arg("rs") = 0.0, py::arg("ls") = 0.0)
        .def_readwrite("fs", &MbvdParams::fs)
        .def_readwrite("k2", &MbvdParams::k2)
        .def_readwrite("q", &MbvdParams::q)
        .def_readwrite("c0", &MbvdParams::c0)
        .def_readwrite("rs", &MbvdParams::rs)
        .def_readwrite("ls", &MbvdParams::ls)
        .def("__eq__", [](const MbvdParams& a, const MbvdParams& b) { return a == b; })
        .def("__repr__", [](const MbvdParams& p) {
            std::ostringstream os;
            os << "MbvdParams(fs=" << p.fs << ", k2=" << p.k2 << ", q=" << p.q << ", c0=" << p.c0
               << ", rs=" << p.rs << ", ls=" << p.ls << ")";
            return os.str();
        });

    m.def("fp_from", &fp_from, py::arg("fs"), py::arg("k2"));
    m.def("k2_from", &k2_from, py::arg("fs"), py::arg("fp"));
    m.def(
        "derive_motional",
        [](const MbvdParams& p) {
            const MotionalBranch b = derive_motional(p);
            py::dict d;
            d["cm"] = b.cm;
            d["lm"] = b.lm;
            d["rm"] = b.rm;
            return d;
        },
        py::arg("params"));
    m.def(
        "admittance", [](const MbvdParams& p, const RealArray& f) { return to_array(admittance(p, to_vector(f))); },
        py::arg("params"), py::arg("f"));

    py::enum_<Placement>(m, "Placement").value("SERIES", Placement::Series).value("SHUNT", Placement::Shunt);

    py::class_<Stage>(m, "Stage")
        .def(py::init([](Placement p, const MbvdParams& r, int mult, std::string label) {
                 return Stage{p, r, mult, std::move(label)};
             }),
             py::arg("placement"), py::arg("resonator"), py::arg("multiplicity") = 1, py::arg("label") = "")
        .def_readwrite("placement", &Stage::placement)
        .def_readwrite("resonator", &Stage::resonator)
        .def_readwrite("multiplicity", &Stage::multiplicity)
        .def_readwrite("label", &Stage::label);

    py::class_<LadderDesign>(m, "LadderDesign")
        .def(py::init([](std::vector<Stage> stages, double z0) {
                 LadderDesign d{std::move(stages), z0};
                 d.validate();
                 return d;
             }),
             py::arg("stages"), py::arg("z0") = 50.0)
        .def_readwrite("stages", &LadderDesign::stages)
        .def_readwrite("z0", &LadderDesign::z0)
        .def("reversed", &LadderDesign::reversed);

    py::class_<PhysicalRealization>(m, "PhysicalRealization")
        .def_readonly("label", &PhysicalRealization::label)
        .def_readonly("base_t_nm", &PhysicalRealization::base_t_nm)
        .def_readonly("trims_nm", &PhysicalRealization::trims_nm)
        .def_readonly("t_nm", &PhysicalRealization::t_nm)
        .def_readonly("theta_deg", &PhysicalRealization::theta_deg)
        .def_readonly("ne", &PhysicalRealization::ne)
        .def_readonly("ng", &PhysicalRealization::ng)
        .def_readonly("le_um", &PhysicalRealization::le_um);

    m.def(
        "load_design", [](const std::filesystem::path& p) { return io::load_design(p).design; }, py::arg("path"));
    m.def(
        "save_design",
        [](const LadderDesign& d, const std::filesystem::path& p) { io::save_design(io::DesignFile{d, {}, {}}, p); },
        py::arg("design"), py::arg("path"));

    m.def(
        "simulate",
        [](const LadderDesign& d, double fmin, double fmax, double step) {
            return response_dict(cascade(d, FrequencyGrid::uniform(fmin, fmax, step)));
        },
        py::arg("design"), py::arg("fmin") = 1e9, py::arg("fmax") = 40e9, py::arg("step") = 1e7);

    m.def(
        "metrics",
        [](const LadderDesign& d, double fmin, double fmax, double step, const std::string& fbw_ref,
           double tz_threshold_db) {
            const FrequencyResponse r = cascade(d, FrequencyGrid::uniform(fmin, fmax, step));
            return metrics_dict(compute_metrics(r, metric_options(fbw_ref, tz_threshold_db), s21_evaluator(d)));
        },
        py::arg("design"), py::arg("fmin") = 1e9, py::arg("fmax") = 40e9, py::arg("step") = 1e7,
        py::arg("fbw_ref") = "peak", py::arg("tz_threshold_db") = 30.0);

    m.def(
        "response_metrics",
        [](const RealArray& f, const ComplexArray& s11, const ComplexArray& s21, const ComplexArray& s22, double z0,
           const std::string& fbw_ref, double tz_threshold_db) {
            return metrics_dict(
                compute_metrics(response_from(f, s11, s21, s22, z0), metric_options(fbw_ref, tz_threshold_db)));
        },
        py::arg("f"), py::arg("s11"), py::arg("s21"), py::arg("s22"), py::arg("z0") = 50.0,
        py::arg("fbw_ref") = "peak", py::arg("tz_threshold_db") = 30.0);

    m.def(
        "read_touchstone",
        [](const std::filesystem::path& p) { return response_dict(io::read_touchstone(p)); }, py::arg("path"));

    m.def(
        "synthesize",
        [](double fc, double fbw, int order, const std::string& oob_bias, std::optional<std::filesystem::path> material,
           std::optional<double> base_t_nm, double z0) {
            if (order != 3 && order != 8) throw InvalidArgument("order must be 3 or 8");
            FilterTargets t{fc, fbw, z0, order == 3 ? FilterOrder::ThreeElement : FilterOrder::EightElement,
                            OobBias::None};
            if (oob_bias == "lower") {
                t.oob_bias = OobBias::LowerRejection;
            } else if (oob_bias == "selectivity") {
                t.oob_bias = OobBias::Selectivity;
            } else if (oob_bias != "none") {
                throw InvalidArgument("oob_bias must be 'none', 'lower' or 'selectivity'");
            }
            RefineKnobs k;
            k.material = material ? io::load_material_dir(*material) : default_material();
            k.base_t_nm = base_t_nm.value_or(order == 3 ? 99.0 : 96.0);
            SynthesisResult r;
            {
                py::gil_scoped_release release;
                r = refine(seed_design(t), t, k);
            }
            py::dict d;
            d["design"] = r.design;
            d["realization"] = r.realization;
            d["metrics"] = metrics_dict(r.achieved);
            d["passes"] = r.passes;
            d["converged"] = r.converged;
            return d;
        },
        py::arg("fc"), py::arg("fbw"), py::arg("order") = 3, py::arg("oob_bias") = "none",
        py::arg("material") = py::none(), py::arg("base_t_nm") = py::none(), py::arg("z0") = 50.0);

    m.def(
        "scale_design", [](const LadderDesign& d, double factor) { return scale_design(d, factor); },
        py::arg("design"), py::arg("factor"));

    m.def(
        "plan_trims",
        [](double base, const std::vector<double>& targets, std::optional<std::vector<double>> allowed) {
            const TrimPlan p = plan_trims(base, targets, std::move(allowed));
            return py::make_tuple(p.steps, p.per_target);
        },
        py::arg("base_t_nm"), py::arg("targets_nm"), py::arg("allowed_steps") = py::none());

    m.def(
        "extract_resonator",
        [](const RealArray& f, const ComplexArray& y) {
            const ResonatorExtraction e =
                extract_from_admittance(FrequencyGrid::from_points(to_vector(f)), to_vector(y));
            py::dict d;
            d["fs_hz"] = e.fs;
            d["fp_hz"] = e.fp;
            d["k2"] = e.k2;
            d["q3db"] = e.q3db;
            d["c0_f"] = e.c0_est;
            return d;
        },
        py::arg("f"), py::arg("y"));

    m.def(
        "fit",
        [](const RealArray& f, const ComplexArray& s11, const ComplexArray& s21, const ComplexArray& s22,
           const LadderDesign& init, double z0) {
            const FitProblem prob = make_fit_problem(response_from(f, s11, s21, s22, z0), init);
            FitResult r;
            {
                py::gil_scoped_release release;
                r = fit_mbvd(prob);
            }
            py::dict d;
            d["design"] = r.design;
            d["residual_norm"] = r.residual_norm;
            d["initial_residual_norm"] = r.initial_residual_norm;
            d["iterations"] = r.iterations;
            d["converged"] = r.converged;
            d["status"] = r.status;
            return d;
        },
        py::arg("f"), py::arg("s11"), py::arg("s21"), py::arg("s22"), py::arg("init"), py::arg("z0") = 50.0);

    m.def(
        "run_cli",
        [](const std::vector<std::string>& args) {
            std::ostringstream out, err;
            const int code = cli::run(args, out, err);
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"));
}
