#include "xbarfilt/cli.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "xbarfilt/error.hpp"
#include "xbarfilt/extract.hpp"
#include "xbarfilt/fit.hpp"
#include "xbarfilt/io/csv.hpp"
#include "xbarfilt/io/design_file.hpp"
#include "xbarfilt/io/touchstone.hpp"
#include "xbarfilt/metrics.hpp"
#include "xbarfilt/synth.hpp"

namespace xbarfilt::cli {
namespace {

namespace fs = std::filesystem;
using io::format_double;

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

bool is_touchstone(const fs::path& p) {
    const std::string ext = lower(p.extension().string());
    return ext.size() >= 3 && ext[1] == 's' && ext.back() == 'p';
}

FrequencyResponse read_response(const fs::path& p) {
    if (is_touchstone(p)) return io::read_touchstone(p);
    if (lower(p.extension().string()) == ".csv") return io::read_response_csv(p);
    throw SchemaError("unrecognized response file extension: " + p.string());
}

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw SchemaError("cannot write " + p.string());
    out << text;
}

// Material from an explicit directory, else the tables referenced by the
// design (relative to the design file), else the built-in defaults.
MaterialSet resolve_material(const std::string& dir, const io::DesignFile* design, const fs::path& design_path) {
    if (!dir.empty()) return io::load_material_dir(dir);
    MaterialSet m = default_material();
    if (design && design->material) {
        const fs::path base = design_path.parent_path();
        const auto& paths = *design->material;
        if (paths.dispersion_csv) m.dispersion = fit_dispersion(io::read_dispersion_csv(base / *paths.dispersion_csv));
        if (paths.anisotropy_csv) m.anisotropy = AnisotropyModel(io::read_anisotropy_csv(base / *paths.anisotropy_csv));
        if (paths.capacitance_csv) {
            m.density = fit_capacitance_density(io::read_capacitance_csv(base / *paths.capacitance_csv));
        }
    }
    return m;
}

void print_metrics(const FilterMetrics& m, std::ostream& out) {
    out << "fc_hz=" << format_double(m.fc) << "\n";
    out << "min_il_db=" << format_double(m.min_il) << "\n";
    out << "fbw3=" << format_double(m.fbw3) << "\n";
    out << "fbw20=" << format_double(m.fbw20) << "\n";
    out << "oob_lower_db=" << format_double(m.oob_lower.db) << "\n";
    out << "oob_lower_hz=" << format_double(m.oob_lower.freq) << "\n";
    out << "oob_upper_db=" << format_double(m.oob_upper.db) << "\n";
    out << "oob_upper_hz=" << format_double(m.oob_upper.freq) << "\n";
    out << "tz_hz=";
    for (std::size_t i = 0; i < m.tz_list.size(); ++i) out << (i ? "," : "") << format_double(m.tz_list[i]);
    out << "\n";
}

struct Options {
    // simulate
    std::string design, out, touchstone, format = "ri";
    double fmin = 1e9, fmax = 40e9, step = 1e7;
    // metrics
    std::string in, fbw_ref = "peak";
    double tz_threshold = 30.0;
    bool json = false;
    // synth
    double fc = 0.0, fbw = 0.0, z0 = 50.0;
    int order = 3;
    std::string oob_bias = "none", material, trace;
    std::optional<double> base_t;
    int max_passes = 200;
    // fit
    std::string data, init, band, report;
    // scale
    double factor = 1.0;
};

int cmd_simulate(const Options& o, std::ostream& out) {
    const io::DesignFile d = io::load_design(o.design);
    const FrequencyResponse resp = cascade(d.design, FrequencyGrid::uniform(o.fmin, o.fmax, o.step));
    io::write_response_csv(resp, fs::path(o.out));
    if (!o.touchstone.empty()) {
        io::write_touchstone(resp, fs::path(o.touchstone), {io::parse_format(o.format), "HZ"});
    }
    out << "points=" << resp.size() << "\n";
    return kOk;
}

MetricOptions metric_options(const Options& o) {
    MetricOptions m;
    const std::string ref = lower(o.fbw_ref);
    if (ref == "peak") {
        m.fbw20_reference = FbwReference::Peak;
    } else if (ref == "absolute") {
        m.fbw20_reference = FbwReference::Absolute;
    } else {
        throw InvalidArgument("--fbw-ref must be peak or absolute");
    }
    m.tz_threshold_db = o.tz_threshold;
    return m;
}

int cmd_metrics(const Options& o, std::ostream& out) {
    const MetricOptions mo = metric_options(o);
    FilterMetrics m;
    if (!o.design.empty()) {
        const io::DesignFile d = io::load_design(o.design);
        const FrequencyResponse resp = o.in.empty()
                                           ? cascade(d.design, FrequencyGrid::uniform(o.fmin, o.fmax, o.step))
                                           : read_response(o.in);
        m = compute_metrics(resp, mo, s21_evaluator(d.design));
    } else {
        if (o.in.empty()) throw InvalidArgument("metrics needs --in or --design");
        m = compute_metrics(read_response(o.in), mo);
    }
    if (o.json) {
        out << io::canonical_dump(io::metrics_to_json(m));
    } else {
        print_metrics(m, out);
    }
    return kOk;
}

int cmd_synth(const Options& o, std::ostream& out) {
    FilterTargets t;
    t.fc = o.fc;
    t.fbw = o.fbw;
    t.z0 = o.z0;
    if (o.order == 3) {
        t.order = FilterOrder::ThreeElement;
    } else if (o.order == 8) {
        t.order = FilterOrder::EightElement;
    } else {
        throw InvalidArgument("--order must be 3 or 8");
    }
    const std::string bias = lower(o.oob_bias);
    if (bias == "none") {
        t.oob_bias = OobBias::None;
    } else if (bias == "lower") {
        t.oob_bias = OobBias::LowerRejection;
    } else if (bias == "selectivity") {
        t.oob_bias = OobBias::Selectivity;
    } else {
        throw InvalidArgument("--oob-bias must be none, lower or selectivity");
    }
    t.validate();
    RefineKnobs knobs;
    knobs.max_passes = o.max_passes;
    knobs.material = resolve_material(o.material, nullptr, {});
    knobs.base_t_nm = o.base_t.value_or(t.order == FilterOrder::ThreeElement ? 99.0 : 96.0);
    const SynthesisResult r = refine(seed_design(t), t, knobs);

    io::DesignFile d{r.design, r.realization, std::nullopt};
    write_text(o.out, io::canonical_dump(io::design_to_json(d)));
    if (!o.trace.empty()) {
        std::ofstream tr(o.trace, std::ios::binary);
        if (!tr) throw SchemaError("cannot write " + o.trace);
        io::write_trace_csv(r.trace, distinct_labels(r.design), tr);
    }
    out << "passes=" << r.passes << "\n";
    out << "converged=" << (r.converged ? "true" : "false") << "\n";
    print_metrics(r.achieved, out);
    return kOk;
}

int cmd_fit(const Options& o, std::ostream& out) {
    const FrequencyResponse data = read_response(o.data);
    const io::DesignFile init = io::load_design(o.init);
    FitProblem problem = make_fit_problem(data, init.design);
    if (!o.band.empty()) {
        const auto colon = o.band.find(':');
        if (colon == std::string::npos) throw InvalidArgument("--band must be LO:HI in Hz");
        try {
            problem.fit_band = Band{std::stod(o.band.substr(0, colon)), std::stod(o.band.substr(colon + 1))};
        } catch (const std::logic_error&) {
            throw InvalidArgument("--band must be LO:HI in Hz");
        }
    }
    const FitResult r = fit_mbvd(problem);
    write_text(o.out, io::canonical_dump(io::fit_result_to_json(r)));
    const ComparisonTable table = compare_table(labeled_params(init.design), labeled_params(r));
    if (!o.report.empty()) write_text(o.report, table.to_csv());
    out << "residual_norm=" << format_double(r.residual_norm) << "\n";
    out << "iterations=" << r.iterations << "\n";
    out << "status=" << r.status << "\n";
    out << table.to_text();
    return kOk;
}

int cmd_scale(const Options& o, std::ostream& out) {
    const io::DesignFile d = io::load_design(o.design);
    io::DesignFile scaled = d;
    if (d.physical.empty()) {
        scaled.design = scale_design(d.design, o.factor);
    } else {
        const MaterialSet m = resolve_material(o.material, &d, fs::path(o.design));
        ScaledDesign s = scale_design(d.design, d.physical, o.factor, m.dispersion);
        scaled.design = std::move(s.design);
        scaled.physical = std::move(s.realization);
    }
    write_text(o.out, io::canonical_dump(io::design_to_json(scaled)));
    out << "factor=" << format_double(o.factor) << "\n";
    return kOk;
}

int cmd_extract(const Options& o, std::ostream& out) {
    const ResonatorExtraction e = extract_resonator(read_response(o.data));
    out << "fs_hz=" << format_double(e.fs) << "\n";
    out << "fp_hz=" << format_double(e.fp) << "\n";
    out << "k2=" << format_double(e.k2) << "\n";
    out << "q3db=" << format_double(e.q3db) << "\n";
    out << "c0_f=" << format_double(e.c0_est) << "\n";
    return kOk;
}

std::string one_line(std::string s) {
    std::replace(s.begin(), s.end(), '\n', ' ');
    std::string q;
    for (char c : s) {
        if (c == '"' || c == '\\') q += '\\';
        q += c;
    }
    return q;
}

int report_error(std::ostream& err, int code, const char* kind, const std::string& msg) {
    err << "error code=" << code << " kind=" << kind << " message=\"" << one_line(msg) << "\"\n";
    return code;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Acoustic ladder filter workbench", "xbarfilt"};
    app.require_subcommand(1);
    Options o;

    auto* sim = app.add_subcommand("simulate", "Simulate a design to CSV and optional Touchstone");
    sim->add_option("--design", o.design, "Design JSON")->required();
    sim->add_option("--fmin", o.fmin, "Start frequency (Hz)");
    sim->add_option("--fmax", o.fmax, "Stop frequency (Hz)");
    sim->add_option("--step", o.step, "Frequency step (Hz)");
    sim->add_option("--out", o.out, "Response CSV")->required();
    sim->add_option("--touchstone", o.touchstone, "Also write a .s2p file");
    sim->add_option("--format", o.format, "Touchstone format: ri, ma or db");

    auto* met = app.add_subcommand("metrics", "Filter metrics of a response");
    met->add_option("--in", o.in, "Response .s2p or .csv");
    met->add_option("--design", o.design, "Design JSON; enables exact edge refinement");
    met->add_option("--fmin", o.fmin, "Start frequency when simulating --design (Hz)");
    met->add_option("--fmax", o.fmax, "Stop frequency when simulating --design (Hz)");
    met->add_option("--step", o.step, "Frequency step when simulating --design (Hz)");
    met->add_option("--fbw-ref", o.fbw_ref, "20-dB edge reference: peak or absolute");
    met->add_option("--tz-threshold", o.tz_threshold, "Minimum IL of a transmission zero (dB)");
    met->add_flag("--json", o.json, "Print JSON instead of key=value lines");

    auto* syn = app.add_subcommand("synth", "Synthesize a ladder from targets");
    syn->add_option("--fc", o.fc, "Center frequency (Hz)")->required();
    syn->add_option("--fbw", o.fbw, "Fractional 3-dB bandwidth")->required();
    syn->add_option("--z0", o.z0, "Reference impedance (ohm)");
    syn->add_option("--order", o.order, "3 or 8 elements");
    syn->add_option("--oob-bias", o.oob_bias, "none, lower or selectivity");
    syn->add_option("--material", o.material, "Directory of material anchor CSVs");
    syn->add_option("--base-t", o.base_t, "Unmilled film thickness (nm)");
    syn->add_option("--max-passes", o.max_passes, "Refinement pass limit");
    syn->add_option("--out", o.out, "Design JSON")->required();
    syn->add_option("--trace", o.trace, "Refinement trace CSV");

    auto* fit = app.add_subcommand("fit", "Fit mBVD parameters to measured S-parameters");
    fit->add_option("--data", o.data, "Measured .s2p or .csv")->required();
    fit->add_option("--init", o.init, "Initial design JSON")->required();
    fit->add_option("--band", o.band, "Fit band LO:HI (Hz)");
    fit->add_option("--out", o.out, "Fit result JSON")->required();
    fit->add_option("--report", o.report, "Comparison table CSV");

    auto* sca = app.add_subcommand("scale", "Scale a design in frequency");
    sca->add_option("--design", o.design, "Design JSON")->required();
    sca->add_option("--factor", o.factor, "Frequency factor")->required();
    sca->add_option("--material", o.material, "Directory of material anchor CSVs");
    sca->add_option("--out", o.out, "Scaled design JSON")->required();

    auto* ext = app.add_subcommand("extract", "Resonator parameters from a two-port measurement");
    ext->add_option("--data", o.data, "Resonator .s2p or .csv")->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        return report_error(err, kUsage, "usage", e.what());
    }

    try {
        if (sim->parsed()) return cmd_simulate(o, out);
        if (met->parsed()) return cmd_metrics(o, out);
        if (syn->parsed()) return cmd_synth(o, out);
        if (fit->parsed()) return cmd_fit(o, out);
        if (sca->parsed()) return cmd_scale(o, out);
        if (ext->parsed()) return cmd_extract(o, out);
    } catch (const SchemaError& e) {
        return report_error(err, kSchema, "schema", e.what());
    } catch (const SolverError& e) {
        return report_error(err, kSolver, "solver", e.what());
    } catch (const InvalidArgument& e) {
        return report_error(err, kUsage, "usage", e.what());
    } catch (const std::exception& e) {
        return report_error(err, kFailure, "internal", e.what());
    }
    return report_error(err, kUsage, "usage", "no subcommand");
}

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run(args, std::cout, std::cerr);
}

}  // namespace xbarfilt::cli
