#include "xbarfilt/fit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "xbarfilt/error.hpp"

namespace xbarfilt {
namespace {

constexpr std::array<FitParam, 3> kScanParams{FitParam::Fs, FitParam::K2, FitParam::C0};

// Free coordinates of the problem, each mapped onto [0, 1] across its bounds.
struct Layout {
    std::vector<std::pair<std::size_t, std::size_t>> coords;  // (group, param)

    explicit Layout(const FitProblem& p) {
        for (std::size_t g = 0; g < p.groups.size(); ++g)
            for (std::size_t k = 0; k < kFitParamCount; ++k)
                if (p.groups[g].free[k] && p.groups[g].bounds[k].hi > p.groups[g].bounds[k].lo)
                    coords.emplace_back(g, k);
    }

    std::vector<std::array<double, kFitParamCount>> values(const FitProblem& p,
                                                           std::span<const double> u) const {
        std::vector<std::array<double, kFitParamCount>> v;
        for (const auto& g : p.groups) v.push_back(to_array(g.init));
        for (std::size_t i = 0; i < coords.size(); ++i) {
            const auto [g, k] = coords[i];
            const ParamBounds& b = p.groups[g].bounds[k];
            v[g][k] = b.lo + (b.hi - b.lo) * u[i];
        }
        return v;
    }

    std::vector<double> encode(const FitProblem& p) const {
        std::vector<double> u;
        for (const auto& [g, k] : coords) {
            const ParamBounds& b = p.groups[g].bounds[k];
            u.push_back((to_array(p.groups[g].init)[k] - b.lo) / (b.hi - b.lo));
        }
        return u;
    }
};

LadderDesign apply_values(const FitProblem& p, const std::vector<std::array<double, kFitParamCount>>& v) {
    LadderDesign d = p.model;
    for (Stage& s : d.stages) {
        for (std::size_t g = 0; g < p.groups.size(); ++g) {
            if (p.groups[g].label == s.label) s.resonator = from_array(v[g]);
        }
    }
    return d;
}

double norm(const std::vector<double>& r) {
    double s = 0.0;
    for (double x : r) s += x * x;
    return std::sqrt(s);
}

}  // namespace

const char* fit_param_name(FitParam p) {
    switch (p) {
        case FitParam::Fs: return "fs";
        case FitParam::K2: return "k2";
        case FitParam::Q: return "q";
        case FitParam::C0: return "c0";
        case FitParam::Rs: return "rs";
        case FitParam::Ls: return "ls";
    }
    return "?";
}

std::array<double, kFitParamCount> to_array(const MbvdParams& p) {
    return {p.fs, p.k2, p.q, p.c0, p.rs, p.ls};
}

MbvdParams from_array(const std::array<double, kFitParamCount>& a) {
    return {a[0], a[1], a[2], a[3], a[4], a[5]};
}

std::array<ParamBounds, kFitParamCount> default_bounds(const MbvdParams& p) {
    return {{
        {0.85 * p.fs, 1.15 * p.fs},
        {0.5 * p.k2, std::min(0.95, 2.0 * p.k2)},
        {0.25 * p.q, 4.0 * p.q},
        {0.5 * p.c0, 2.0 * p.c0},
        {0.0, std::max(4.0 * p.rs, 5.0)},
        {0.0, std::max(4.0 * p.ls, 1e-9)},
    }};
}

void FitProblem::validate() const {
    data.validate();
    model.validate();
    require(weights.empty() || weights.size() == data.size(), "fit: weights not aligned with data");
    for (const Stage& s : model.stages) {
        require(std::count_if(groups.begin(), groups.end(),
                              [&](const ShareGroup& g) { return g.label == s.label; }) == 1,
                "fit: stage '" + s.label + "' must belong to exactly one share group");
    }
    for (const ShareGroup& g : groups) {
        const auto v = to_array(g.init);
        for (std::size_t k = 0; k < kFitParamCount; ++k) {
            require(g.bounds[k].lo <= v[k] && v[k] <= g.bounds[k].hi,
                    "fit: initial " + std::string(fit_param_name(static_cast<FitParam>(k))) +
                        " of '" + g.label + "' lies outside its bounds");
        }
    }
}

FitProblem make_fit_problem(FrequencyResponse data, const LadderDesign& init) {
    FitProblem p;
    p.data = std::move(data);
    p.model = init;
    for (const Stage& s : init.stages) {
        if (std::any_of(p.groups.begin(), p.groups.end(),
                        [&](const ShareGroup& g) { return g.label == s.label; })) {
            continue;
        }
        ShareGroup g;
        g.label = s.label;
        g.init = s.resonator;
        g.bounds = default_bounds(s.resonator);
        p.groups.push_back(std::move(g));
    }
    return p;
}

std::vector<double> fit_residual(const FitProblem& problem, const LadderDesign& design) {
    const FrequencyResponse& d = problem.data;
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < d.size(); ++i) {
        const double f = d.grid[i];
        if (!problem.fit_band || (f >= problem.fit_band->lo && f <= problem.fit_band->hi)) keep.push_back(i);
    }
    std::vector<double> r;
    r.reserve(6 * keep.size());
    for (std::size_t i : keep) {
        const Matrix2c s = abcd_to_s(design_abcd(design, d.grid[i]), d.z0);
        const double w = problem.weights.empty() ? 1.0 : problem.weights[i];
        for (complex e : {s(0, 0) - d.s11[i], s(1, 0) - d.s21[i], s(1, 1) - d.s22[i]}) {
            r.push_back(w * e.real());
            r.push_back(w * e.imag());
        }
    }
    return r;
}

FitResult fit_mbvd(const FitProblem& problem, const FitOptions& opts) {
    problem.validate();
    const Layout layout(problem);
    std::vector<double> lo(layout.coords.size(), 0.0), hi(layout.coords.size(), 1.0);

    auto cost = [&](std::span<const double> u) {
        try {
            const auto r = fit_residual(problem, apply_values(problem, layout.values(problem, u)));
            return norm(r);
        } catch (const Error&) {
            return std::numeric_limits<double>::infinity();
        }
    };

    std::vector<double> u = layout.encode(problem);
    FitResult out;
    out.initial_residual_norm = cost(u);

    double data_norm = 0.0;
    for (std::size_t i = 0; i < problem.data.size(); ++i) {
        data_norm += std::norm(problem.data.s11[i]) + std::norm(problem.data.s21[i]) +
                     std::norm(problem.data.s22[i]);
    }
    const bool exact = out.initial_residual_norm <= 1e-14 * std::sqrt(data_norm);

    if (!exact) {
        // Resonances are sharp: a local solver started a few linewidths away
        // settles on the wrong side of a zero. Coarse scans place fs, k2 and c0
        // first.
        double best = out.initial_residual_norm;
        for (int round = 0; round < opts.scan_rounds; ++round) {
            for (std::size_t c = 0; c < layout.coords.size(); ++c) {
                const auto param = static_cast<FitParam>(layout.coords[c].second);
                if (std::find(kScanParams.begin(), kScanParams.end(), param) == kScanParams.end()) continue;
                const int n = param == FitParam::Fs ? opts.scan_points_fs : opts.scan_points_other;
                const double keep = u[c];
                double best_u = keep;
                for (int s = 0; s < n; ++s) {
                    u[c] = n == 1 ? 0.5 : static_cast<double>(s) / (n - 1);
                    const double v = cost(u);
                    if (v < best) {
                        best = v;
                        best_u = u[c];
                    }
                }
                u[c] = best_u;
            }
        }
        out.residual_history.push_back(best);
        const LmReport rep = minimize_box(
            [&](std::span<const double> x, std::vector<double>& r) {
                r = fit_residual(problem, apply_values(problem, layout.values(problem, x)));
            },
            u, lo, hi, opts.lm);
        u = rep.x;
        out.iterations = rep.iterations;
        out.converged = rep.converged;
        out.status = rep.status;
        for (std::size_t k = 1; k < rep.cost_history.size(); ++k) {
            out.residual_history.push_back(std::sqrt(2.0 * rep.cost_history[k]));
        }
    } else {
        out.converged = true;
        out.status = "initial model reproduces the data";
        out.residual_history.push_back(out.initial_residual_norm);
    }

    const auto values = layout.values(problem, u);
    out.design = apply_values(problem, values);
    out.residual_norm = cost(u);
    for (std::size_t g = 0; g < problem.groups.size(); ++g) {
        FittedGroup fg{problem.groups[g].label, from_array(values[g]), {}};
        for (std::size_t c = 0; c < layout.coords.size(); ++c) {
            if (layout.coords[c].first != g) continue;
            fg.at_bound[layout.coords[c].second] = u[c] <= 1e-9 || u[c] >= 1.0 - 1e-9;
        }
        out.groups.push_back(std::move(fg));
    }
    return out;
}

// ---------------------------------------------------------------- comparison

namespace {

std::array<std::string, kFitParamCount> display(const MbvdParams& p) {
    char buf[6][32];
    std::snprintf(buf[0], sizeof buf[0], "%.2f", p.fs / 1e9);
    std::snprintf(buf[1], sizeof buf[1], "%.1f", p.k2 * 100.0);
    std::snprintf(buf[2], sizeof buf[2], "%.0f", p.q);
    std::snprintf(buf[3], sizeof buf[3], "%.4g", p.c0 / 1e-15);
    std::snprintf(buf[4], sizeof buf[4], "%.4g", p.rs);
    std::snprintf(buf[5], sizeof buf[5], "%.4g", p.ls / 1e-9);
    return {buf[0], buf[1], buf[2], buf[3], buf[4], buf[5]};
}

constexpr std::array<const char*, kFitParamCount> kHeaders{"fs (GHz)", "k2 (%)", "Q",
                                                           "C0 (fF)", "Rs (Ohm)", "Ls (nH)"};

}  // namespace

std::array<double, kFitParamCount> ComparisonTable::relative_delta(const std::string& resonator,
                                                                   const std::string& source) const {
    const ComparisonRow* design = nullptr;
    const ComparisonRow* other = nullptr;
    for (const auto& r : rows) {
        if (r.resonator != resonator) continue;
        if (r.source == "Design") design = &r;
        if (r.source == source) other = &r;
    }
    require(design && other, "compare_table: no '" + source + "' row for '" + resonator + "'");
    const auto a = to_array(design->params), b = to_array(other->params);
    std::array<double, kFitParamCount> d{};
    for (std::size_t k = 0; k < kFitParamCount; ++k) {
        d[k] = a[k] == 0.0 ? b[k] - a[k] : (b[k] - a[k]) / a[k];
    }
    return d;
}

std::string ComparisonTable::to_csv() const {
    std::ostringstream os;
    os << "resonator,source,fs_ghz,k2_pct,q,c0_ff,rs_ohm,ls_nh\n";
    for (const auto& r : rows) {
        os << r.resonator << ',' << r.source;
        for (const auto& cell : display(r.params)) os << ',' << cell;
        os << '\n';
    }
    return os.str();
}

std::string ComparisonTable::to_text() const {
    std::ostringstream os;
    char line[256];
    std::snprintf(line, sizeof line, "%-10s %-15s", "Resonator", "Source");
    os << line;
    for (const char* h : kHeaders) {
        std::snprintf(line, sizeof line, " %9s", h);
        os << line;
    }
    os << '\n';
    for (const auto& r : rows) {
        std::snprintf(line, sizeof line, "%-10s %-15s", r.resonator.c_str(), r.source.c_str());
        os << line;
        for (const auto& cell : display(r.params)) {
            std::snprintf(line, sizeof line, " %9s", cell.c_str());
            os << line;
        }
        os << '\n';
    }
    return os.str();
}

ComparisonTable compare_table(const LabeledParams& design, const LabeledParams& filter_fit,
                              const LabeledParams& resonator_fit) {
    auto labels_of = [](const LabeledParams& v) {
        std::vector<std::string> l;
        for (const auto& [name, p] : v) l.push_back(name);
        std::sort(l.begin(), l.end());
        return l;
    };
    const auto want = labels_of(design);
    require(labels_of(filter_fit) == want, "compare_table: filter-fit labels do not match the design");
    require(resonator_fit.empty() || labels_of(resonator_fit) == want,
            "compare_table: resonator-fit labels do not match the design");
    auto find = [](const LabeledParams& v, const std::string& name) {
        return std::find_if(v.begin(), v.end(), [&](const auto& e) { return e.first == name; })->second;
    };
    ComparisonTable t;
    for (const auto& [name, p] : design) {
        t.rows.push_back({name, "Design", p});
        t.rows.push_back({name, "Filter fitting", find(filter_fit, name)});
        if (!resonator_fit.empty()) t.rows.push_back({name, "Res. fitting", find(resonator_fit, name)});
    }
    return t;
}

LabeledParams labeled_params(const LadderDesign& design) {
    LabeledParams out;
    for (const Stage& s : design.stages) {
        if (std::none_of(out.begin(), out.end(), [&](const auto& e) { return e.first == s.label; })) {
            out.emplace_back(s.label, s.resonator);
        }
    }
    return out;
}

LabeledParams labeled_params(const FitResult& fit) {
    LabeledParams out;
    for (const auto& g : fit.groups) out.emplace_back(g.label, g.params);
    return out;
}

}  // namespace xbarfilt
