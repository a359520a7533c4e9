// Acceptance criteria 1-7: one PASS/FAIL line each; exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "xbarfilt/error.hpp"
#include "xbarfilt/fit.hpp"
#include "xbarfilt/io/csv.hpp"
#include "xbarfilt/io/design_file.hpp"
#include "xbarfilt/ladder.hpp"
#include "xbarfilt/material.hpp"
#include "xbarfilt/mbvd.hpp"
#include "xbarfilt/metrics.hpp"
#include "xbarfilt/synth.hpp"

using namespace xbarfilt;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void check(bool ok, const std::string& what) {
        pass = pass && ok;
        if (!detail.empty()) detail += "; ";
        detail += (ok ? "" : "!") + what;
    }
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

std::filesystem::path source_dir() { return XBARFILT_SOURCE_DIR; }

FilterMetrics simulate_metrics(const LadderDesign& d) {
    const FrequencyResponse r = cascade(d, FrequencyGrid::uniform(1e9, 40e9, 1e7));
    return compute_metrics(r, {}, s21_evaluator(d));
}

struct Band {
    double value, target, tol;
    const char* name;
    const char* unit_fmt;
    double unit;
};

void check_bands(Outcome& o, const std::vector<Band>& bands) {
    for (const Band& b : bands) {
        o.check(std::abs(b.value - b.target) <= b.tol,
                std::string(b.name) + "=" + fmt(b.unit_fmt, b.value / b.unit));
    }
}

Outcome criterion_three_element() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    const io::DesignFile f = io::load_design(source_dir() / "data/designs/three_element.json");
    const FilterMetrics m = simulate_metrics(f.design);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    check_bands(o, {{m.fc, 20.5e9, 0.005 * 20.5e9, "fc", "%.4f GHz", 1e9},
                    {m.min_il, 1.69, 0.3, "IL", "%.2f dB", 1.0},
                    {m.fbw3, 0.0954, 0.005, "fbw3", "%.2f%%", 0.01},
                    {m.fbw20, 0.168, 0.01, "fbw20", "%.2f%%", 0.01},
                    {m.oob_lower.db, 14.59, 2.0, "oob_lo", "%.2f dB", 1.0},
                    {m.oob_lower.freq, 9.2e9, 0.5e9, "@", "%.2f GHz", 1e9},
                    {m.oob_upper.db, 15.42, 2.0, "oob_hi", "%.2f dB", 1.0},
                    {m.oob_upper.freq, 24.5e9, 0.5e9, "@", "%.2f GHz", 1e9}});
    o.check(secs < 1.0, "runtime=" + fmt("%.3f s", secs));
    return o;
}

Outcome criterion_eight_element() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    const io::DesignFile f = io::load_design(source_dir() / "data/designs/eight_element.json");
    const FilterMetrics m = simulate_metrics(f.design);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    check_bands(o, {{m.fc, 22.0e9, 0.005 * 22.0e9, "fc", "%.4f GHz", 1e9},
                    {m.min_il, 3.08, 0.5, "IL", "%.2f dB", 1.0},
                    {m.fbw3, 0.064, 0.005, "fbw3", "%.2f%%", 0.01},
                    {m.fbw20, 0.121, 0.015, "fbw20", "%.2f%%", 0.01},
                    {m.oob_lower.db, 21.57, 2.0, "oob_lo", "%.2f dB", 1.0},
                    {m.oob_lower.freq, 10.4e9, 1.0e9, "@", "%.2f GHz", 1e9},
                    {m.oob_upper.db, 25.94, 2.0, "oob_hi", "%.2f dB", 1.0},
                    {m.oob_upper.freq, 26.8e9, 1.0e9, "@", "%.2f GHz", 1e9}});
    o.check(secs < 1.0, "runtime=" + fmt("%.3f s", secs));
    return o;
}

MbvdParams random_params(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    return {1e9 * (5.0 + 35.0 * u(rng)), 0.01 + 0.5 * u(rng), 10.0 + 1000.0 * u(rng),
            1e-15 * (10.0 + 300.0 * u(rng)), 5.0 * u(rng), 0.5e-9 * u(rng)};
}

Outcome criterion_equations() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(2024);
    double worst_lc = 0.0, worst_k2 = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const MbvdParams p = random_params(rng);
        const MotionalBranch mb = derive_motional(p);
        const double ws = kTwoPi * p.fs;
        worst_lc = std::max(worst_lc, std::abs(mb.lm * mb.cm * ws * ws - 1.0));
        worst_k2 = std::max(worst_k2, rel(k2_from(p.fs, fp_from(p.fs, p.k2)), p.k2));
    }
    o.check(worst_lc <= 1e-12, "lm*cm*ws^2 err=" + fmt("%.1e", worst_lc));
    o.check(worst_k2 <= 1e-12, "k2 round trip err=" + fmt("%.1e", worst_k2));

    double worst_recip = 0.0, worst_passive = 0.0, worst_lossless = 0.0;
    const FrequencyGrid grid = FrequencyGrid::uniform(1e9, 40e9, 5e7);
    for (int i = 0; i < 100; ++i) {
        LadderDesign d;
        const int n = 3 + i % 3;
        for (int k = 0; k < n; ++k) {
            d.stages.push_back({k % 2 ? Placement::Series : Placement::Shunt, random_params(rng), 1 + (i + k) % 2,
                                "r" + std::to_string(k)});
        }
        const FrequencyResponse r = cascade(d, grid);
        for (Stage& s : d.stages) {
            s.resonator.q = 1e12;
            s.resonator.rs = 0.0;
        }
        const FrequencyResponse l = cascade(d, grid);
        for (std::size_t k = 0; k < r.size(); ++k) {
            worst_recip = std::max(worst_recip, std::abs(r.s21[k] - r.s12[k]));
            worst_passive = std::max(worst_passive, std::norm(r.s11[k]) + std::norm(r.s21[k]) - 1.0);
            worst_lossless = std::max(worst_lossless, std::abs(std::norm(l.s11[k]) + std::norm(l.s21[k]) - 1.0));
        }
    }
    o.check(worst_recip <= 1e-10, "|s21-s12|=" + fmt("%.1e", worst_recip));
    o.check(worst_passive <= 1e-9, "passivity excess=" + fmt("%.1e", std::max(0.0, worst_passive)));
    o.check(worst_lossless <= 1e-8, "lossless err=" + fmt("%.1e", worst_lossless));
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.check(secs < 5.0, "runtime=" + fmt("%.3f s", secs));
    return o;
}

Outcome criterion_scaling() {
    Outcome o;
    LadderDesign base = io::load_design(source_dir() / "data/designs/three_element.json").design;
    for (Stage& s : base.stages) {
        s.resonator.rs = 0.0;
        s.resonator.ls = 0.0;
    }
    const auto realization = realize(base, default_material(), 99.0);
    std::vector<DispersionAnchor> anchors;
    for (double t : {80.0, 90.0, 100.0}) anchors.push_back({t, 1750e9 / t});
    const DispersionModel reciprocal = fit_dispersion(anchors, std::pair{60.0, 130.0});
    const FilterMetrics m0 = simulate_metrics(base);
    double worst_fbw = 0.0, worst_fc = 0.0;
    for (double factor : {0.8, 1.0, 1.25}) {
        const ScaledDesign s = scale_design(base, realization, factor, reciprocal);
        const FrequencyResponse r = cascade(s.design, FrequencyGrid::uniform(1e9 * factor, 40e9 * factor, 1e7 * factor));
        const FilterMetrics m = compute_metrics(r, {}, s21_evaluator(s.design));
        worst_fbw = std::max(worst_fbw, std::abs(m.fbw3 - m0.fbw3));
        worst_fc = std::max(worst_fc, rel(m.fc, m0.fc * factor));
    }
    o.check(worst_fbw < 5e-4, "max |dfbw3|=" + fmt("%.2e pp", worst_fbw * 100.0));
    o.check(worst_fc <= 1e-4, "max fc scaling err=" + fmt("%.2e", worst_fc));
    return o;
}

FitResult run_fit(const FrequencyResponse& data, const LadderDesign& init) {
    return fit_mbvd(make_fit_problem(data, init));
}

Outcome criterion_fit() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    const LadderDesign truth = io::load_design(source_dir() / "data/designs/three_element.json").design;
    const FrequencyResponse clean = cascade(truth, FrequencyGrid::uniform(10e9, 30e9, 2e7));

    auto perturb = [&](const std::array<double, 3>& signs) {
        LadderDesign d = truth;
        for (std::size_t i = 0; i < d.stages.size(); ++i) {
            MbvdParams& r = d.stages[i].resonator;
            r.fs *= 1.0 + 0.10 * signs[i];
            r.k2 *= 1.0 - 0.10 * signs[i];
            r.c0 *= 1.0 + 0.10 * signs[i];
            r.q *= 1.0 - 0.10 * signs[i];
        }
        return d;
    };
    auto fs_err = [&](const FitResult& r) {
        double e = 0.0;
        for (std::size_t i = 0; i < truth.stages.size(); ++i)
            e = std::max(e, rel(r.design.stages[i].resonator.fs, truth.stages[i].resonator.fs));
        return e;
    };

    const FitResult clean_fit = run_fit(clean, perturb({1.0, -1.0, 1.0}));
    double k2_err = 0.0, c0_err = 0.0;
    for (std::size_t i = 0; i < truth.stages.size(); ++i) {
        k2_err = std::max(k2_err, rel(clean_fit.design.stages[i].resonator.k2, truth.stages[i].resonator.k2));
        c0_err = std::max(c0_err, rel(clean_fit.design.stages[i].resonator.c0, truth.stages[i].resonator.c0));
    }
    o.check(fs_err(clean_fit) <= 1e-3, "noiseless fs err=" + fmt("%.1e", fs_err(clean_fit)));
    o.check(k2_err <= 0.02, "k2 err=" + fmt("%.1e", k2_err));
    o.check(c0_err <= 0.02, "c0 err=" + fmt("%.1e", c0_err));

    // Complex Gaussian noise with E|n|^2 = sigma^2 on every S entry.
    std::mt19937_64 rng(7);
    std::normal_distribution<double> n(0.0, 0.01 / std::sqrt(2.0));
    std::uniform_int_distribution<int> coin(0, 1);
    int good = 0;
    for (int trial = 0; trial < 20; ++trial) {
        FrequencyResponse noisy = clean;
        for (std::size_t i = 0; i < noisy.size(); ++i) {
            noisy.s11[i] += complex(n(rng), n(rng));
            noisy.s21[i] += complex(n(rng), n(rng));
            noisy.s12[i] += complex(n(rng), n(rng));
            noisy.s22[i] += complex(n(rng), n(rng));
        }
        std::array<double, 3> signs{};
        for (double& s : signs) s = coin(rng) ? 1.0 : -1.0;
        if (fs_err(run_fit(noisy, perturb(signs))) <= 5e-3) ++good;
    }
    o.check(good >= 18, "noisy fs within 0.5% in " + std::to_string(good) + "/20");
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.check(secs < 30.0, "runtime=" + fmt("%.1f s", secs));
    return o;
}

MaterialSet material_dir(const char* name) { return io::load_material_dir(source_dir() / "data/material" / name); }

Outcome criterion_synthesis() {
    Outcome o;
    struct Case {
        FilterTargets targets;
        OobBias bias;
        const char* material;
        double base;
        double il_max;
    };
    const std::vector<Case> cases{
        {{20.5e9, 0.095, 50.0, FilterOrder::ThreeElement, OobBias::LowerRejection}, OobBias::LowerRejection, "three_element", 99.0, 2.5},
        {{22.0e9, 0.064, 50.0, FilterOrder::EightElement, OobBias::None}, OobBias::None, "eight_element", 96.0, 4.5}};
    for (const Case& c : cases) {
        const auto t0 = std::chrono::steady_clock::now();
        RefineKnobs k;
        k.material = material_dir(c.material);
        k.base_t_nm = c.base;
        const SynthesisResult r = refine(seed_design(c.targets), c.targets, k);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const std::string tag = fmt("%.1f GHz: ", c.targets.fc / 1e9);
        o.check(std::abs(r.achieved.fbw3 - c.targets.fbw) <= 0.005, tag + "fbw3=" + fmt("%.2f%%", r.achieved.fbw3 * 100));
        o.check(r.achieved.min_il < c.il_max, "IL=" + fmt("%.2f dB", r.achieved.min_il));
        double fs_err = 0.0, k2_err = 0.0, c0_err = 0.0;
        for (const PhysicalRealization& p : r.realization) {
            const Stage& s = *std::find_if(r.design.stages.begin(), r.design.stages.end(),
                                           [&](const Stage& st) { return st.label == p.label; });
            const MbvdParams back = forward_model(p, *k.material, s.resonator);
            fs_err = std::max(fs_err, rel(back.fs, s.resonator.fs));
            k2_err = std::max(k2_err, std::abs(back.k2 - s.resonator.k2));
            c0_err = std::max(c0_err, rel(back.c0, s.resonator.c0));
        }
        o.check(!r.realization.empty() && fs_err <= 0.03 && k2_err <= 0.02 && c0_err <= 0.02,
                "round trip fs " + fmt("%.2f%%", fs_err * 100) + " k2 " + fmt("%.2f pp", k2_err * 100) + " c0 " +
                    fmt("%.2f%%", c0_err * 100));
        o.detail += " (" + fmt("%.1f s", secs) + ")";
    }
    return o;
}

std::string steps_text(const std::vector<double>& steps) {
    std::string s = "{";
    for (std::size_t i = 0; i < steps.size(); ++i) s += (i ? "," : "") + fmt("%g", steps[i]);
    return s + "}";
}

Outcome criterion_trims() {
    Outcome o;
    const std::vector<double> t1{99.0, 92.0, 83.0};
    const TrimPlan a = plan_trims(99.0, t1);
    std::vector<double> sa = a.steps;
    std::sort(sa.begin(), sa.end());
    o.check(sa == std::vector<double>{7.0, 9.0}, "base 99 steps=" + steps_text(a.steps));
    const std::vector<double> t2{89.0, 80.0};
    const TrimPlan b = plan_trims(96.0, t2, a.steps);
    std::vector<double> sb = b.steps;
    std::sort(sb.begin(), sb.end());
    o.check(sb == sa, "base 96 steps=" + steps_text(b.steps));
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"three-element reproduction", criterion_three_element},
        {"eight-element reproduction", criterion_eight_element},
        {"equation suite", criterion_equations},
        {"frequency scaling", criterion_scaling},
        {"fit recovery", criterion_fit},
        {"synthesis closure", criterion_synthesis},
        {"trim plan", criterion_trims},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        if (!o.pass) ++failures;
        std::printf("criterion %zu %s: %s (%s)\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first, o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria pass\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
