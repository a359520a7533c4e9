#include "xbarfilt/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "xbarfilt/error.hpp"

namespace xbarfilt {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

MbvdParams make_resonator(double fs, double k2, double c0, const RoleParasitics& p) {
    return MbvdParams{fs, k2, p.q, c0, p.rs, p.ls};
}

std::vector<double> pack(const LadderDesign& d, const std::vector<std::string>& labels) {
    std::vector<double> x;
    for (const auto& label : labels) {
        const auto it = std::find_if(d.stages.begin(), d.stages.end(),
                                     [&](const Stage& s) { return s.label == label; });
        x.insert(x.end(), {it->resonator.fs, it->resonator.k2, it->resonator.c0});
    }
    return x;
}

void unpack(LadderDesign& d, const std::vector<std::string>& labels, const std::vector<double>& x) {
    for (std::size_t g = 0; g < labels.size(); ++g) {
        for (Stage& s : d.stages) {
            if (s.label != labels[g]) continue;
            s.resonator.fs = x[3 * g];
            s.resonator.k2 = x[3 * g + 1];
            s.resonator.c0 = x[3 * g + 2];
        }
    }
}

}  // namespace

void FilterTargets::validate() const {
    require(fc > 0.0, "targets: fc must be > 0");
    require(fbw > 0.0 && fbw < 0.3, "targets: fbw must lie in (0, 0.3)");
    require(z0 > 0.0, "targets: z0 must be > 0");
}

RoleParasitics default_series_parasitics(FilterOrder order) {
    return order == FilterOrder::ThreeElement ? RoleParasitics{80.0, 3.0, 0.2e-9}
                                              : RoleParasitics{80.0, 3.5, 0.1e-9};
}

RoleParasitics default_shunt_parasitics(FilterOrder order) {
    return order == FilterOrder::ThreeElement ? RoleParasitics{80.0, 1.0, 0.1e-9}
                                              : RoleParasitics{80.0, 2.5, 0.05e-9};
}

LadderDesign seed_design(const FilterTargets& targets, const SeedOptions& opts) {
    targets.validate();
    const RoleParasitics ser = opts.series.value_or(default_series_parasitics(targets.order));
    const RoleParasitics sh = opts.shunt.value_or(default_shunt_parasitics(targets.order));
    const double fc = targets.fc;
    const double beta = opts.beta.value_or(targets.order == FilterOrder::ThreeElement ? 1.8 : 2.3);
    const double half_span = 0.5 * beta * targets.fbw * fc;

    // Series fs sits at fc; every shunt fp is aligned onto it.
    const double fs_series = fc;
    const double k2_series = k2_from(fs_series, fs_series + half_span);
    auto aligned_shunt_k2 = [&](double fs_shunt) { return k2_from(fs_shunt, fs_series); };
    const double fs_shunt = fs_series - half_span;

    const double wc = kTwoPi * fc;
    const double c0_series = 1.0 / (wc * targets.z0 * opts.impedance_ratio);
    const double c0_shunt = opts.impedance_ratio / (wc * targets.z0);

    auto check_k2 = [&](double k2, const char* who) {
        if (k2 >= opts.k2_max || k2 >= 1.0) {
            throw SolverError(std::string("seed_design: ") + who + " needs k2 = " +
                              std::to_string(k2) + " above the material maximum " +
                              std::to_string(opts.k2_max));
        }
        return k2;
    };

    LadderDesign d;
    d.z0 = targets.z0;
    const MbvdParams series =
        make_resonator(fs_series, check_k2(k2_series, "series"), c0_series, ser);
    if (targets.order == FilterOrder::ThreeElement) {
        double fs_detuned = fs_shunt;
        if (targets.oob_bias == OobBias::LowerRejection) {
            fs_detuned = fs_shunt - 0.5 * targets.fbw * fc;
        } else if (targets.oob_bias == OobBias::Selectivity) {
            fs_detuned = fs_shunt + 0.25 * targets.fbw * fc;
        }
        const MbvdParams shunt1 = make_resonator(
            fs_detuned, check_k2(aligned_shunt_k2(fs_detuned), "shunt 1"), c0_shunt, sh);
        const MbvdParams shunt2 = make_resonator(
            fs_shunt, check_k2(aligned_shunt_k2(fs_shunt), "shunt 2"), c0_shunt, sh);
        d.stages = {{Placement::Shunt, shunt1, 1, "Shunt1"},
                    {Placement::Series, series, 1, "Series"},
                    {Placement::Shunt, shunt2, 1, "Shunt2"}};
    } else {
        const double k2_shunt = check_k2(aligned_shunt_k2(fs_shunt), "shunt");
        const MbvdParams shunt1 = make_resonator(fs_shunt, k2_shunt, c0_shunt, sh);
        const MbvdParams split = make_resonator(fs_shunt, k2_shunt, c0_shunt / 4.0, sh);
        d.stages = {{Placement::Shunt, shunt1, 1, "Shunt1"},
                    {Placement::Series, series, 1, "Series"},
                    {Placement::Shunt, split, 4, "Shunt2"},
                    {Placement::Series, series, 1, "Series"},
                    {Placement::Shunt, shunt1, 1, "Shunt1"}};
    }
    return d;
}

std::vector<std::string> distinct_labels(const LadderDesign& design) {
    std::vector<std::string> out;
    for (const Stage& s : design.stages) {
        if (std::find(out.begin(), out.end(), s.label) == out.end()) out.push_back(s.label);
    }
    return out;
}

FrequencyGrid synthesis_grid(double fc) {
    return FrequencyGrid::uniform(0.5 * fc, 1.5 * fc, 5e-4 * fc);
}

double synthesis_objective(const LadderDesign& design, const FilterTargets& targets,
                           const RefineKnobs& knobs, FilterMetrics* metrics_out) {
    for (const Stage& s : design.stages) {
        const MbvdParams& r = s.resonator;
        if (!(r.fs > 0.0 && r.k2 > 0.0 && r.k2 <= knobs.k2_max && r.c0 > 0.0)) return kInf;
    }
    try {
        const FrequencyResponse resp = cascade(design, synthesis_grid(targets.fc));
        MetricOptions mo;
        mo.tz_threshold_db = knobs.tz_threshold_db;
        const FilterMetrics m = compute_metrics(resp, mo, s21_evaluator(design));
        if (m.tz_list.empty() || m.tz_list.front() >= m.band3.lo || m.tz_list.back() <= m.band3.hi) {
            return kInf;
        }
        double s11_max = 0.0;
        for (std::size_t i = 0; i < resp.size(); ++i) {
            const double f = resp.grid[i];
            if (f >= m.band3.lo && f <= m.band3.hi) s11_max = std::max(s11_max, std::abs(resp.s11[i]));
        }
        if (knobs.material) {
            realize(design, *knobs.material, knobs.base_t_nm);
        }
        if (metrics_out) *metrics_out = m;
        return knobs.weights[0] * std::abs(m.fbw3 - targets.fbw) / targets.fbw +
               knobs.weights[1] * std::max(0.0, s11_max - knobs.s11_limit) +
               knobs.weights[2] * m.min_il +
               knobs.fc_weight * std::abs(m.fc - targets.fc) / targets.fc;
    } catch (const Error&) {
        return kInf;
    }
}

namespace {

// Clamp every resonator into the region the material can realize below the
// base film thickness.
LadderDesign project_onto_material(const LadderDesign& design, const MaterialSet& m, double base_t_nm) {
    const auto [hull_lo, hull_hi] = m.anisotropy.t_hull();
    const double t_lo = std::max(m.dispersion.t_min, hull_lo);
    const double t_hi = std::min({m.dispersion.t_max, hull_hi, base_t_nm});
    if (!(t_lo < t_hi)) throw SolverError("refine: the material has no usable thickness below the base film");
    LadderDesign out = design;
    for (Stage& s : out.stages) {
        MbvdParams& r = s.resonator;
        r.fs = std::clamp(r.fs, m.dispersion.fs_at(t_hi), m.dispersion.fs_at(t_lo));
        const double t_exact = std::clamp(thickness_for_fs(m.dispersion, r.fs), t_lo, t_hi);
        // Clamp k2 at the thickness realize() will use after trim rounding.
        const double t = std::clamp(base_t_nm - std::max(0.0, std::round(base_t_nm - t_exact)), t_lo, t_hi);
        const auto [th_lo, th_hi] = m.anisotropy.theta_span(t);
        const double k2_lo = m.anisotropy.k2_at(th_hi, t) * (1.0 + 1e-6);
        const double k2_hi = m.anisotropy.k2_at(th_lo, t) * (1.0 - 1e-6);
        r.k2 = std::clamp(r.k2, k2_lo, k2_hi);
    }
    return out;
}

SynthesisResult refine_from(const LadderDesign& seed, const FilterTargets& targets,
                            const RefineKnobs& knobs);

}  // namespace

SynthesisResult refine(const LadderDesign& seed, const FilterTargets& targets,
                       const RefineKnobs& knobs) {
    targets.validate();
    seed.validate();
    if (!knobs.material || std::isfinite(synthesis_objective(seed, targets, knobs))) {
        return refine_from(seed, targets, knobs);
    }
    // Unrealizable seed: refine electrically, project onto the material, then
    // refine again under the realizability constraint.
    RefineKnobs electrical = knobs;
    electrical.material.reset();
    SynthesisResult first = refine_from(seed, targets, electrical);
    const LadderDesign projected = project_onto_material(first.design, *knobs.material, knobs.base_t_nm);
    SynthesisResult second = refine_from(projected, targets, knobs);
    const int offset = first.passes;
    for (TraceEntry& e : second.trace) e.pass += offset;
    first.trace.insert(first.trace.end(), second.trace.begin(), second.trace.end());
    second.trace = std::move(first.trace);
    second.passes += offset;
    return second;
}

namespace {

SynthesisResult refine_from(const LadderDesign& seed, const FilterTargets& targets,
                            const RefineKnobs& knobs) {
    const auto labels = distinct_labels(seed);
    SynthesisResult out;
    out.design = seed;
    std::vector<double> x = pack(seed, labels);
    double best = synthesis_objective(seed, targets, knobs, &out.achieved);
    if (!std::isfinite(best)) {
        throw SolverError("refine: the seed design cannot be measured (no bounded passband)");
    }
    out.trace.push_back({0, x, best});

    if (best > knobs.target_objective) {
        double scale = 1.0;
        int restarts_left = knobs.restarts;
        LadderDesign trial = seed;
        for (int pass = 1; pass <= knobs.max_passes; ++pass) {
            out.passes = pass;
            const double pass_start = best;
            // The last coordinate shifts every fs together.
            for (std::size_t i = 0; i <= x.size(); ++i) {
                const bool shift = i == x.size();
                const double step = knobs.steps[shift ? 0 : i % 3] * scale;
                double chosen = best;
                std::vector<double> chosen_x;
                for (double dir : {+1.0, -1.0}) {
                    std::vector<double> cand = x;
                    if (shift) {
                        for (std::size_t j = 0; j < cand.size(); j += 3) cand[j] *= 1.0 + dir * step;
                    } else {
                        cand[i] *= 1.0 + dir * step;
                    }
                    unpack(trial, labels, cand);
                    const double obj = synthesis_objective(trial, targets, knobs);
                    if (obj < chosen) {
                        chosen = obj;
                        chosen_x = std::move(cand);
                    }
                }
                if (!chosen_x.empty()) {
                    x = std::move(chosen_x);
                    best = chosen;
                    out.trace.push_back({pass, x, best});
                }
            }
            if (pass_start - best < knobs.min_improvement) {
                if (scale * 0.5 >= knobs.min_step_scale) {
                    scale *= 0.5;
                } else if (restarts_left > 0) {
                    --restarts_left;
                    scale = 1.0;
                } else {
                    out.converged = true;
                    break;
                }
            }
        }
        unpack(out.design, labels, x);
        synthesis_objective(out.design, targets, knobs, &out.achieved);
    } else {
        out.converged = true;
    }
    if (knobs.material) {
        out.realization = realize(out.design, *knobs.material, knobs.base_t_nm);
    }
    return out;
}

}  // namespace

std::vector<PhysicalRealization> realize(const LadderDesign& design, const MaterialSet& material,
                                         double base_t_nm,
                                         std::optional<std::vector<double>> allowed_steps,
                                         double trim_resolution_nm) {
    design.validate();
    require(trim_resolution_nm > 0.0, "realize: trim resolution must be > 0");
    const auto labels = distinct_labels(design);
    std::vector<PhysicalRealization> out;
    std::vector<double> thicknesses;
    for (const auto& label : labels) {
        const Stage& s = *std::find_if(design.stages.begin(), design.stages.end(),
                                       [&](const Stage& st) { return st.label == label; });
        PhysicalRealization r;
        r.label = label;
        r.base_t_nm = base_t_nm;
        double t_exact = 0.0;
        try {
            t_exact = thickness_for_fs(material.dispersion, s.resonator.fs);
        } catch (const SolverError& e) {
            throw SolverError("realize: resonator '" + label + "' unreachable on fs axis: " + e.what());
        }
        const double depth =
            std::max(0.0, std::round((base_t_nm - t_exact) / trim_resolution_nm) * trim_resolution_nm);
        r.t_nm = base_t_nm - depth;
        if (t_exact > base_t_nm + 0.5 * trim_resolution_nm) {
            throw SolverError("realize: resonator '" + label + "' needs t = " +
                              std::to_string(t_exact) + " nm, thicker than the base film");
        }
        try {
            r.theta_deg = theta_for_k2(material.anisotropy, s.resonator.k2, r.t_nm);
        } catch (const SolverError& e) {
            throw SolverError("realize: resonator '" + label + "' unreachable on k2 axis: " + e.what());
        }
        try {
            const Geometry g = geometry_for_c0(material.density, s.resonator.c0, r.t_nm, material.geometry);
            r.ne = g.ne;
            r.ng = g.ng;
            r.le_um = g.le_um;
        } catch (const SolverError& e) {
            throw SolverError("realize: resonator '" + label + "' unreachable on c0 axis: " + e.what());
        }
        thicknesses.push_back(r.t_nm);
        out.push_back(std::move(r));
    }
    const TrimPlan plan = plan_trims(base_t_nm, thicknesses, std::move(allowed_steps));
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i].trims_nm = plan.per_target[i];
        // t is re-derived from the plan so the thickness bookkeeping is exact.
        out[i].t_nm = base_t_nm - std::accumulate(out[i].trims_nm.begin(), out[i].trims_nm.end(), 0.0);
        out[i].validate();
    }
    return out;
}

MbvdParams forward_model(const PhysicalRealization& r, const MaterialSet& material,
                         const MbvdParams& parasitics) {
    MbvdParams p = parasitics;
    p.fs = material.dispersion.fs_at(r.t_nm);
    p.k2 = material.anisotropy.k2_at(r.theta_deg, r.t_nm);
    p.c0 = c0_of(material.density, r.t_nm, r.ne, r.ng, r.le_um);
    return p;
}

ScaledDesign scale_design(const LadderDesign& design,
                          const std::vector<PhysicalRealization>& realization, double factor,
                          const DispersionModel& dispersion) {
    require(factor > 0.0, "scale_design: factor must be > 0");
    design.validate();
    if (factor == 1.0) return {design, realization};
    ScaledDesign out{design, realization};
    for (PhysicalRealization& r : out.realization) {
        const double t_new = r.t_nm / factor;
        if (!dispersion.in_range(t_new)) {
            throw SolverError("scale_design: resonator '" + r.label + "' would need t = " +
                              std::to_string(t_new) + " nm, outside the dispersion validity range");
        }
        r.base_t_nm /= factor;
        for (double& trim : r.trims_nm) trim /= factor;
        r.t_nm = r.base_t_nm - std::accumulate(r.trims_nm.begin(), r.trims_nm.end(), 0.0);
    }
    for (Stage& s : out.design.stages) {
        const auto it = std::find_if(realization.begin(), realization.end(),
                                     [&](const PhysicalRealization& r) { return r.label == s.label; });
        if (it == realization.end()) {
            s.resonator.fs *= factor;
            s.resonator.c0 /= factor;
            continue;
        }
        const double t_old = it->t_nm;
        const double t_new = t_old / factor;
        s.resonator.fs *= dispersion.fs_at(t_new) / dispersion.fs_at(t_old);
        s.resonator.c0 *= t_new / t_old;
    }
    return out;
}

LadderDesign scale_design(const LadderDesign& design, double factor) {
    return scale_design(design, {}, factor, DispersionModel{}).design;
}

}  // namespace xbarfilt
