#include "xbarfilt/material.hpp"

#include <algorithm>
#include <cstdint>
#include <string>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "xbarfilt/error.hpp"

namespace xbarfilt {
namespace {

constexpr double kDepthTol = 1e-6;  // nm

bool near(double a, double b) { return std::abs(a - b) <= kDepthTol; }

// Fritsch-Carlson slopes: shape preserving, no overshoot between anchors.
std::vector<double> monotone_slopes(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    std::vector<double> m(n, 0.0);
    if (n < 2) return m;
    std::vector<double> d(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) d[i] = (y[i + 1] - y[i]) / (x[i + 1] - x[i]);
    if (n == 2) {
        m[0] = m[1] = d[0];
        return m;
    }
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (d[i - 1] * d[i] <= 0.0) continue;
        const double w1 = 2.0 * (x[i + 1] - x[i]) + (x[i] - x[i - 1]);
        const double w2 = (x[i + 1] - x[i]) + 2.0 * (x[i] - x[i - 1]);
        m[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
    }
    auto end_slope = [](double h0, double h1, double d0, double d1) {
        double s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if (s * d0 <= 0.0) return 0.0;
        if (d0 * d1 <= 0.0 && std::abs(s) > std::abs(3.0 * d0)) return 3.0 * d0;
        return s;
    };
    m[0] = end_slope(x[1] - x[0], x[2] - x[1], d[0], d[1]);
    m[n - 1] = end_slope(x[n - 1] - x[n - 2], x[n - 2] - x[n - 3], d[n - 2], d[n - 3]);
    return m;
}

}  // namespace

// ---------------------------------------------------------------- dispersion

double DispersionModel::fs_at(double t_nm) const { return a / (t_nm + offset_nm) + b; }

std::vector<double> DispersionModel::residuals() const {
    std::vector<double> r;
    for (const auto& an : anchors) r.push_back((fs_at(an.t_nm) - an.fs_hz) / an.fs_hz);
    return r;
}

DispersionModel fit_dispersion(std::span<const DispersionAnchor> anchors,
                               std::optional<std::pair<double, double>> validity) {
    std::vector<double> ts;
    for (const auto& an : anchors) {
        require(an.t_nm > 0.0 && an.fs_hz > 0.0, "fit_dispersion: anchors must be positive");
        if (std::none_of(ts.begin(), ts.end(), [&](double t) { return t == an.t_nm; })) {
            ts.push_back(an.t_nm);
        }
    }
    require(ts.size() >= 2, "fit_dispersion: need anchors at two or more distinct thicknesses");

    // Normal equations for fs = a*u + b with u = 1/t.
    double su = 0, suu = 0, sy = 0, suy = 0;
    for (const auto& an : anchors) {
        const double u = 1.0 / an.t_nm;
        su += u;
        suu += u * u;
        sy += an.fs_hz;
        suy += u * an.fs_hz;
    }
    const auto n = static_cast<double>(anchors.size());
    const double det = n * suu - su * su;
    DispersionModel m;
    m.a = (n * suy - su * sy) / det;
    m.b = (sy - m.a * su) / n;
    m.anchors.assign(anchors.begin(), anchors.end());
    const auto [lo, hi] = std::minmax_element(ts.begin(), ts.end());
    if (validity) {
        m.t_min = validity->first;
        m.t_max = validity->second;
    } else {
        m.t_min = 0.7 * *lo;
        m.t_max = 1.3 * *hi;
    }
    require(m.t_max > m.t_min, "fit_dispersion: empty validity range");
    require(m.a > 0.0, "fit_dispersion: fitted fs does not decrease with thickness");
    return m;
}

DispersionModel calibrate_offset(const DispersionModel& model, double t_nm, double measured_fs_hz) {
    require(measured_fs_hz > model.b, "calibrate_offset: measured fs below the model asymptote");
    DispersionModel out = model;
    out.offset_nm = model.a / (measured_fs_hz - model.b) - t_nm;
    return out;
}

double thickness_for_fs(const DispersionModel& model, double fs_hz) {
    double lo = model.t_min, hi = model.t_max;
    const double f_thin = model.fs_at(lo), f_thick = model.fs_at(hi);
    if (!(fs_hz <= f_thin && fs_hz >= f_thick)) {
        throw SolverError("thickness_for_fs: fs target outside the model range [" +
                          std::to_string(f_thick) + ", " + std::to_string(f_thin) + "] Hz");
    }
    while (hi - lo > 1e-4) {
        const double mid = 0.5 * (lo + hi);
        if (model.fs_at(mid) > fs_hz) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// ---------------------------------------------------------------- anisotropy

double AnisotropyModel::Curve::eval(double th) const {
    const std::size_t n = theta.size();
    if (n == 1) return k2.front();
    std::size_t i = static_cast<std::size_t>(
        std::upper_bound(theta.begin(), theta.end(), th) - theta.begin());
    i = std::clamp<std::size_t>(i, 1, n - 1) - 1;
    const double h = theta[i + 1] - theta[i];
    const double s = (th - theta[i]) / h;
    const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
    const double h10 = s * (1 - s) * (1 - s);
    const double h01 = s * s * (3 - 2 * s);
    const double h11 = s * s * (s - 1);
    return h00 * k2[i] + h10 * h * slope[i] + h01 * k2[i + 1] + h11 * h * slope[i + 1];
}

AnisotropyModel::AnisotropyModel(std::vector<AnisotropyAnchor> anchors)
    : anchors_(std::move(anchors)) {
    require(!anchors_.empty(), "anisotropy: anchor table is empty");
    std::map<double, std::map<double, double>> by_t;
    for (const auto& an : anchors_) {
        require(an.k2 > 0.0 && an.k2 < 1.0, "anisotropy: k2 anchors must lie in (0, 1)");
        require(an.t_nm > 0.0, "anisotropy: thickness must be > 0");
        require(an.theta_deg >= 0.0 && an.theta_deg <= 90.0,
                "anisotropy: theta anchors must lie in [0, 90] degrees");
        auto [it, inserted] = by_t[an.t_nm].emplace(an.theta_deg, an.k2);
        require(inserted || it->second == an.k2,
                "anisotropy: conflicting anchors at the same (theta, t)");
    }
    for (const auto& [t, rows] : by_t) {
        Curve c;
        c.t = t;
        for (const auto& [th, k] : rows) {
            if (!c.k2.empty()) {
                require(k <= c.k2.back(), "anisotropy: k2 must be non-increasing in theta at t = " +
                                              std::to_string(t) + " nm");
            }
            c.theta.push_back(th);
            c.k2.push_back(k);
        }
        c.slope = monotone_slopes(c.theta, c.k2);
        curves_.push_back(std::move(c));
    }
}

std::pair<double, double> AnisotropyModel::t_hull() const {
    return {curves_.front().t, curves_.back().t};
}

std::vector<const AnisotropyModel::Curve*> AnisotropyModel::bracket(double theta_deg,
                                                                    double t_nm) const {
    const Curve* below = nullptr;
    const Curve* above = nullptr;
    for (const Curve& c : curves_) {
        if (!c.covers(theta_deg)) continue;
        if (c.t <= t_nm) below = &c;
        if (c.t >= t_nm && above == nullptr) above = &c;
    }
    std::vector<const Curve*> out;
    if (below) out.push_back(below);
    if (above && above != below) out.push_back(above);
    return out;
}

double AnisotropyModel::k2_at(double theta_deg, double t_nm) const {
    require(!curves_.empty(), "anisotropy: model has no anchors");
    const auto [t_lo, t_hi] = t_hull();
    if (t_nm < t_lo || t_nm > t_hi) {
        throw SolverError("k2_at: thickness " + std::to_string(t_nm) +
                          " nm outside the anchored hull");
    }
    const auto curves = bracket(theta_deg, t_nm);
    if (curves.empty()) {
        throw SolverError("k2_at: no anchored curve covers theta = " + std::to_string(theta_deg) +
                          " deg near t = " + std::to_string(t_nm) + " nm");
    }
    if (curves.size() == 1) return curves[0]->eval(theta_deg);
    const double w = (t_nm - curves[0]->t) / (curves[1]->t - curves[0]->t);
    return (1.0 - w) * curves[0]->eval(theta_deg) + w * curves[1]->eval(theta_deg);
}

std::pair<double, double> AnisotropyModel::theta_span(double t_nm) const {
    // The span is set by the nearest multi-anchor curves on each side of t, so
    // every angle inside it is evaluated from the same curves and k2 is continuous.
    const Curve* below = nullptr;
    const Curve* above = nullptr;
    for (const Curve& c : curves_) {
        if (c.theta.size() < 2) continue;
        if (c.t <= t_nm) below = &c;
        if (c.t >= t_nm && above == nullptr) above = &c;
    }
    if (!below && !above) {
        // Single-angle curves only.
        const auto curves = bracket(curves_.front().theta.front(), t_nm);
        if (curves.empty()) throw SolverError("theta_span: no curve covers t = " + std::to_string(t_nm));
        return {curves_.front().theta.front(), curves_.front().theta.front()};
    }
    double lo = -std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const Curve* c : {below, above}) {
        if (!c) continue;
        lo = std::max(lo, c->theta.front());
        hi = std::min(hi, c->theta.back());
    }
    if (lo > hi) throw SolverError("theta_span: no curve covers t = " + std::to_string(t_nm));
    return {lo, hi};
}

double theta_for_k2(const AnisotropyModel& model, double k2, double t_nm) {
    auto [lo, hi] = model.theta_span(t_nm);
    const double k_max = model.k2_at(lo, t_nm);
    const double k_min = model.k2_at(hi, t_nm);
    if (k2 > k_max + 1e-12 || k2 < k_min - 1e-12) {
        throw SolverError("theta_for_k2: k2 = " + std::to_string(k2) + " unreachable at t = " +
                          std::to_string(t_nm) + " nm (range " + std::to_string(k_min) + " .. " +
                          std::to_string(k_max) + ")");
    }
    while (hi - lo > 1e-3) {
        const double mid = 0.5 * (lo + hi);
        if (model.k2_at(mid, t_nm) > k2) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// ---------------------------------------------------------------- capacitance

double c0_of(const CapacitanceDensity& d, double t_nm, int ne, int ng, double le_um) {
    return d.rho * t_nm * active_pairs(ne, ng) * le_um;
}

CapacitanceDensity fit_capacitance_density(std::span<const CapacitanceRow> rows) {
    require(!rows.empty(), "fit_capacitance_density: no rows");
    // Minimize sum((rho*x - c)/c)^2 with x = t*pairs*le.
    double num = 0.0, den = 0.0;
    for (const auto& r : rows) {
        require(r.c0_f > 0.0 && r.t_nm > 0.0 && r.le_um > 0.0 && active_pairs(r.ne, r.ng) >= 1,
                "fit_capacitance_density: invalid row");
        const double ratio = r.t_nm * active_pairs(r.ne, r.ng) * r.le_um / r.c0_f;
        num += ratio;
        den += ratio * ratio;
    }
    return {num / den};
}

Geometry geometry_for_c0(const CapacitanceDensity& d, double c0_target_f, double t_nm,
                         const GeometryOptions& opts) {
    require(c0_target_f > 0.0, "geometry_for_c0: target capacitance must be > 0");
    require(d.rho > 0.0 && t_nm > 0.0, "geometry_for_c0: density and thickness must be > 0");
    require(opts.le_max_um > opts.le_min_um && opts.le_min_um > 0.0,
            "geometry_for_c0: invalid finger-length bounds");
    std::optional<Geometry> best;
    for (int ne : opts.ne_options) {
        for (int ng = 1; ng <= opts.max_groups; ++ng) {
            if (active_pairs(ne, ng) < 1) continue;
            double le = c0_target_f / (d.rho * t_nm * active_pairs(ne, ng));
            le = std::round(le / opts.le_resolution_um) * opts.le_resolution_um;
            if (le < opts.le_min_um || le > opts.le_max_um) continue;
            if (!best || ne * ng < best->ne * best->ng) best = Geometry{ne, ng, le};
            break;
        }
    }
    if (!best) {
        throw SolverError("geometry_for_c0: no (ne, ng) places the finger length inside [" +
                          std::to_string(opts.le_min_um) + ", " + std::to_string(opts.le_max_um) +
                          "] um");
    }
    return *best;
}

// ---------------------------------------------------------------- trims

namespace {

// Indices of `steps` whose sum equals `depth`, preferring fewer and earlier steps.
std::optional<std::vector<std::size_t>> subset_for(const std::vector<double>& steps, double depth) {
    const std::size_t n = steps.size();
    std::optional<std::vector<std::size_t>> best;
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        double sum = 0.0;
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < n; ++i) {
            if (mask & (1u << i)) {
                sum += steps[i];
                idx.push_back(i);
            }
        }
        if (!near(sum, depth)) continue;
        if (!best || idx.size() < best->size() || (idx.size() == best->size() && idx < *best)) {
            best = idx;
        }
    }
    return best;
}

bool covers_all(const std::vector<double>& steps, const std::vector<double>& depths) {
    return std::all_of(depths.begin(), depths.end(),
                       [&](double d) { return subset_for(steps, d).has_value(); });
}

}  // namespace

TrimPlan plan_trims(double base_t_nm, std::span<const double> targets_nm,
                    std::optional<std::vector<double>> allowed_steps) {
    require(base_t_nm > 0.0, "plan_trims: base thickness must be > 0");
    std::vector<double> depths;
    for (double t : targets_nm) {
        if (t > base_t_nm + kDepthTol) {
            throw SolverError("plan_trims: target " + std::to_string(t) +
                              " nm is thicker than the base " + std::to_string(base_t_nm) + " nm");
        }
        const double d = std::max(0.0, base_t_nm - t);
        if (d > kDepthTol && std::none_of(depths.begin(), depths.end(),
                                          [&](double x) { return near(x, d); })) {
            depths.push_back(d);
        }
    }
    std::sort(depths.begin(), depths.end());

    std::vector<double> steps;
    if (allowed_steps) {
        steps = *allowed_steps;
        require(steps.size() <= 16, "plan_trims: too many allowed steps");
        for (double s : steps) require(s > 0.0, "plan_trims: steps must be > 0");
        if (!covers_all(steps, depths)) {
            throw SolverError("plan_trims: targets are not subset sums of the allowed steps");
        }
    } else {
        require(depths.size() <= 8, "plan_trims: too many distinct trim depths");
        // Candidate steps: the depths themselves and their pairwise gaps.
        std::vector<double> cand = depths;
        for (std::size_t i = 0; i < depths.size(); ++i) {
            for (std::size_t j = i + 1; j < depths.size(); ++j) cand.push_back(depths[j] - depths[i]);
        }
        std::sort(cand.begin(), cand.end());
        cand.erase(std::unique(cand.begin(), cand.end(), near), cand.end());

        std::optional<std::vector<double>> best;
        for (std::size_t k = 1; k <= depths.size() && !best; ++k) {
            std::vector<bool> pick(cand.size(), false);
            std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(k), true);
            do {
                std::vector<double> s;
                for (std::size_t i = 0; i < cand.size(); ++i)
                    if (pick[i]) s.push_back(cand[i]);
                if (!covers_all(s, depths)) continue;
                const double sum = std::accumulate(s.begin(), s.end(), 0.0);
                if (!best || sum < std::accumulate(best->begin(), best->end(), 0.0) - kDepthTol) {
                    best = s;
                }
            } while (std::prev_permutation(pick.begin(), pick.end()));
        }
        steps = best.value_or(std::vector<double>{});

        // Most widely shared step is milled first.
        std::vector<int> uses(steps.size(), 0);
        for (double d : depths) {
            const auto subset = subset_for(steps, d);
            for (std::size_t i : *subset) ++uses[i];
        }
        std::vector<std::size_t> order(steps.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
            return uses[x] != uses[y] ? uses[x] > uses[y] : steps[x] < steps[y];
        });
        std::vector<double> sorted;
        for (std::size_t i : order) sorted.push_back(steps[i]);
        steps = std::move(sorted);
    }

    TrimPlan plan{base_t_nm, steps, {}};
    for (double t : targets_nm) {
        const double d = std::max(0.0, base_t_nm - t);
        std::vector<double> seq;
        if (d > kDepthTol) {
            const auto subset = subset_for(steps, d);
            for (std::size_t i : *subset) seq.push_back(steps[i]);
        }
        plan.per_target.push_back(std::move(seq));
    }
    return plan;
}

void PhysicalRealization::validate() const {
    const double removed = std::accumulate(trims_nm.begin(), trims_nm.end(), 0.0);
    require(std::abs(base_t_nm - removed - t_nm) <= 1e-9 * base_t_nm,
            "realization '" + label + "': base thickness minus trims must equal t");
    require(ne * ng >= 2, "realization '" + label + "': needs at least two fingers");
    require(le_um > 0.0, "realization '" + label + "': finger length must be > 0");
}

// ---------------------------------------------------------------- defaults

std::vector<DispersionAnchor> default_dispersion_anchors() {
    return {{83.0, 21.0e9}, {92.0, 19.1e9}, {99.0, 17.9e9}};
}

std::vector<AnisotropyAnchor> default_anisotropy_anchors() {
    // theta = 0 coupling measured at 99 nm, taken as thickness independent.
    std::vector<AnisotropyAnchor> a = {
        {50.0, 83.0, 0.17}, {0.0, 99.0, 0.425}, {45.0, 92.0, 0.226},
        {50.0, 80.0, 0.165}, {50.0, 89.0, 0.175},
    };
    for (double t : {80.0, 83.0, 89.0, 92.0}) a.push_back({0.0, t, 0.425});
    return a;
}

std::vector<CapacitanceRow> default_capacitance_rows() {
    return {
        {48e-15, 83.0, 16, 2, 62.0},  {168e-15, 99.0, 16, 5, 68.0}, {169e-15, 92.0, 17, 6, 63.0},
        {77e-15, 80.0, 16, 3, 63.0},  {180e-15, 89.0, 16, 8, 61.0},
    };
}

MaterialSet default_material() {
    const auto disp = default_dispersion_anchors();
    const auto rows = default_capacitance_rows();
    return MaterialSet{fit_dispersion(disp), AnisotropyModel(default_anisotropy_anchors()),
                       fit_capacitance_density(rows), GeometryOptions{}};
}

}  // namespace xbarfilt
