#include "xbarfilt/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "xbarfilt/error.hpp"

namespace xbarfilt {
namespace {

// Insertion loss samples plus a continuous view used for refinement.
class IlProfile {
public:
    IlProfile(const FrequencyResponse& resp, const S21Evaluator& eval)
        : f_(resp.grid.points()), eval_(eval) {
        resp.validate();
        il_.reserve(resp.size());
        for (const complex& s : resp.s21) {
            il_.push_back(insertion_loss_db(s));
        }
    }

    std::size_t size() const { return il_.size(); }
    double f(std::size_t i) const { return f_[i]; }
    double il(std::size_t i) const { return il_[i]; }
    bool exact() const { return static_cast<bool>(eval_); }

    double at(double freq) const {
        if (eval_) {
            return insertion_loss_db(eval_(freq));
        }
        const auto it = std::upper_bound(f_.begin(), f_.end(), freq);
        if (it == f_.begin()) return il_.front();
        if (it == f_.end()) return il_.back();
        const auto k = static_cast<std::size_t>(it - f_.begin());
        const double t = (freq - f_[k - 1]) / (f_[k] - f_[k - 1]);
        return il_[k - 1] + t * (il_[k] - il_[k - 1]);
    }

    // Crossing of `level` between f(a) and f(b), where exactly one side is at or
    // above the level.
    double crossing(std::size_t a, std::size_t b, double level, double tol) const {
        double lo = f(a), hi = f(b);
        const bool lo_above = il(a) >= level;
        if (!exact()) {
            const double t = (level - il(a)) / (il(b) - il(a));
            return lo + t * (hi - lo);
        }
        while (std::abs(hi - lo) > tol) {
            const double mid = 0.5 * (lo + hi);
            if ((at(mid) >= level) == lo_above) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        return 0.5 * (lo + hi);
    }

    // Extremum of IL near sample i (interior). `maximum` selects IL maxima
    // (transmission notches) versus IL minima (transmission peaks).
    std::pair<double, double> extremum(std::size_t i, bool maximum, double tol) const {
        if (i == 0 || i + 1 >= size()) {
            return {f(i), il(i)};
        }
        const double sign = maximum ? 1.0 : -1.0;
        if (!exact()) {
            // Vertex of the parabola through three (possibly uneven) samples.
            const double x0 = f(i - 1), x1 = f(i), x2 = f(i + 1);
            const double y0 = il(i - 1), y1 = il(i), y2 = il(i + 1);
            const double d1 = (y1 - y0) / (x1 - x0);
            const double curv = ((y2 - y1) / (x2 - x1) - d1) / (x2 - x0);
            if (sign * curv >= 0.0) return {x1, y1};
            const double xv = std::clamp(0.5 * (x0 + x1) - d1 / (2.0 * curv), x0, x2);
            const double yv = y0 + d1 * (xv - x0) + curv * (xv - x0) * (xv - x1);
            return {xv, yv};
        }
        const double h = tol / 10.0;
        auto slope = [&](double x) { return sign * (at(x + h) - at(x - h)); };
        double lo = f(i - 1), hi = f(i + 1);
        if (slope(lo) <= 0.0 || slope(hi) >= 0.0) {
            return {f(i), il(i)};
        }
        while (hi - lo > tol) {
            const double mid = 0.5 * (lo + hi);
            if (slope(mid) > 0.0) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        const double x = 0.5 * (lo + hi);
        const double y = at(x);
        return sign * y >= sign * il(i) ? std::pair{x, y} : std::pair{f(i), il(i)};
    }

private:
    const std::vector<double>& f_;
    std::vector<double> il_;
    const S21Evaluator& eval_;
};

std::size_t lower_index(const IlProfile& p, double freq) {
    std::size_t k = 0;
    while (k + 1 < p.size() && p.f(k + 1) <= freq) ++k;
    return k;
}

}  // namespace

double insertion_loss_db(complex s21) { return -20.0 * std::log10(std::abs(s21)); }

double insertion_loss(const FrequencyResponse& resp, double f) {
    const auto& pts = resp.grid.points();
    const auto it = std::lower_bound(pts.begin(), pts.end(), f * (1.0 - 1e-12));
    if (it == pts.end() || std::abs(*it - f) > 1e-9 * f) {
        throw InvalidArgument("insertion_loss: frequency " + std::to_string(f) +
                              " Hz is not a grid point");
    }
    return insertion_loss_db(resp.s21[static_cast<std::size_t>(it - pts.begin())]);
}

Passband passband(const FrequencyResponse& resp, double drop_db, const S21Evaluator& eval,
                  FbwReference reference, double tol_hz) {
    require(drop_db > 0.0, "passband: drop_db must be > 0");
    const IlProfile p(resp, eval);
    const std::size_t n = p.size();
    std::size_t ipk = 0;
    for (std::size_t i = 1; i < n; ++i) {
        if (p.il(i) < p.il(ipk)) ipk = i;
    }
    if (ipk == 0 || ipk + 1 == n) {
        throw UnboundedBandError("passband: |S21| maximum lies on the grid boundary");
    }
    const auto [f_pk, il_pk] = p.extremum(ipk, false, tol_hz);
    const double level = reference == FbwReference::Peak ? il_pk + drop_db : drop_db;
    if (level <= il_pk) {
        throw UnboundedBandError("passband: peak IL already exceeds the absolute level");
    }

    std::size_t lo = ipk;
    while (lo > 0 && p.il(lo) < level) --lo;
    std::size_t hi = ipk;
    while (hi + 1 < n && p.il(hi) < level) ++hi;
    if (p.il(lo) < level || p.il(hi) < level) {
        throw UnboundedBandError("passband: no " + std::to_string(drop_db) +
                                 " dB crossing inside the grid (unbounded band)");
    }
    Passband pb;
    pb.f_lo = p.crossing(lo, lo + 1, level, tol_hz);
    pb.f_hi = p.crossing(hi - 1, hi, level, tol_hz);
    pb.fc = 0.5 * (pb.f_lo + pb.f_hi);
    pb.fbw = (pb.f_hi - pb.f_lo) / pb.fc;
    pb.peak_freq = f_pk;
    pb.peak_il_db = il_pk;
    return pb;
}

std::pair<Rejection, Rejection> oob_rejection(const FrequencyResponse& resp,
                                              const FilterMetrics& so_far,
                                              const S21Evaluator& eval, double span_bw,
                                              double tol_hz) {
    const IlProfile p(resp, eval);
    const double bw = so_far.band3.width();
    require(bw > 0.0 && so_far.band20.width() > 0.0, "oob_rejection: passband metrics missing");
    const double start = std::max(p.f(0), so_far.fc - span_bw * bw);
    const double stop = std::min(p.f(p.size() - 1), so_far.fc + span_bw * bw);

    // The stopband starts at the first transmission notch beyond each 20-dB edge;
    // between the edge and that notch the response is still the passband skirt.
    std::size_t inner_lo = lower_index(p, so_far.band20.lo);
    for (std::size_t j = inner_lo; j > 0 && p.f(j - 1) >= start; --j) {
        if (p.il(j - 1) <= p.il(j)) {
            inner_lo = j;
            break;
        }
    }
    std::size_t inner_hi = lower_index(p, so_far.band20.hi) + 1;
    inner_hi = std::min(inner_hi, p.size() - 1);
    for (std::size_t j = inner_hi; j + 1 < p.size() && p.f(j + 1) <= stop; ++j) {
        if (p.il(j + 1) <= p.il(j)) {
            inner_hi = j;
            break;
        }
    }

    auto search = [&](double f_from, double f_to, const char* side) {
        std::size_t best = p.size();
        for (std::size_t i = 0; i < p.size(); ++i) {
            if (p.f(i) < f_from || p.f(i) > f_to) continue;
            if (best == p.size() || p.il(i) < p.il(best)) best = i;
        }
        if (best == p.size()) {
            throw SolverError(std::string("oob_rejection: empty ") + side + " search interval");
        }
        // Refine only interior minima; a window-boundary minimum stays put.
        const bool interior = best > 0 && best + 1 < p.size() && p.f(best - 1) >= f_from &&
                              p.f(best + 1) <= f_to;
        if (!interior) return Rejection{p.il(best), p.f(best)};
        const auto [f, il] = p.extremum(best, false, tol_hz);
        return Rejection{il, f};
    };
    return {search(start, p.f(inner_lo), "lower"), search(p.f(inner_hi), stop, "upper")};
}

std::vector<double> find_tzs(const FrequencyResponse& resp, double threshold_db,
                             const S21Evaluator& eval, double tol_hz) {
    require(threshold_db > 0.0, "find_tzs: threshold must be > 0 dB");
    const IlProfile p(resp, eval);
    std::vector<double> out;
    for (std::size_t i = 1; i + 1 < p.size(); ++i) {
        if (!(p.il(i) >= p.il(i - 1) && p.il(i) > p.il(i + 1) && p.il(i) > threshold_db)) continue;
        const double f = p.extremum(i, true, tol_hz).first;
        const double merge = 2.0 * (p.f(i + 1) - p.f(i - 1));
        if (!out.empty() && f - out.back() < merge) continue;
        out.push_back(f);
    }
    return out;
}

FilterMetrics compute_metrics(const FrequencyResponse& resp, const MetricOptions& opts,
                              const S21Evaluator& eval) {
    const Passband pb3 = passband(resp, 3.0, eval, FbwReference::Peak, opts.refine_tol_hz);
    const Passband pb20 = passband(resp, 20.0, eval, opts.fbw20_reference, opts.refine_tol_hz);
    FilterMetrics m;
    m.fc = pb3.fc;
    m.min_il = pb3.peak_il_db;
    m.band3 = {pb3.f_lo, pb3.f_hi};
    m.band20 = {pb20.f_lo, pb20.f_hi};
    m.fbw3 = pb3.fbw;
    m.fbw20 = m.band20.width() / m.fc;
    const auto [lower, upper] = oob_rejection(resp, m, eval, opts.oob_span_bw, opts.refine_tol_hz);
    m.oob_lower = lower;
    m.oob_upper = upper;
    m.tz_list = find_tzs(resp, opts.tz_threshold_db, eval, opts.refine_tol_hz);
    return m;
}

}  // namespace xbarfilt
