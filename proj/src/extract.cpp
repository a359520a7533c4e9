#include "xbarfilt/extract.hpp"

#include <algorithm>
#include <cmath>

#include "xbarfilt/error.hpp"

namespace xbarfilt {
namespace {

// Vertex of the parabola through (i-1, i, i+1) of `v` over grid `f`.
double parabolic_vertex(const FrequencyGrid& f, const std::vector<double>& v, std::size_t i) {
    const double x0 = f[i - 1], x1 = f[i], x2 = f[i + 1];
    const double d1 = (v[i] - v[i - 1]) / (x1 - x0);
    const double curv = ((v[i + 1] - v[i]) / (x2 - x1) - d1) / (x2 - x0);
    if (curv == 0.0) return x1;
    const double xv = 0.5 * (x0 + x1) - d1 / (2.0 * curv);
    return std::clamp(xv, x0, x2);
}

}  // namespace

std::vector<complex> device_admittance(const FrequencyResponse& resp) {
    const YParameters yp = s_to_y(resp);
    std::vector<complex> y(resp.size());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = -yp.y[i](1, 0);
    return y;
}

ResonatorExtraction extract_resonator(const FrequencyResponse& resp, const ExtractOptions& opts) {
    return extract_from_admittance(resp.grid, device_admittance(resp), opts);
}

ResonatorExtraction extract_from_admittance(const FrequencyGrid& grid, const std::vector<complex>& y,
                                            const ExtractOptions& opts) {
    require(y.size() == grid.size(), "extract: admittance not aligned with grid");
    if (grid.size() < 5) throw SolverError("extract: need at least 5 samples to locate a resonance");
    const std::size_t n = y.size();
    std::vector<double> mag_db(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double a = std::abs(y[i]);
        mag_db[i] = std::isfinite(a) && a > 0.0 ? 20.0 * std::log10(a) : -INFINITY;
    }

    std::size_t ipk = 0;
    for (std::size_t i = 1; i < n; ++i)
        if (mag_db[i] > mag_db[ipk]) ipk = i;
    if (ipk == 0 || ipk + 1 >= n) {
        throw SolverError("extract: no identifiable resonance peak inside the band");
    }
    std::size_t imin = ipk + 1;
    for (std::size_t i = ipk + 1; i < n; ++i)
        if (mag_db[i] < mag_db[imin]) imin = i;
    if (imin + 1 >= n) {
        throw SolverError("extract: no anti-resonance above the resonance peak");
    }

    ResonatorExtraction ex;
    ex.fs = parabolic_vertex(grid, mag_db, ipk);
    ex.fp = parabolic_vertex(grid, mag_db, imin);
    if (ex.fp <= ex.fs) throw SolverError("extract: fp does not exceed fs");
    ex.k2 = k2_from(ex.fs, ex.fp);

    // Half-power points of the peak, taken on the conductance so the static
    // susceptance does not skew the width.
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) g[i] = y[i].real();
    std::size_t ig = 0;
    for (std::size_t i = 1; i < imin; ++i)
        if (g[i] > g[ig]) ig = i;
    const double level = 0.5 * g[ig];
    auto cross = [&](std::size_t a, std::size_t b) {
        const double t = (level - g[a]) / (g[b] - g[a]);
        return grid[a] + t * (grid[b] - grid[a]);
    };
    std::size_t hi = ig;
    while (hi + 1 < n && g[hi] > level) ++hi;
    std::size_t lo = ig;
    while (lo > 0 && g[lo] > level) --lo;
    const bool has_hi = g[hi] <= level;
    const bool has_lo = g[lo] <= level;
    if (!has_hi && !has_lo) throw SolverError("extract: resonance peak has no 3-dB edge");
    const double f_hi = has_hi ? cross(hi - 1, hi) : 0.0;
    const double f_lo = has_lo ? cross(lo + 1, lo) : 0.0;
    const double width = has_hi && has_lo ? f_hi - f_lo
                         : has_hi        ? 2.0 * (f_hi - grid[ig])
                                         : 2.0 * (grid[ig] - f_lo);
    ex.q3db = ex.fs / width;

    // Below fs the motional arm still adds Cm / (1 - (f/fs)^2) to the static
    // capacitance; divide that share out before averaging.
    const double cm_ratio = ex.k2 / kPiSqOver8;
    double sum = 0.0;
    int count = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double f = grid[i];
        if (f < opts.c0_window_lo * ex.fs || f > opts.c0_window_hi * ex.fs) continue;
        const double x = f / ex.fs;
        const double c_total = y[i].imag() / (kTwoPi * f);
        sum += c_total / (1.0 + cm_ratio / (1.0 - x * x));
        ++count;
    }
    if (count == 0) throw SolverError("extract: capacitance window contains no samples");
    ex.c0_est = sum / count;
    return ex;
}

}  // namespace xbarfilt
