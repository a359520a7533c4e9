#include <doctest.h>

#include <vector>

#include "support.hpp"
#include "xbarfilt/error.hpp"
#include "xbarfilt/material.hpp"

using namespace xbarfilt;

namespace {

// Ordinary least squares of fs = a*x + b with x = 1/t, via the normal equations.
std::pair<double, double> affine_fit(const std::vector<DispersionAnchor>& anchors) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(anchors.size());
    for (const auto& p : anchors) {
        const double x = 1.0 / p.t_nm;
        sx += x;
        sy += p.fs_hz;
        sxx += x * x;
        sxy += x * p.fs_hz;
    }
    const double a = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return {a, (sy - a * sx) / n};
}

const DispersionModel& default_dispersion() {
    static const DispersionModel m = fit_dispersion(default_dispersion_anchors());
    return m;
}

}  // namespace

TEST_CASE("dispersion fit over the three-element anchors") {
    const DispersionModel& m = default_dispersion();
    const auto [a, b] = affine_fit(default_dispersion_anchors());
    CHECK(m.a == doctest::Approx(a).epsilon(1e-9));
    CHECK(m.b == doctest::Approx(b).epsilon(1e-6));
    CHECK(m.a / 1e9 >= 1500.0);
    CHECK(m.a / 1e9 <= 1800.0);
    for (double r : m.residuals()) CHECK(std::abs(r) < 0.03);
    for (double t = m.t_min; t < m.t_max; t += 1.0) CHECK(m.fs_at(t + 1.0) < m.fs_at(t));
}

TEST_CASE("two anchors fit exactly") {
    const std::vector<DispersionAnchor> anchors{{80.0, 22.13e9}, {89.0, 20.5e9}};
    const DispersionModel m = fit_dispersion(anchors);
    CHECK(m.fs_at(80.0) == doctest::Approx(22.13e9).epsilon(1e-12));
    CHECK(m.fs_at(89.0) == doctest::Approx(20.5e9).epsilon(1e-12));
}

TEST_CASE("dispersion fit needs two distinct thicknesses") {
    const std::vector<DispersionAnchor> one{{83.0, 21e9}};
    CHECK_THROWS_AS(fit_dispersion(one), InvalidArgument);
    const std::vector<DispersionAnchor> same{{83.0, 21e9}, {83.0, 21.1e9}};
    CHECK_THROWS_AS(fit_dispersion(same), InvalidArgument);
}

TEST_CASE("thickness inversion") {
    const DispersionModel& m = default_dispersion();
    CHECK(std::abs(thickness_for_fs(m, 21e9) - 83.0) <= 2.0);
    CHECK(std::abs(thickness_for_fs(m, 17.9e9) - 99.0) <= 2.0);
    CHECK(std::abs(thickness_for_fs(m, m.fs_at(90.0)) - 90.0) <= 0.01);
    CHECK_THROWS_AS(thickness_for_fs(m, 60e9), SolverError);
    CHECK_THROWS_AS(thickness_for_fs(m, 5e9), SolverError);
}

TEST_CASE("offset calibration reproduces one measured resonator") {
    const DispersionModel& m = default_dispersion();
    const DispersionModel c = calibrate_offset(m, 83.0, 21.4e9);
    CHECK(c.fs_at(83.0) == doctest::Approx(21.4e9).epsilon(1e-12));
    CHECK(c.a == m.a);
    CHECK(c.b == m.b);
}

TEST_CASE("anisotropy model reproduces its anchors") {
    const AnisotropyModel m(default_anisotropy_anchors());
    CHECK(m.k2_at(0.0, 99.0) == doctest::Approx(0.425).epsilon(1e-12));
    CHECK(m.k2_at(50.0, 83.0) == doctest::Approx(0.17).epsilon(1e-12));
    CHECK(m.k2_at(45.0, 92.0) == doctest::Approx(0.226).epsilon(1e-12));
    CHECK_THROWS_AS(m.k2_at(10.0, 120.0), SolverError);
    CHECK_THROWS_AS(m.k2_at(10.0, 60.0), SolverError);
}

TEST_CASE("anisotropy is monotone, bounded by the theta = 0 value, and positive") {
    const AnisotropyModel m(default_anisotropy_anchors());
    for (double t = 80.0; t <= 92.0; t += 0.5) {
        const auto [lo, hi] = m.theta_span(t);
        const double top = m.k2_at(lo, t);
        double prev = top;
        for (double th = lo; th <= hi; th += 0.25) {
            const double k = m.k2_at(th, t);
            CHECK(k <= prev + 1e-15);
            CHECK(k <= top + 1e-15);
            CHECK(k > 0.0);
            prev = k;
        }
    }
}

TEST_CASE("anisotropy anchors must be non-increasing in theta") {
    const std::vector<AnisotropyAnchor> bad{{0.0, 90.0, 0.2}, {30.0, 90.0, 0.3}};
    CHECK_THROWS_AS(AnisotropyModel{bad}, InvalidArgument);
}

TEST_CASE("angle inversion") {
    const AnisotropyModel m(default_anisotropy_anchors());
    CHECK(std::abs(theta_for_k2(m, 0.17, 83.0) - 50.0) <= 2.0);
    for (double th : {5.0, 17.0, 33.0, 44.0}) {
        const double k = m.k2_at(th, 86.0);
        CHECK(std::abs(theta_for_k2(m, k, 86.0) - th) <= 0.01);
    }
    CHECK_THROWS_AS(theta_for_k2(m, 0.60, 90.0), SolverError);
    CHECK_THROWS_AS(theta_for_k2(m, 0.05, 90.0), SolverError);
}

TEST_CASE("capacitance density fit and geometry") {
    const auto rows = default_capacitance_rows();
    const CapacitanceDensity d = fit_capacitance_density(rows);
    // Oracle: relative least squares in closed form.
    double num = 0.0, den = 0.0;
    for (const auto& r : rows) {
        const double x = r.t_nm * (r.ne * r.ng - 1) * r.le_um / r.c0_f;
        num += x;
        den += x * x;
    }
    CHECK(d.rho == doctest::Approx(num / den).epsilon(1e-12));
    // The three-element rows share one density closely; the eight-element
    // Shunt 1 row sits 13% away from any common value.
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        const double err = std::abs(c0_of(d, r.t_nm, r.ne, r.ng, r.le_um) / r.c0_f - 1.0);
        CHECK(err < (r.t_nm == 80.0 || r.t_nm == 89.0 ? 0.15 : 0.10));
    }

    const Geometry g = geometry_for_c0(d, 48e-15, 83.0);
    CHECK(g.ne == 16);
    CHECK(g.ng == 2);
    CHECK(std::abs(g.le_um / 62.0 - 1.0) <= 0.10);
    CHECK(std::abs(c0_of(d, 83.0, g.ne, g.ng, g.le_um) / 48e-15 - 1.0) <= 0.02);

    const Geometry g2 = geometry_for_c0(d, 168e-15, 99.0);
    CHECK(g2.ne * g2.ng == 80);
    CHECK(std::abs(g2.le_um / 68.0 - 1.0) <= 0.10);
    CHECK(std::abs(c0_of(d, 99.0, g2.ne, g2.ng, g2.le_um) / 168e-15 - 1.0) <= 0.02);

    CHECK_THROWS_AS(geometry_for_c0(d, 0.0, 83.0), InvalidArgument);
    GeometryOptions tight;
    tight.max_groups = 1;
    CHECK_THROWS_AS(geometry_for_c0(d, 500e-15, 83.0, tight), SolverError);
}

TEST_CASE("fs times c0 is thickness independent without an offset term") {
    std::vector<DispersionAnchor> anchors;
    for (double t : {80.0, 90.0, 100.0}) anchors.push_back({t, 1750e9 / t});
    const DispersionModel m = fit_dispersion(anchors);
    const CapacitanceDensity d = fit_capacitance_density(default_capacitance_rows());
    const double t_mid = 0.5 * (m.t_min + m.t_max);
    REQUIRE(std::abs(m.b) < 0.05 * m.a / t_mid);
    const double ref = m.fs_at(t_mid) * c0_of(d, t_mid, 16, 3, 60.0);
    for (double t = m.t_min; t <= m.t_max; t += 2.0) {
        CHECK(std::abs(m.fs_at(t) * c0_of(d, t, 16, 3, 60.0) / ref - 1.0) < 0.05);
    }
}

TEST_CASE("trim plans") {
    const std::vector<double> three{99.0, 92.0, 83.0};
    const TrimPlan p = plan_trims(99.0, three);
    CHECK(p.steps == std::vector<double>{7.0, 9.0});
    CHECK(p.per_target[0].empty());
    CHECK(p.per_target[1] == std::vector<double>{7.0});
    CHECK(p.per_target[2] == std::vector<double>{7.0, 9.0});

    const std::vector<double> eight{89.0, 80.0};
    const TrimPlan q = plan_trims(96.0, eight, std::vector<double>{7.0, 9.0});
    CHECK(q.per_target[0] == std::vector<double>{7.0});
    CHECK(q.per_target[1] == std::vector<double>{7.0, 9.0});

    const std::vector<double> too_thick{100.0};
    CHECK_THROWS_AS(plan_trims(99.0, too_thick), SolverError);
    const std::vector<double> off_steps{91.0};
    CHECK_THROWS_AS(plan_trims(96.0, off_steps, std::vector<double>{7.0, 9.0}), SolverError);
}

TEST_CASE("realization bookkeeping") {
    PhysicalRealization r{"Series", 99.0, {7.0, 9.0}, 83.0, 50.0, 16, 2, 62.0};
    CHECK_NOTHROW(r.validate());
    r.t_nm = 84.0;
    CHECK_THROWS_AS(r.validate(), InvalidArgument);
    r.t_nm = 83.0;
    r.ne = 1;
    r.ng = 1;
    CHECK_THROWS_AS(r.validate(), InvalidArgument);
}
