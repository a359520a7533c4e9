#include "xbarfilt/ladder.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <limits>

#include "xbarfilt/error.hpp"

namespace xbarfilt {

void LadderDesign::validate() const {
    require(!stages.empty(), "ladder: design needs at least one stage");
    require(std::isfinite(z0) && z0 > 0.0, "ladder: z0 must be > 0");
    for (const Stage& s : stages) {
        require(s.multiplicity >= 1, "ladder: stage '" + s.label + "' multiplicity must be >= 1");
        s.resonator.validate();
    }
}

LadderDesign LadderDesign::reversed() const {
    LadderDesign out = *this;
    std::reverse(out.stages.begin(), out.stages.end());
    return out;
}

FrequencyGrid FrequencyGrid::uniform(double f_start, double f_stop, double step) {
    require(f_start > 0.0, "grid: f_start must be > 0");
    require(f_stop > f_start, "grid: f_stop must exceed f_start");
    require(step > 0.0, "grid: step must be > 0");
    const auto n = static_cast<std::size_t>(std::floor((f_stop - f_start) / step + 0.5)) + 1;
    std::vector<double> pts(n);
    for (std::size_t i = 0; i < n; ++i) {
        pts[i] = f_start + static_cast<double>(i) * step;
    }
    return FrequencyGrid(std::move(pts));
}

FrequencyGrid FrequencyGrid::from_points(std::vector<double> points) {
    require(!points.empty(), "grid: need at least one point");
    require(points.front() > 0.0, "grid: frequencies must be > 0");
    for (std::size_t i = 1; i < points.size(); ++i) {
        require(points[i] > points[i - 1], "grid: frequencies must be strictly increasing");
    }
    return FrequencyGrid(std::move(points));
}

Matrix2c FrequencyResponse::s_matrix(std::size_t i) const {
    Matrix2c s;
    s << s11[i], s12[i], s21[i], s22[i];
    return s;
}

void FrequencyResponse::validate() const {
    const std::size_t n = grid.size();
    require(n >= 1, "response: empty grid");
    require(s11.size() == n && s21.size() == n && s12.size() == n && s22.size() == n,
            "response: S arrays not aligned with the grid");
    require(z0 > 0.0, "response: z0 must be > 0");
}

Matrix2c series_abcd(complex z) {
    Matrix2c m;
    m << 1.0, z, 0.0, 1.0;
    return m;
}

Matrix2c shunt_abcd(complex y) {
    Matrix2c m;
    m << 1.0, 0.0, y, 1.0;
    return m;
}

Matrix2c stage_abcd(const Stage& s, double f) {
    const complex y = admittance(s.combined(), f);
    return s.placement == Placement::Series ? series_abcd(1.0 / y) : shunt_abcd(y);
}

Matrix2c design_abcd(const LadderDesign& design, double f) {
    Matrix2c total = Matrix2c::Identity();
    for (const Stage& s : design.stages) {
        total = total * stage_abcd(s, f);
    }
    return total;
}

Matrix2c abcd_to_s(const Matrix2c& m, double z0) {
    const complex a = m(0, 0), b = m(0, 1), c = m(1, 0), d = m(1, 1);
    const complex bz = b / z0, cz = c * z0;
    const complex den = a + bz + cz + d;
    Matrix2c s;
    s(0, 0) = (a + bz - cz - d) / den;
    s(0, 1) = 2.0 * (a * d - b * c) / den;
    s(1, 0) = 2.0 / den;
    s(1, 1) = (-a + bz - cz + d) / den;
    return s;
}

FrequencyResponse cascade(const LadderDesign& design, const FrequencyGrid& grid) {
    design.validate();
    const std::size_t n = grid.size();
    FrequencyResponse r{grid, std::vector<complex>(n), std::vector<complex>(n),
                        std::vector<complex>(n), std::vector<complex>(n), design.z0};
    for (std::size_t i = 0; i < n; ++i) {
        const Matrix2c s = abcd_to_s(design_abcd(design, grid[i]), design.z0);
        r.s11[i] = s(0, 0);
        r.s12[i] = s(0, 1);
        r.s21[i] = s(1, 0);
        r.s22[i] = s(1, 1);
    }
    return r;
}

std::function<complex(double)> s21_evaluator(const LadderDesign& design) {
    design.validate();
    return [design](double f) { return abcd_to_s(design_abcd(design, f), design.z0)(1, 0); };
}

YParameters s_to_y(const FrequencyResponse& resp) {
    resp.validate();
    const std::size_t n = resp.size();
    const Matrix2c id = Matrix2c::Identity();
    YParameters out{std::vector<Matrix2c>(n), std::vector<bool>(n, false)};
    for (std::size_t i = 0; i < n; ++i) {
        const Matrix2c s = resp.s_matrix(i);
        const Matrix2c sum = id + s;
        if (std::abs(sum.determinant()) < 1e-12) {
            out.singular[i] = true;
            out.y[i].setConstant(complex(std::numeric_limits<double>::quiet_NaN(), 0.0));
            continue;
        }
        out.y[i] = (id - s) * sum.inverse() / resp.z0;
    }
    return out;
}

FrequencyResponse y_to_s(const std::vector<Matrix2c>& y, const FrequencyGrid& grid, double z0) {
    require(y.size() == grid.size(), "y_to_s: Y list not aligned with grid");
    require(z0 > 0.0, "y_to_s: z0 must be > 0");
    const std::size_t n = grid.size();
    const Matrix2c id = Matrix2c::Identity();
    FrequencyResponse r{grid, std::vector<complex>(n), std::vector<complex>(n),
                        std::vector<complex>(n), std::vector<complex>(n), z0};
    for (std::size_t i = 0; i < n; ++i) {
        const Matrix2c zy = z0 * y[i];
        const Matrix2c s = (id - zy) * (id + zy).inverse();
        r.s11[i] = s(0, 0);
        r.s12[i] = s(0, 1);
        r.s21[i] = s(1, 0);
        r.s22[i] = s(1, 1);
    }
    return r;
}

}  // namespace xbarfilt
