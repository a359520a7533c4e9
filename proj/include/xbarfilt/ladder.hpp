#pragma once

#include <Eigen/Core>
#include <functional>
#include <string>
#include <vector>

#include "xbarfilt/mbvd.hpp"

namespace xbarfilt {

using Matrix2c = Eigen::Matrix2cd;

enum class Placement { Series, Shunt };

/// One ladder position: `multiplicity` identical resonators wired in parallel.
struct Stage {
    Placement placement = Placement::Series;
    MbvdParams resonator;
    int multiplicity = 1;
    std::string label;

    /// Resonator bank as a single equivalent one-port.
    MbvdParams combined() const { return parallel_combine(resonator, multiplicity); }
};

/// Stages ordered from port 1 to port 2.
struct LadderDesign {
    std::vector<Stage> stages;
    double z0 = 50.0;

    void validate() const;

    /// Same stages, port 2 first.
    LadderDesign reversed() const;
};

/// Strictly increasing list of frequencies (Hz).
class FrequencyGrid {
public:
    FrequencyGrid() = default;

    /// Points f_start, f_start + step, ... up to and including f_stop (within
    /// half a step). Points are computed as f_start + i*step to avoid drift.
    static FrequencyGrid uniform(double f_start, double f_stop, double step);
    static FrequencyGrid from_points(std::vector<double> points);

    const std::vector<double>& points() const { return points_; }
    std::size_t size() const { return points_.size(); }
    double operator[](std::size_t i) const { return points_[i]; }
    double front() const { return points_.front(); }
    double back() const { return points_.back(); }

private:
    explicit FrequencyGrid(std::vector<double> points) : points_(std::move(points)) {}
    std::vector<double> points_;
};

/// Two-port S-parameters sampled on a grid.
struct FrequencyResponse {
    FrequencyGrid grid;
    std::vector<complex> s11, s21, s12, s22;
    double z0 = 50.0;

    std::size_t size() const { return grid.size(); }
    Matrix2c s_matrix(std::size_t i) const;
    void validate() const;
};

/// ABCD of a series impedance between the ports.
Matrix2c series_abcd(complex z);
/// ABCD of a shunt admittance to ground.
Matrix2c shunt_abcd(complex y);

Matrix2c stage_abcd(const Stage& s, double f);

/// Product of all stage matrices, port-1 side first.
Matrix2c design_abcd(const LadderDesign& design, double f);

/// S-parameters of a two-port given by its ABCD matrix.
Matrix2c abcd_to_s(const Matrix2c& abcd, double z0);

FrequencyResponse cascade(const LadderDesign& design, const FrequencyGrid& grid);

/// S21 of `design` at an arbitrary frequency, for off-grid refinement.
std::function<complex(double)> s21_evaluator(const LadderDesign& design);

struct YParameters {
    std::vector<Matrix2c> y;
    /// true where det(I + S) vanished; the corresponding y entry is NaN.
    std::vector<bool> singular;
};

YParameters s_to_y(const FrequencyResponse& resp);

FrequencyResponse y_to_s(const std::vector<Matrix2c>& y, const FrequencyGrid& grid, double z0);

}  // namespace xbarfilt
