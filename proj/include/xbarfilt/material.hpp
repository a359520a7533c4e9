#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace xbarfilt {

// Thicknesses are in nm, angles in degrees, finger lengths in um. Frequencies
// stay in Hz.

struct DispersionAnchor {
    double t_nm = 0.0;
    double fs_hz = 0.0;
};

/// fs(t) = a / (t + offset) + b over a thickness validity range.
struct DispersionModel {
    double a = 0.0;  ///< Hz*nm
    double b = 0.0;  ///< Hz
    double offset_nm = 0.0;
    double t_min = 0.0;
    double t_max = 0.0;
    std::vector<DispersionAnchor> anchors;

    double fs_at(double t_nm) const;
    bool in_range(double t_nm) const { return t_nm >= t_min && t_nm <= t_max; }
    /// Relative residual (model - anchor) / anchor per anchor.
    std::vector<double> residuals() const;
};

/// Least-squares fit of a/t + b. The validity range defaults to the anchor
/// span widened by 30% on each side.
DispersionModel fit_dispersion(std::span<const DispersionAnchor> anchors,
                               std::optional<std::pair<double, double>> validity = std::nullopt);

/// Shift the model's thickness offset so that it reproduces one measured
/// resonator (local wafer-thickness variation).
DispersionModel calibrate_offset(const DispersionModel& model, double t_nm, double measured_fs_hz);

double thickness_for_fs(const DispersionModel& model, double fs_hz);

struct AnisotropyAnchor {
    double theta_deg = 0.0;
    double t_nm = 0.0;
    double k2 = 0.0;
};

/// k2 over (theta, t) from an anchor table: monotone cubic in theta along each
/// anchored thickness, linear blend between the two nearest thicknesses whose
/// curves cover the requested angle.
class AnisotropyModel {
public:
    AnisotropyModel() = default;
    explicit AnisotropyModel(std::vector<AnisotropyAnchor> anchors);

    double k2_at(double theta_deg, double t_nm) const;
    /// Angles at which k2_at(., t) is defined.
    std::pair<double, double> theta_span(double t_nm) const;
    std::pair<double, double> t_hull() const;
    const std::vector<AnisotropyAnchor>& anchors() const { return anchors_; }

private:
    struct Curve {
        double t = 0.0;
        std::vector<double> theta;
        std::vector<double> k2;
        std::vector<double> slope;
        bool covers(double th) const { return th >= theta.front() && th <= theta.back(); }
        double eval(double th) const;
    };
    std::vector<const Curve*> bracket(double theta_deg, double t_nm) const;

    std::vector<AnisotropyAnchor> anchors_;
    std::vector<Curve> curves_;
};

double theta_for_k2(const AnisotropyModel& model, double k2, double t_nm);

struct CapacitanceRow {
    double c0_f = 0.0;
    double t_nm = 0.0;
    int ne = 0;
    int ng = 0;
    double le_um = 0.0;
};

/// Static capacitance per active IDE pair, per um of finger length, per nm of
/// film thickness (F / (pair*um*nm)).
struct CapacitanceDensity {
    double rho = 0.0;
};

/// Adjacent-finger gaps across all groups.
inline int active_pairs(int ne, int ng) { return ne * ng - 1; }

double c0_of(const CapacitanceDensity& d, double t_nm, int ne, int ng, double le_um);

/// Least squares on relative residuals over the given realized rows.
CapacitanceDensity fit_capacitance_density(std::span<const CapacitanceRow> rows);

struct Geometry {
    int ne = 0;
    int ng = 0;
    double le_um = 0.0;
};

struct GeometryOptions {
    double le_min_um = 20.0;
    double le_max_um = 80.0;
    std::vector<int> ne_options{16, 17};
    int max_groups = 64;
    double le_resolution_um = 0.1;
};

/// Fewest total fingers whose finger length lands inside the bounds.
Geometry geometry_for_c0(const CapacitanceDensity& d, double c0_target_f, double t_nm,
                         const GeometryOptions& opts = {});

struct TrimPlan {
    double base_t_nm = 0.0;
    /// Shared milling depths, in application order.
    std::vector<double> steps;
    /// Per target: the steps (subset of `steps`, in order) applied to reach it.
    std::vector<std::vector<double>> per_target;
};

/// Express every target thickness as base minus a subset-sum of one shared
/// step set. With `allowed_steps` the steps are fixed and must match exactly;
/// otherwise the smallest step set is solved for.
TrimPlan plan_trims(double base_t_nm, std::span<const double> targets_nm,
                    std::optional<std::vector<double>> allowed_steps = std::nullopt);

struct PhysicalRealization {
    std::string label;
    double base_t_nm = 0.0;
    std::vector<double> trims_nm;
    double t_nm = 0.0;
    double theta_deg = 0.0;
    int ne = 0;
    int ng = 0;
    double le_um = 0.0;

    void validate() const;
};

/// Everything needed to map between physical and electrical parameters.
struct MaterialSet {
    DispersionModel dispersion;
    AnisotropyModel anisotropy;
    CapacitanceDensity density;
    GeometryOptions geometry;
};

/// Built-in anchors from the realized three-element prototype.
std::vector<DispersionAnchor> default_dispersion_anchors();
/// Realized (theta, t, k2) rows plus a theta = 0 anchor at every thickness.
std::vector<AnisotropyAnchor> default_anisotropy_anchors();
std::vector<CapacitanceRow> default_capacitance_rows();
MaterialSet default_material();

}  // namespace xbarfilt
