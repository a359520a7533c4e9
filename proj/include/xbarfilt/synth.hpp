#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "xbarfilt/ladder.hpp"
#include "xbarfilt/material.hpp"
#include "xbarfilt/metrics.hpp"

namespace xbarfilt {

enum class FilterOrder { ThreeElement, EightElement };

/// Where the extra transmission zero of a detuned shunt pair goes.
enum class OobBias { None, Selectivity, LowerRejection };

struct FilterTargets {
    double fc = 0.0;
    double fbw = 0.0;
    double z0 = 50.0;
    FilterOrder order = FilterOrder::ThreeElement;
    OobBias oob_bias = OobBias::None;

    void validate() const;
};

/// Loss and routing parasitics assumed per resonator role.
struct RoleParasitics {
    double q = 80.0;
    double rs = 0.0;
    double ls = 0.0;
};

struct SeedOptions {
    /// Series-to-shunt resonance spacing as a multiple of half the absolute
    /// bandwidth; unset picks 1.8 (three-element) or 2.3 (eight-element).
    std::optional<double> beta;
    /// Shunt-to-series impedance scaling of the initial capacitances.
    double impedance_ratio = 2.0;
    /// Highest coupling the material can deliver.
    double k2_max = 0.425;
    std::optional<RoleParasitics> series;
    std::optional<RoleParasitics> shunt;
};

/// Parasitics of the realized prototypes for each order.
RoleParasitics default_series_parasitics(FilterOrder order);
RoleParasitics default_shunt_parasitics(FilterOrder order);

LadderDesign seed_design(const FilterTargets& targets, const SeedOptions& opts = {});

/// Stage labels in first-appearance order; stages sharing a label are one
/// physical resonator design.
std::vector<std::string> distinct_labels(const LadderDesign& design);

struct RefineKnobs {
    /// Weights on |fbw3 - target| / target, in-band |S11| excess, min IL (dB).
    std::array<double, 3> weights{10.0, 5.0, 1.0};
    /// Weight on |fc - target| / target.
    double fc_weight = 10.0;
    double s11_limit = 0.33;
    int max_passes = 200;
    double min_improvement = 1e-4;
    int restarts = 1;
    /// Seeds at or below this objective are returned untouched.
    double target_objective = 0.0;
    /// Initial relative coordinate steps for fs, k2, c0.
    std::array<double, 3> steps{0.01, 0.05, 0.10};
    double min_step_scale = 1.0 / 64.0;
    double k2_max = 0.425;
    double tz_threshold_db = 20.0;
    /// When set, every accepted candidate must be physically realizable.
    std::optional<MaterialSet> material;
    double base_t_nm = 99.0;
};

struct TraceEntry {
    int pass = 0;
    std::vector<double> params;  ///< (fs, k2, c0) per distinct label
    double objective = 0.0;
};

struct SynthesisResult {
    LadderDesign design;
    std::vector<PhysicalRealization> realization;
    FilterMetrics achieved;
    std::vector<TraceEntry> trace;
    int passes = 0;
    bool converged = false;
};

/// Simulation grid used for synthesis objectives around `fc`.
FrequencyGrid synthesis_grid(double fc);

/// Objective of a candidate design; +inf when it cannot be measured.
double synthesis_objective(const LadderDesign& design, const FilterTargets& targets,
                           const RefineKnobs& knobs, FilterMetrics* metrics_out = nullptr);

/// Derivative-free coordinate descent over (fs, k2, c0) of each distinct
/// resonator. Non-convergence is reported in the result, not thrown.
SynthesisResult refine(const LadderDesign& seed, const FilterTargets& targets,
                       const RefineKnobs& knobs = {});

/// Physical parameters of each distinct resonator. When `allowed_steps` is
/// given, trim depths must be subset sums of those steps.
std::vector<PhysicalRealization> realize(const LadderDesign& design, const MaterialSet& material,
                                         double base_t_nm,
                                         std::optional<std::vector<double>> allowed_steps = {},
                                         double trim_resolution_nm = 1.0);

/// Electrical parameters implied by a realization through the forward models.
MbvdParams forward_model(const PhysicalRealization& r, const MaterialSet& material,
                         const MbvdParams& parasitics);

struct ScaledDesign {
    LadderDesign design;
    std::vector<PhysicalRealization> realization;
};

/// Move the whole filter by `factor` in frequency by thinning/thickening every
/// film region by 1/factor while keeping the layout.
ScaledDesign scale_design(const LadderDesign& design,
                          const std::vector<PhysicalRealization>& realization, double factor,
                          const DispersionModel& dispersion);

/// Ideal scaling without a physical description: fs * factor, c0 / factor.
LadderDesign scale_design(const LadderDesign& design, double factor);

}  // namespace xbarfilt
