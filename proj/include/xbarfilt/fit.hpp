#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "xbarfilt/ladder.hpp"
#include "xbarfilt/lm.hpp"
#include "xbarfilt/metrics.hpp"

namespace xbarfilt {

/// Order of the six fit coordinates of one resonator.
enum class FitParam { Fs = 0, K2, Q, C0, Rs, Ls };
inline constexpr std::size_t kFitParamCount = 6;

const char* fit_param_name(FitParam p);
std::array<double, kFitParamCount> to_array(const MbvdParams& p);
MbvdParams from_array(const std::array<double, kFitParamCount>& a);

struct ParamBounds {
    double lo = 0.0;
    double hi = 0.0;
};

/// Stages carrying `label` share one parameter set for the whole fit.
struct ShareGroup {
    std::string label;
    MbvdParams init;
    std::array<ParamBounds, kFitParamCount> bounds{};
    std::array<bool, kFitParamCount> free{true, true, true, true, true, true};
};

struct FitProblem {
    FrequencyResponse data;
    LadderDesign model;  ///< topology template; resonators come from `groups`
    std::vector<ShareGroup> groups;
    std::vector<double> weights;  ///< per frequency; empty means 1
    std::optional<Band> fit_band;

    void validate() const;
};

/// One share group per distinct stage label, initialized from `init` with
/// default bounds around each value.
FitProblem make_fit_problem(FrequencyResponse data, const LadderDesign& init);

/// Default search box around one resonator.
std::array<ParamBounds, kFitParamCount> default_bounds(const MbvdParams& p);

struct FitOptions {
    /// Coarse per-coordinate scans over (fs, k2, c0) before the local solve.
    int scan_rounds = 2;
    int scan_points_fs = 61;
    int scan_points_other = 31;
    LmOptions lm;
};

struct FittedGroup {
    std::string label;
    MbvdParams params;
    std::array<bool, kFitParamCount> at_bound{};
};

struct FitResult {
    std::vector<FittedGroup> groups;
    LadderDesign design;
    double initial_residual_norm = 0.0;
    double residual_norm = 0.0;
    int iterations = 0;
    bool converged = false;
    std::string status;
    /// Residual norm after every accepted local step.
    std::vector<double> residual_history;
};

/// Weighted stacked residual (Re/Im of S11, S21, S22) of `design` against the
/// problem data inside the fit band.
std::vector<double> fit_residual(const FitProblem& problem, const LadderDesign& design);

FitResult fit_mbvd(const FitProblem& problem, const FitOptions& opts = {});

struct ComparisonRow {
    std::string resonator;
    std::string source;  ///< "Design", "Filter fitting", "Res. fitting"
    MbvdParams params;
};

struct ComparisonTable {
    std::vector<ComparisonRow> rows;

    /// Relative change of `source` against the design row of the same resonator.
    std::array<double, kFitParamCount> relative_delta(const std::string& resonator,
                                                      const std::string& source) const;
    std::string to_csv() const;
    std::string to_text() const;
};

using LabeledParams = std::vector<std::pair<std::string, MbvdParams>>;

/// Design vs. fitted rows per resonator; resonator-fit rows are optional.
/// Throws InvalidArgument when the label sets differ.
ComparisonTable compare_table(const LabeledParams& design, const LabeledParams& filter_fit,
                              const LabeledParams& resonator_fit = {});

LabeledParams labeled_params(const LadderDesign& design);
LabeledParams labeled_params(const FitResult& fit);

}  // namespace xbarfilt
