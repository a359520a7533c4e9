#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace xbarfilt {

/// Fills `r` with the residual vector at `x`. The residual length must not
/// change between calls.
using ResidualFn = std::function<void(std::span<const double> x, std::vector<double>& r)>;

struct LmOptions {
    int max_iterations = 200;
    double initial_lambda = 1e-3;
    double max_lambda = 1e12;
    /// Stop when an accepted step reduces the cost by less than this fraction.
    double ftol = 1e-12;
    /// Stop when the accepted step is shorter than this (infinity norm).
    double xtol = 1e-12;
    double fd_step = 1e-7;
};

struct LmReport {
    std::vector<double> x;
    double initial_cost = 0.0;  ///< 0.5 * |r|^2
    double cost = 0.0;
    int iterations = 0;
    bool converged = false;
    std::string status;
    /// Cost after every accepted step, starting with the initial cost.
    std::vector<double> cost_history;
};

/// Damped Gauss-Newton (Levenberg-Marquardt with Marquardt diagonal scaling)
/// on a box [lo, hi]; steps are projected back into the box. Jacobians are
/// forward differences. A singular normal matrix only raises the damping.
LmReport minimize_box(const ResidualFn& residual, std::vector<double> x0,
                      std::span<const double> lo, std::span<const double> hi,
                      const LmOptions& opts = {});

}  // namespace xbarfilt
