#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "xbarfilt/ladder.hpp"

namespace xbarfilt {

/// Optional exact S21(f); when absent, refinement interpolates the samples.
using S21Evaluator = std::function<complex(double)>;

/// Level convention for a band edge: relative to the in-band peak, or an
/// absolute insertion-loss level.
enum class FbwReference { Peak, Absolute };

struct Band {
    double lo = 0.0;
    double hi = 0.0;
    double width() const { return hi - lo; }
};

struct Passband {
    double f_lo = 0.0;
    double f_hi = 0.0;
    double fc = 0.0;
    double fbw = 0.0;
    double peak_freq = 0.0;
    double peak_il_db = 0.0;
};

struct Rejection {
    double db = 0.0;
    double freq = 0.0;
};

struct FilterMetrics {
    double fc = 0.0;
    double min_il = 0.0;  ///< dB
    double fbw3 = 0.0;
    double fbw20 = 0.0;
    Band band3;
    Band band20;
    Rejection oob_lower;
    Rejection oob_upper;
    std::vector<double> tz_list;
};

struct MetricOptions {
    FbwReference fbw20_reference = FbwReference::Peak;
    double tz_threshold_db = 30.0;
    /// Stopband half-width around fc, in multiples of the 3-dB bandwidth.
    double oob_span_bw = 10.0;
    double refine_tol_hz = 1e5;
};

double insertion_loss_db(complex s21);

/// IL at a grid frequency; throws InvalidArgument when `f` is not a grid point.
double insertion_loss(const FrequencyResponse& resp, double f);

/// Edge walk from the global |S21| maximum to the first `drop_db` crossings.
/// Throws UnboundedBandError when an edge is not found inside the grid.
Passband passband(const FrequencyResponse& resp, double drop_db, const S21Evaluator& eval = {},
                  FbwReference reference = FbwReference::Peak, double tol_hz = 1e5);

/// Worst-case stopband IL on each side of the passband within
/// fc +/- span*BW3. Requires `so_far` to carry fc, band3 and band20.
std::pair<Rejection, Rejection> oob_rejection(const FrequencyResponse& resp,
                                              const FilterMetrics& so_far,
                                              const S21Evaluator& eval = {},
                                              double span_bw = 10.0, double tol_hz = 1e5);

/// Local |S21| minima with IL above `threshold_db`.
std::vector<double> find_tzs(const FrequencyResponse& resp, double threshold_db = 30.0,
                             const S21Evaluator& eval = {}, double tol_hz = 1e5);

FilterMetrics compute_metrics(const FrequencyResponse& resp, const MetricOptions& opts = {},
                              const S21Evaluator& eval = {});

}  // namespace xbarfilt
