#pragma once

#include <vector>

#include "xbarfilt/ladder.hpp"

namespace xbarfilt {

struct ResonatorExtraction {
    double fs = 0.0;      ///< |Y| maximum
    double fp = 0.0;      ///< |Y| minimum above fs
    double k2 = 0.0;      ///< from the fs/fp pair
    double q3db = 0.0;    ///< fs over the half-power width of the |Y| peak
    double c0_est = 0.0;  ///< static capacitance from sub-resonance susceptance
};

struct ExtractOptions {
    /// Window for the static-capacitance estimate, as fractions of fs.
    double c0_window_lo = 0.5;
    double c0_window_hi = 0.8;
};

/// Device admittance of a resonator measured as the series element between
/// two ports: Y = -y21.
std::vector<complex> device_admittance(const FrequencyResponse& resp);

ResonatorExtraction extract_resonator(const FrequencyResponse& resp, const ExtractOptions& opts = {});

/// Same analysis on a one-port admittance sampled on `grid`.
ResonatorExtraction extract_from_admittance(const FrequencyGrid& grid, const std::vector<complex>& y,
                                            const ExtractOptions& opts = {});

}  // namespace xbarfilt
