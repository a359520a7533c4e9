#pragma once

#include <complex>
#include <numbers>
#include <span>
#include <vector>

namespace xbarfilt {

using complex = std::complex<double>;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
/// pi^2 / 8, the prefactor linking k2 to the motional/static capacitance ratio.
inline constexpr double kPiSqOver8 = std::numbers::pi * std::numbers::pi / 8.0;

/// Modified Butterworth-Van Dyke description of one acoustic resonator.
/// All quantities are SI: Hz, F, Ohm, H. `k2` is a fraction (0.17, not 17).
struct MbvdParams {
    double fs = 0.0;  ///< series resonance
    double k2 = 0.0;  ///< electromechanical coupling
    double q = 0.0;   ///< motional quality factor
    double c0 = 0.0;  ///< static capacitance
    double rs = 0.0;  ///< series parasitic resistance
    double ls = 0.0;  ///< series parasitic inductance

    /// Throws InvalidArgument when any field is outside its physical range.
    void validate() const;

    friend bool operator==(const MbvdParams&, const MbvdParams&) = default;
};

struct MotionalBranch {
    double cm = 0.0;
    double lm = 0.0;
    double rm = 0.0;
};

struct Immittance {
    double freq = 0.0;
    complex y;
    complex z;
};

/// Cm, Lm and Rm of the motional arm.
MotionalBranch derive_motional(const MbvdParams& p);

/// Parallel resonance implied by fs and k2.
double fp_from(double fs, double k2);

/// Coupling implied by a resonance pair; rejects fp < fs.
double k2_from(double fs, double fp);

/// Admittance of the full one-port: (rs + j w ls) feeding c0 || (rm, lm, cm).
complex admittance(const MbvdParams& p, double f);

/// Pointwise evaluation over a grid; element i equals admittance(p, freqs[i]).
std::vector<complex> admittance(const MbvdParams& p, std::span<const double> freqs);

Immittance immittance(const MbvdParams& p, double f);

/// Electrical equivalent of m identical resonators wired in parallel.
MbvdParams parallel_combine(const MbvdParams& p, int m);

}  // namespace xbarfilt
