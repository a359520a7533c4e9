#include "xbarfilt/mbvd.hpp"

#include <cmath>
#include <string>

#include "xbarfilt/error.hpp"

namespace xbarfilt {

void MbvdParams::validate() const {
    require(std::isfinite(fs) && fs > 0.0, "mbvd: fs must be > 0");
    require(std::isfinite(k2) && k2 > 0.0 && k2 < 1.0, "mbvd: k2 must lie in (0, 1)");
    require(std::isfinite(q) && q > 0.0, "mbvd: q must be > 0");
    require(std::isfinite(c0) && c0 > 0.0, "mbvd: c0 must be > 0");
    require(std::isfinite(rs) && rs >= 0.0, "mbvd: rs must be >= 0");
    require(std::isfinite(ls) && ls >= 0.0, "mbvd: ls must be >= 0");
}

MotionalBranch derive_motional(const MbvdParams& p) {
    if (p.k2 == 0.0 || p.c0 == 0.0) {
        throw InvalidArgument("mbvd: motional branch undefined for k2 = 0 or c0 = 0");
    }
    require(p.fs > 0.0 && p.k2 > 0.0 && p.q > 0.0 && p.c0 > 0.0,
            "mbvd: fs, k2, q and c0 must be > 0");
    const double ws = kTwoPi * p.fs;
    const double c0k2 = p.c0 * p.k2;
    return MotionalBranch{
        .cm = c0k2 / kPiSqOver8,
        .lm = kPiSqOver8 / (ws * ws * c0k2),
        .rm = kPiSqOver8 / (ws * c0k2 * p.q),
    };
}

double fp_from(double fs, double k2) {
    require(fs > 0.0, "fp_from: fs must be > 0");
    require(k2 >= 0.0 && k2 < 1.0, "fp_from: k2 must lie in [0, 1)");
    return fs * std::sqrt(1.0 + k2 / kPiSqOver8);
}

double k2_from(double fs, double fp) {
    require(fs > 0.0, "k2_from: fs must be > 0");
    require(fp >= fs, "k2_from: fp < fs is not a physical resonance pair");
    const double ratio = fp / fs;
    return kPiSqOver8 * (ratio * ratio - 1.0);
}

complex admittance(const MbvdParams& p, double f) {
    const MotionalBranch m = derive_motional(p);
    const double w = kTwoPi * f;
    const complex z_motional(m.rm, w * m.lm - 1.0 / (w * m.cm));
    const complex y_core = complex(0.0, w * p.c0) + 1.0 / z_motional;
    const complex z_total = complex(p.rs, w * p.ls) + 1.0 / y_core;
    return 1.0 / z_total;
}

std::vector<complex> admittance(const MbvdParams& p, std::span<const double> freqs) {
    std::vector<complex> out;
    out.reserve(freqs.size());
    for (double f : freqs) {
        out.push_back(admittance(p, f));
    }
    return out;
}

Immittance immittance(const MbvdParams& p, double f) {
    require(f > 0.0, "admittance: frequency must be > 0");
    const complex y = admittance(p, f);
    return {f, y, 1.0 / y};
}

MbvdParams parallel_combine(const MbvdParams& p, int m) {
    require(m >= 1, "parallel_combine: multiplicity must be >= 1");
    MbvdParams out = p;
    out.c0 = p.c0 * m;
    out.rs = p.rs / m;
    out.ls = p.ls / m;
    return out;
}

}  // namespace xbarfilt
