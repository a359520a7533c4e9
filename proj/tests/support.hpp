#pragma once

#include <cmath>
#include <complex>
#include <filesystem>
#include <random>
#include <string>

#include "xbarfilt/ladder.hpp"

namespace xbarfilt::test {

inline MbvdParams res(double fs_ghz, double k2, double q, double c0_ff, double rs, double ls_nh) {
    return {fs_ghz * 1e9, k2, q, c0_ff * 1e-15, rs, ls_nh * 1e-9};
}

inline LadderDesign three_element() {
    LadderDesign d;
    d.stages = {{Placement::Shunt, res(17.9, 0.425, 80, 168, 1, 0.1), 1, "Shunt1"},
                {Placement::Series, res(21, 0.17, 80, 48, 3, 0.2), 1, "Series"},
                {Placement::Shunt, res(19.1, 0.226, 80, 169, 1, 0.1), 1, "Shunt2"}};
    return d;
}

inline LadderDesign eight_element() {
    const MbvdParams sh1 = res(20.5, 0.175, 80, 180, 2.5, 0.05);
    const MbvdParams ser = res(22.13, 0.165, 80, 77, 3.5, 0.1);
    const MbvdParams sh2 = res(20.5, 0.175, 80, 32.5, 2.5, 0.05);
    LadderDesign d;
    d.stages = {{Placement::Shunt, sh1, 1, "Shunt1"},
                {Placement::Series, ser, 1, "Series"},
                {Placement::Shunt, sh2, 4, "Shunt2"},
                {Placement::Series, ser, 1, "Series"},
                {Placement::Shunt, sh1, 1, "Shunt1"}};
    return d;
}

inline MbvdParams random_params(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    MbvdParams p;
    p.fs = 1e9 * (5.0 + 35.0 * u(rng));
    p.k2 = 0.01 + 0.5 * u(rng);
    p.q = 10.0 + 1000.0 * u(rng);
    p.c0 = 1e-15 * (10.0 + 300.0 * u(rng));
    p.rs = 5.0 * u(rng);
    p.ls = 0.5e-9 * u(rng);
    return p;
}

/// Lossless reactance of an mBVD one-port, written out from the circuit.
inline double lossless_reactance(const MbvdParams& p, double f) {
    const double pi = 3.14159265358979323846;
    const double w = 2.0 * pi * f;
    const double ws = 2.0 * pi * p.fs;
    const double k = pi * pi / 8.0;
    const double cm = p.c0 * p.k2 / k, lm = k / (ws * ws * p.c0 * p.k2);
    const double b_motional = -1.0 / (w * lm - 1.0 / (w * cm));
    return w * p.ls - 1.0 / (w * p.c0 + b_motional);
}

/// Sign-change root of f on [lo, hi] by bisection.
template <class F>
double bisect_root(F f, double lo, double hi) {
    const bool lo_pos = f(lo) > 0.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        ((f(mid) > 0.0) == lo_pos ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

inline double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

inline std::filesystem::path source_dir() { return XBARFILT_SOURCE_DIR; }

/// Fresh scratch directory under the build tree.
inline std::filesystem::path scratch(const std::string& name) {
    const auto p = std::filesystem::path(XBARFILT_BINARY_DIR) / "scratch" / name;
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

}  // namespace xbarfilt::test
