#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "xbarfilt/ladder.hpp"
#include "xbarfilt/material.hpp"
#include "xbarfilt/synth.hpp"

namespace xbarfilt::io {

/// Header plus rows of numbers, columns addressed by name.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    std::size_t column(const std::string& name) const;
    bool has(const std::string& name) const;
};

CsvTable read_csv(std::istream& in, const std::string& source = "<stream>");
CsvTable read_csv(const std::filesystem::path& path);

/// f_hz, s11_re, s11_im, s21_re, s21_im, s22_re, s22_im, il_db, rl_db.
void write_response_csv(const FrequencyResponse& resp, std::ostream& out);
void write_response_csv(const FrequencyResponse& resp, const std::filesystem::path& path);
/// Inverse of write_response_csv; S12 is taken equal to S21.
FrequencyResponse read_response_csv(const std::filesystem::path& path, double z0 = 50.0);

std::vector<DispersionAnchor> read_dispersion_csv(const std::filesystem::path& path);
std::vector<AnisotropyAnchor> read_anisotropy_csv(const std::filesystem::path& path);
std::vector<CapacitanceRow> read_capacitance_csv(const std::filesystem::path& path);

/// Material from a directory holding dispersion.csv, anisotropy.csv and
/// optionally capacitance.csv; missing tables fall back to the defaults.
MaterialSet load_material_dir(const std::filesystem::path& dir);

void write_trace_csv(const std::vector<TraceEntry>& trace, const std::vector<std::string>& labels,
                     std::ostream& out);

/// Shortest round-trip decimal form of a double.
std::string format_double(double v);

}  // namespace xbarfilt::io
