#include "xbarfilt/io/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "xbarfilt/error.hpp"
#include "xbarfilt/metrics.hpp"

namespace xbarfilt::io {
namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) {
        const auto b = cell.find_first_not_of(" \t\r");
        const auto e = cell.find_last_not_of(" \t\r");
        out.push_back(b == std::string::npos ? std::string{} : cell.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

std::ifstream open(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open " + path.string());
    return in;
}

}  // namespace

std::size_t CsvTable::column(const std::string& name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw SchemaError("missing CSV column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
}

bool CsvTable::has(const std::string& name) const {
    return std::find(header.begin(), header.end(), name) != header.end();
}

CsvTable read_csv(std::istream& in, const std::string& source) {
    CsvTable t;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
        auto cells = split(line);
        if (t.header.empty()) {
            t.header = std::move(cells);
            continue;
        }
        const std::string where = source + ":" + std::to_string(lineno);
        if (cells.size() != t.header.size()) {
            throw SchemaError(where + ": " + std::to_string(cells.size()) + " cells, header has " +
                              std::to_string(t.header.size()));
        }
        std::vector<double> row;
        for (const auto& c : cells) {
            char* end = nullptr;
            const double v = std::strtod(c.c_str(), &end);
            if (c.empty() || *end != '\0') throw SchemaError(where + ": not a number '" + c + "'");
            row.push_back(v);
        }
        t.rows.push_back(std::move(row));
    }
    if (t.header.empty()) throw SchemaError(source + ": missing header row");
    return t;
}

CsvTable read_csv(const std::filesystem::path& path) {
    auto in = open(path);
    return read_csv(in, path.string());
}

std::string format_double(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

void write_response_csv(const FrequencyResponse& resp, std::ostream& out) {
    resp.validate();
    out << "f_hz,s11_re,s11_im,s21_re,s21_im,s22_re,s22_im,il_db,rl_db\n";
    for (std::size_t i = 0; i < resp.size(); ++i) {
        const double rl = -20.0 * std::log10(std::abs(resp.s11[i]));
        out << format_double(resp.grid[i]) << ',' << format_double(resp.s11[i].real()) << ','
            << format_double(resp.s11[i].imag()) << ',' << format_double(resp.s21[i].real()) << ','
            << format_double(resp.s21[i].imag()) << ',' << format_double(resp.s22[i].real()) << ','
            << format_double(resp.s22[i].imag()) << ',' << format_double(insertion_loss_db(resp.s21[i]))
            << ',' << format_double(rl) << '\n';
    }
}

void write_response_csv(const FrequencyResponse& resp, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw SchemaError("cannot write " + path.string());
    write_response_csv(resp, out);
}

FrequencyResponse read_response_csv(const std::filesystem::path& path, double z0) {
    const CsvTable t = read_csv(path);
    const std::size_t f = t.column("f_hz");
    const std::size_t c[6] = {t.column("s11_re"), t.column("s11_im"), t.column("s21_re"),
                              t.column("s21_im"), t.column("s22_re"), t.column("s22_im")};
    if (t.rows.empty()) throw SchemaError(path.string() + ": no data rows");
    FrequencyResponse resp;
    std::vector<double> freqs;
    for (const auto& r : t.rows) {
        freqs.push_back(r[f]);
        resp.s11.emplace_back(r[c[0]], r[c[1]]);
        resp.s21.emplace_back(r[c[2]], r[c[3]]);
        resp.s22.emplace_back(r[c[4]], r[c[5]]);
    }
    resp.s12 = resp.s21;
    try {
        resp.grid = FrequencyGrid::from_points(std::move(freqs));
    } catch (const InvalidArgument& e) {
        throw SchemaError(path.string() + ": " + e.what());
    }
    resp.z0 = z0;
    return resp;
}

std::vector<DispersionAnchor> read_dispersion_csv(const std::filesystem::path& path) {
    const CsvTable t = read_csv(path);
    const auto ti = t.column("t_nm");
    const auto fi = t.column("fs_ghz");
    std::vector<DispersionAnchor> out;
    for (const auto& r : t.rows) out.push_back({r[ti], r[fi] * 1e9});
    return out;
}

std::vector<AnisotropyAnchor> read_anisotropy_csv(const std::filesystem::path& path) {
    const CsvTable t = read_csv(path);
    const auto th = t.column("theta_deg");
    const auto ti = t.column("t_nm");
    const auto ki = t.column("k2");
    std::vector<AnisotropyAnchor> out;
    for (const auto& r : t.rows) out.push_back({r[th], r[ti], r[ki]});
    return out;
}

std::vector<CapacitanceRow> read_capacitance_csv(const std::filesystem::path& path) {
    const CsvTable t = read_csv(path);
    const auto c = t.column("c0_ff");
    const auto ti = t.column("t_nm");
    const auto ne = t.column("ne");
    const auto ng = t.column("ng");
    const auto le = t.column("le_um");
    std::vector<CapacitanceRow> out;
    for (const auto& r : t.rows) {
        out.push_back({r[c] * 1e-15, r[ti], static_cast<int>(std::lround(r[ne])),
                       static_cast<int>(std::lround(r[ng])), r[le]});
    }
    return out;
}

MaterialSet load_material_dir(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) throw SchemaError("material directory not found: " + dir.string());
    MaterialSet m = default_material();
    try {
        if (std::filesystem::exists(dir / "dispersion.csv")) {
            m.dispersion = fit_dispersion(read_dispersion_csv(dir / "dispersion.csv"));
        }
        if (std::filesystem::exists(dir / "anisotropy.csv")) {
            m.anisotropy = AnisotropyModel(read_anisotropy_csv(dir / "anisotropy.csv"));
        }
        if (std::filesystem::exists(dir / "capacitance.csv")) {
            m.density = fit_capacitance_density(read_capacitance_csv(dir / "capacitance.csv"));
        }
    } catch (const InvalidArgument& e) {
        throw SchemaError(dir.string() + ": " + e.what());
    }
    return m;
}

void write_trace_csv(const std::vector<TraceEntry>& trace, const std::vector<std::string>& labels,
                     std::ostream& out) {
    out << "pass";
    for (const auto& l : labels) out << ',' << l << "_fs_hz," << l << "_k2," << l << "_c0_f";
    out << ",objective\n";
    for (const auto& e : trace) {
        out << e.pass;
        for (double p : e.params) out << ',' << format_double(p);
        out << ',' << format_double(e.objective) << '\n';
    }
}

}  // namespace xbarfilt::io
