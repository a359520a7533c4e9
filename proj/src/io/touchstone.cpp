#include "xbarfilt/io/touchstone.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <optional>
#include <regex>
#include <sstream>
#include <vector>

namespace xbarfilt::io {
namespace {

struct OptionLine {
    double freq_scale = 1e9;
    TouchstoneFormat format = TouchstoneFormat::MA;
    double r = 50.0;
};

std::string upper(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::toupper(c); });
    return s;
}

double unit_scale(const std::string& u) {
    if (u == "HZ") return 1.0;
    if (u == "KHZ") return 1e3;
    if (u == "MHZ") return 1e6;
    if (u == "GHZ") return 1e9;
    return 0.0;
}

OptionLine parse_option_line(const std::string& line, const std::string& where) {
    OptionLine opt;
    std::istringstream in(line.substr(1));
    std::string tok;
    auto fail = [&](const std::string& msg) -> void {
        throw TouchstoneError(TouchstoneIssue::OptionLine, where + ": malformed option line: " + msg);
    };
    while (in >> tok) {
        tok = upper(tok);
        if (double s = unit_scale(tok); s > 0.0) {
            opt.freq_scale = s;
        } else if (tok == "S") {
        } else if (tok == "Y" || tok == "Z" || tok == "H" || tok == "G") {
            fail("only S parameters are supported, got '" + tok + "'");
        } else if (tok == "RI" || tok == "MA" || tok == "DB") {
            opt.format = parse_format(tok);
        } else if (tok == "R") {
            std::string v;
            if (!(in >> v)) fail("R without a value");
            char* end = nullptr;
            opt.r = std::strtod(v.c_str(), &end);
            if (*end != '\0' || !(opt.r > 0.0)) fail("bad reference resistance '" + v + "'");
        } else {
            fail("unknown token '" + tok + "'");
        }
    }
    return opt;
}

complex to_complex(double a, double b, TouchstoneFormat fmt) {
    constexpr double deg = std::numbers::pi / 180.0;
    switch (fmt) {
        case TouchstoneFormat::RI:
            return {a, b};
        case TouchstoneFormat::MA:
            return std::polar(a, b * deg);
        case TouchstoneFormat::DB:
            return std::polar(std::pow(10.0, a / 20.0), b * deg);
    }
    return {};
}

int ports_from_extension(const std::filesystem::path& path) {
    static const std::regex re(R"(\.s(\d+)p)", std::regex::icase);
    std::smatch m;
    const std::string ext = path.extension().string();
    if (std::regex_match(ext, m, re)) return std::stoi(m[1]);
    return 0;
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

TouchstoneFormat parse_format(const std::string& s) {
    const std::string u = upper(s);
    if (u == "RI") return TouchstoneFormat::RI;
    if (u == "MA") return TouchstoneFormat::MA;
    if (u == "DB") return TouchstoneFormat::DB;
    throw InvalidArgument("unknown Touchstone format '" + s + "' (expected RI, MA or DB)");
}

FrequencyResponse read_touchstone(std::istream& in, int ports_hint, const std::string& source) {
    if (ports_hint != 0 && ports_hint != 2) {
        throw TouchstoneError(TouchstoneIssue::PortCount,
                              source + ": " + std::to_string(ports_hint) + "-port file, expected 2-port");
    }
    std::optional<OptionLine> opt;
    std::vector<double> freqs;
    FrequencyResponse resp;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string where = source + ":" + std::to_string(lineno);
        if (auto bang = line.find('!'); bang != std::string::npos) line.erase(bang);
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        if (line[first] == '#') {
            if (opt) throw TouchstoneError(TouchstoneIssue::OptionLine, where + ": duplicate option line");
            opt = parse_option_line(line.substr(first), where);
            continue;
        }
        if (!opt) opt = OptionLine{};
        std::istringstream row(line);
        std::vector<double> v;
        std::string tok;
        while (row >> tok) {
            char* end = nullptr;
            const double x = std::strtod(tok.c_str(), &end);
            if (end == tok.c_str() || *end != '\0') {
                throw TouchstoneError(TouchstoneIssue::Data, where + ": not a number '" + tok + "'");
            }
            v.push_back(x);
        }
        if (v.size() != 9) {
            throw TouchstoneError(TouchstoneIssue::PortCount,
                                  where + ": " + std::to_string(v.size()) +
                                      " values in data row, a 2-port row has 9");
        }
        const double f = v[0] * opt->freq_scale;
        if (!freqs.empty() && !(f > freqs.back())) {
            throw TouchstoneError(TouchstoneIssue::NonMonotone,
                                  where + ": frequency " + fmt17(f) + " Hz is not above the previous point");
        }
        freqs.push_back(f);
        resp.s11.push_back(to_complex(v[1], v[2], opt->format));
        resp.s21.push_back(to_complex(v[3], v[4], opt->format));
        resp.s12.push_back(to_complex(v[5], v[6], opt->format));
        resp.s22.push_back(to_complex(v[7], v[8], opt->format));
    }
    if (freqs.empty()) throw TouchstoneError(TouchstoneIssue::Data, source + ": no data rows");
    resp.grid = FrequencyGrid::from_points(std::move(freqs));
    resp.z0 = opt->r;
    return resp;
}

FrequencyResponse read_touchstone(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open Touchstone file " + path.string());
    return read_touchstone(in, ports_from_extension(path), path.string());
}

void write_touchstone(const FrequencyResponse& resp, std::ostream& out, const TouchstoneWriteOptions& opts) {
    resp.validate();
    const std::string unit = upper(opts.freq_unit);
    const double scale = unit_scale(unit);
    require(scale > 0.0, "unknown frequency unit '" + opts.freq_unit + "'");
    const char* fmt_name = opts.format == TouchstoneFormat::RI ? "RI" : opts.format == TouchstoneFormat::MA ? "MA" : "DB";
    out << "! two-port S-parameters\n";
    out << "# " << unit << " S " << fmt_name << " R " << fmt17(resp.z0) << "\n";
    constexpr double deg = 180.0 / std::numbers::pi;
    auto pair = [&](complex s) {
        switch (opts.format) {
            case TouchstoneFormat::RI:
                return fmt17(s.real()) + " " + fmt17(s.imag());
            case TouchstoneFormat::MA:
                return fmt17(std::abs(s)) + " " + fmt17(std::arg(s) * deg);
            case TouchstoneFormat::DB:
                return fmt17(20.0 * std::log10(std::abs(s))) + " " + fmt17(std::arg(s) * deg);
        }
        return std::string{};
    };
    for (std::size_t i = 0; i < resp.size(); ++i) {
        out << fmt17(resp.grid[i] / scale) << " " << pair(resp.s11[i]) << " " << pair(resp.s21[i]) << " "
            << pair(resp.s12[i]) << " " << pair(resp.s22[i]) << "\n";
    }
}

void write_touchstone(const FrequencyResponse& resp, const std::filesystem::path& path,
                      const TouchstoneWriteOptions& opts) {
    std::ofstream out(path);
    if (!out) throw SchemaError("cannot write Touchstone file " + path.string());
    write_touchstone(resp, out, opts);
}

}  // namespace xbarfilt::io
