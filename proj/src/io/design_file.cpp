#include "xbarfilt/io/design_file.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "xbarfilt/error.hpp"

namespace xbarfilt::io {
namespace {

using nlohmann::json;

// Path-aware accessors over one JSON object.
class Reader {
public:
    Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) fail("expected an object");
    }

    [[noreturn]] void fail(const std::string& msg) const { throw SchemaError(path_ + ": " + msg); }

    bool has(const std::string& key) const {
        used_.insert(key);
        return j_.contains(key);
    }

    const json& raw(const std::string& key) const {
        used_.insert(key);
        if (!j_.contains(key)) fail("missing required key '" + key + "'");
        return j_.at(key);
    }

    double number(const std::string& key) const {
        const json& v = raw(key);
        if (!v.is_number()) throw SchemaError(child(key) + ": expected a number");
        return v.get<double>();
    }

    std::string string(const std::string& key) const {
        const json& v = raw(key);
        if (!v.is_string()) throw SchemaError(child(key) + ": expected a string");
        return v.get<std::string>();
    }

    int integer(const std::string& key) const {
        const json& v = raw(key);
        if (!v.is_number_integer()) throw SchemaError(child(key) + ": expected an integer");
        return v.get<int>();
    }

    // One of several unit spellings, value converted to SI.
    double scaled(std::initializer_list<std::pair<const char*, double>> spellings) const {
        std::optional<double> out;
        std::string first;
        for (const auto& [key, factor] : spellings) {
            if (first.empty()) first = key;
            if (!has(key)) continue;
            if (out) fail("conflicting unit spellings for '" + first + "'");
            out = number(key) * factor;
        }
        if (!out) fail("missing required key '" + first + "'");
        return *out;
    }

    void reject_unknown() const {
        for (const auto& [key, value] : j_.items()) {
            if (!used_.count(key)) throw SchemaError(child(key) + ": unknown key");
        }
    }

    std::string child(const std::string& key) const { return path_ + "." + key; }

private:
    const json& j_;
    std::string path_;
    mutable std::set<std::string> used_;
};

MbvdParams read_resonator(const json& j, const std::string& path) {
    Reader r(j, path);
    MbvdParams p;
    p.fs = r.scaled({{"fs_hz", 1.0}, {"fs_ghz", 1e9}});
    p.k2 = r.scaled({{"k2", 1.0}, {"k2_pct", 0.01}});
    p.q = r.number("q");
    p.c0 = r.scaled({{"c0_f", 1.0}, {"c0_ff", 1e-15}});
    p.rs = r.has("rs_ohm") ? r.number("rs_ohm") : 0.0;
    p.ls = r.has("ls_h") || r.has("ls_nh") ? r.scaled({{"ls_h", 1.0}, {"ls_nh", 1e-9}}) : 0.0;
    r.reject_unknown();
    try {
        p.validate();
    } catch (const InvalidArgument& e) {
        throw SchemaError(path + ": " + e.what());
    }
    return p;
}

PhysicalRealization read_physical(const std::string& label, const json& j, const std::string& path) {
    Reader r(j, path);
    PhysicalRealization p;
    p.label = label;
    p.base_t_nm = r.number("base_t_nm");
    const json& trims = r.raw("trims_nm");
    if (!trims.is_array()) r.fail("trims_nm: expected an array");
    for (std::size_t i = 0; i < trims.size(); ++i) {
        if (!trims[i].is_number()) throw SchemaError(r.child("trims_nm") + "[" + std::to_string(i) + "]: expected a number");
        p.trims_nm.push_back(trims[i].get<double>());
    }
    p.t_nm = r.number("t_nm");
    p.theta_deg = r.number("theta_deg");
    p.ne = r.integer("ne");
    p.ng = r.integer("ng");
    p.le_um = r.number("le_um");
    r.reject_unknown();
    try {
        p.validate();
    } catch (const InvalidArgument& e) {
        throw SchemaError(path + ": " + e.what());
    }
    return p;
}

json num(double v) { return canonical_number(v); }

}  // namespace

double canonical_number(double v) {
    if (v == 0.0 || !std::isfinite(v)) return v;
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return std::strtod(buf, nullptr);
}

bool operator==(const DesignFile& a, const DesignFile& b) {
    return design_to_json(a) == design_to_json(b);
}

DesignFile design_from_json(const json& j) {
    Reader root(j, "$");
    DesignFile d;
    d.design.z0 = root.has("z0_ohm") ? root.number("z0_ohm") : 50.0;
    const json& stages = root.raw("stages");
    if (!stages.is_array() || stages.empty()) root.fail("stages: expected a non-empty array");
    for (std::size_t i = 0; i < stages.size(); ++i) {
        const std::string path = "$.stages[" + std::to_string(i) + "]";
        Reader s(stages[i], path);
        Stage st;
        const std::string placement = s.string("placement");
        if (placement == "series") {
            st.placement = Placement::Series;
        } else if (placement == "shunt") {
            st.placement = Placement::Shunt;
        } else {
            throw SchemaError(path + ".placement: expected \"series\" or \"shunt\"");
        }
        st.label = s.has("label") ? s.string("label") : "stage" + std::to_string(i + 1);
        st.multiplicity = s.has("multiplicity") ? s.integer("multiplicity") : 1;
        if (st.multiplicity < 1) throw SchemaError(path + ".multiplicity: must be >= 1");
        st.resonator = read_resonator(s.raw("resonator"), path + ".resonator");
        s.reject_unknown();
        d.design.stages.push_back(std::move(st));
    }
    if (!(d.design.z0 > 0.0)) throw SchemaError("$.z0_ohm: must be > 0");

    if (root.has("physical")) {
        const json& phys = root.raw("physical");
        if (!phys.is_object()) root.fail("physical: expected an object keyed by stage label");
        for (const auto& [label, block] : phys.items()) {
            const bool known = std::any_of(d.design.stages.begin(), d.design.stages.end(),
                                           [&](const Stage& s) { return s.label == label; });
            if (!known) throw SchemaError("$.physical." + label + ": no stage carries this label");
            d.physical.push_back(read_physical(label, block, "$.physical." + label));
        }
    }
    if (root.has("material")) {
        Reader m(root.raw("material"), "$.material");
        MaterialPaths mp;
        if (m.has("dispersion_csv")) mp.dispersion_csv = m.string("dispersion_csv");
        if (m.has("anisotropy_csv")) mp.anisotropy_csv = m.string("anisotropy_csv");
        if (m.has("capacitance_csv")) mp.capacitance_csv = m.string("capacitance_csv");
        m.reject_unknown();
        d.material = mp;
    }
    root.reject_unknown();
    return d;
}

json design_to_json(const DesignFile& d) {
    json j;
    j["z0_ohm"] = num(d.design.z0);
    json stages = json::array();
    for (const Stage& s : d.design.stages) {
        const MbvdParams& p = s.resonator;
        stages.push_back({
            {"placement", s.placement == Placement::Series ? "series" : "shunt"},
            {"label", s.label},
            {"multiplicity", s.multiplicity},
            {"resonator",
             {{"fs_hz", num(p.fs)},
              {"k2", num(p.k2)},
              {"q", num(p.q)},
              {"c0_f", num(p.c0)},
              {"rs_ohm", num(p.rs)},
              {"ls_h", num(p.ls)}}},
        });
    }
    j["stages"] = std::move(stages);
    if (!d.physical.empty()) {
        json phys = json::object();
        for (const auto& r : d.physical) {
            json trims = json::array();
            for (double t : r.trims_nm) trims.push_back(num(t));
            phys[r.label] = {{"base_t_nm", num(r.base_t_nm)}, {"trims_nm", trims},
                             {"t_nm", num(r.t_nm)},           {"theta_deg", num(r.theta_deg)},
                             {"ne", r.ne},                     {"ng", r.ng},
                             {"le_um", num(r.le_um)}};
        }
        j["physical"] = std::move(phys);
    }
    if (d.material) {
        json m = json::object();
        if (d.material->dispersion_csv) m["dispersion_csv"] = *d.material->dispersion_csv;
        if (d.material->anisotropy_csv) m["anisotropy_csv"] = *d.material->anisotropy_csv;
        if (d.material->capacitance_csv) m["capacitance_csv"] = *d.material->capacitance_csv;
        j["material"] = std::move(m);
    }
    return j;
}

std::string canonical_dump(const json& j) { return j.dump(2) + "\n"; }

DesignFile load_design(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open design file " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw SchemaError(path.string() + ": invalid JSON: " + e.what());
    }
    return design_from_json(j);
}

void save_design(const DesignFile& d, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw SchemaError("cannot write design file " + path.string());
    out << canonical_dump(design_to_json(d));
}

json metrics_to_json(const FilterMetrics& m) {
    json tz = json::array();
    for (double f : m.tz_list) tz.push_back(num(f));
    return {
        {"fc_hz", num(m.fc)},
        {"min_il_db", num(m.min_il)},
        {"fbw3", num(m.fbw3)},
        {"fbw20", num(m.fbw20)},
        {"band3_hz", {num(m.band3.lo), num(m.band3.hi)}},
        {"band20_hz", {num(m.band20.lo), num(m.band20.hi)}},
        {"oob_lower_db", num(m.oob_lower.db)},
        {"oob_lower_hz", num(m.oob_lower.freq)},
        {"oob_upper_db", num(m.oob_upper.db)},
        {"oob_upper_hz", num(m.oob_upper.freq)},
        {"tz_hz", tz},
    };
}

json fit_result_to_json(const FitResult& r) {
    json groups = json::array();
    for (const auto& g : r.groups) {
        json at_bound = json::object();
        const auto v = to_array(g.params);
        json params = json::object();
        constexpr std::array<const char*, kFitParamCount> keys{"fs_hz", "k2", "q", "c0_f", "rs_ohm", "ls_h"};
        for (std::size_t k = 0; k < kFitParamCount; ++k) {
            params[keys[k]] = num(v[k]);
            at_bound[fit_param_name(static_cast<FitParam>(k))] = g.at_bound[k];
        }
        groups.push_back({{"label", g.label}, {"params", params}, {"at_bound", at_bound}});
    }
    return {
        {"design", design_to_json(DesignFile{r.design, {}, {}})},
        {"groups", groups},
        {"initial_residual_norm", num(r.initial_residual_norm)},
        {"residual_norm", num(r.residual_norm)},
        {"iterations", r.iterations},
        {"converged", r.converged},
        {"status", r.status},
    };
}

}  // namespace xbarfilt::io
