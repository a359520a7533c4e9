#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "support.hpp"
#include "xbarfilt/error.hpp"
#include "xbarfilt/io/csv.hpp"
#include "xbarfilt/io/design_file.hpp"
#include "xbarfilt/io/touchstone.hpp"

using namespace xbarfilt;
using namespace xbarfilt::io;
using nlohmann::json;

namespace {

const double kPi = 3.14159265358979323846;

json minimal_design() {
    return json::parse(R"({
      "z0_ohm": 50,
      "stages": [{"placement": "series", "label": "S", "multiplicity": 1,
                  "resonator": {"fs_hz": 21e9, "k2": 0.17, "q": 80, "c0_f": 48e-15,
                                "rs_ohm": 3, "ls_h": 0.2e-9}}]
    })");
}

std::string schema_message(const json& j) {
    try {
        design_from_json(j);
    } catch (const SchemaError& e) {
        return e.what();
    }
    return "";
}

TouchstoneIssue touchstone_issue(const std::string& text, int ports = 2) {
    std::istringstream in(text);
    try {
        read_touchstone(in, ports);
    } catch (const TouchstoneError& e) {
        return e.issue();
    }
    FAIL("expected TouchstoneError");
    return TouchstoneIssue::Data;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

FrequencyResponse three_element_response() {
    return cascade(test::three_element(), FrequencyGrid::uniform(1e9, 40e9, 1e7));
}

}  // namespace

TEST_CASE("design file parses SI and scaled spellings alike") {
    const DesignFile si = design_from_json(minimal_design());
    json scaled = minimal_design();
    scaled["stages"][0]["resonator"] = json::parse(
        R"({"fs_ghz": 21, "k2_pct": 17, "q": 80, "c0_ff": 48, "rs_ohm": 3, "ls_nh": 0.2})");
    const DesignFile sc = design_from_json(scaled);
    const MbvdParams& a = si.design.stages[0].resonator;
    const MbvdParams& b = sc.design.stages[0].resonator;
    CHECK(a.fs == doctest::Approx(b.fs).epsilon(1e-15));
    CHECK(a.k2 == doctest::Approx(b.k2).epsilon(1e-15));
    CHECK(a.c0 == doctest::Approx(b.c0).epsilon(1e-15));
    CHECK(a.ls == doctest::Approx(b.ls).epsilon(1e-15));
    CHECK(si.design.stages[0].placement == Placement::Series);
    CHECK(si.design.z0 == 50.0);
}

TEST_CASE("schema errors name the JSON path") {
    json j = minimal_design();
    j["stages"][0]["resonator"]["foo"] = 1;
    CHECK(schema_message(j).find("$.stages[0].resonator.foo") != std::string::npos);

    j = minimal_design();
    j["stages"][0]["resonator"]["q"] = "80";
    CHECK(schema_message(j).find("$.stages[0].resonator.q") != std::string::npos);

    j = minimal_design();
    j["stages"][0]["placement"] = "diagonal";
    CHECK(schema_message(j).find("$.stages[0].placement") != std::string::npos);

    j = minimal_design();
    j.erase("stages");
    CHECK(schema_message(j).find("stages") != std::string::npos);

    j = minimal_design();
    j["extra"] = true;
    CHECK(schema_message(j).find("$.extra") != std::string::npos);

    j = minimal_design();
    j["stages"][0]["resonator"]["fs_ghz"] = 21;
    CHECK_FALSE(schema_message(j).empty());
}

TEST_CASE("physical blocks must refer to known labels") {
    json j = minimal_design();
    j["physical"] = json::parse(R"({"X": {"base_t_nm": 99, "trims_nm": [7], "t_nm": 92,
                                          "theta_deg": 45, "ne": 17, "ng": 6, "le_um": 63}})");
    CHECK(schema_message(j).find("$.physical.X") != std::string::npos);
}

TEST_CASE("load then save is a fixed point") {
    for (const char* name : {"three_element.json", "eight_element.json"}) {
        const auto dir = test::scratch("fixed_point");
        const DesignFile first = load_design(test::source_dir() / "data/designs" / name);
        save_design(first, dir / "a.json");
        const DesignFile second = load_design(dir / "a.json");
        save_design(second, dir / "b.json");
        CHECK(first == second);
        CHECK(slurp(dir / "a.json") == slurp(dir / "b.json"));
        CHECK(second.physical.size() == 3);
    }
}

TEST_CASE("shipped designs carry the reference values") {
    const DesignFile d = load_design(test::source_dir() / "data/designs/three_element.json");
    const LadderDesign t = test::three_element();
    REQUIRE(d.design.stages.size() == t.stages.size());
    for (std::size_t i = 0; i < t.stages.size(); ++i) {
        const MbvdParams& a = d.design.stages[i].resonator;
        const MbvdParams& b = t.stages[i].resonator;
        CHECK(test::rel(a.fs, b.fs) < 1e-12);
        CHECK(test::rel(a.k2, b.k2) < 1e-12);
        CHECK(test::rel(a.c0, b.c0) < 1e-12);
        CHECK(a.q == b.q);
    }
    const DesignFile e = load_design(test::source_dir() / "data/designs/eight_element.json");
    CHECK(e.design.stages.size() == 5);
    CHECK(e.design.stages[2].multiplicity == 4);
}

TEST_CASE("canonical numbers keep twelve significant digits") {
    CHECK(canonical_number(0.1 + 0.2) == 0.3);
    CHECK(canonical_number(1.0 / 3.0) == 0.333333333333);
    CHECK(canonical_number(4.8e-14) == 4.8e-14);
    CHECK(canonical_dump(json{{"b", 1}, {"a", 2}}).find("\"a\"") < canonical_dump(json{{"b", 1}, {"a", 2}}).find("\"b\""));
}

TEST_CASE("touchstone MA rows follow the format definition") {
    std::istringstream in("! comment\n# GHz S MA R 50\n20.5 0.81 -170 0.82 -5 0.82 -5 0.80 -171\n");
    const FrequencyResponse r = read_touchstone(in);
    REQUIRE(r.size() == 1);
    CHECK(r.grid[0] == 20.5e9);
    CHECK(std::abs(r.s21[0]) == doctest::Approx(0.82).epsilon(1e-15));
    CHECK(std::abs(r.s21[0] - std::polar(0.82, -5.0 * kPi / 180.0)) < 1e-15);
    CHECK(std::abs(r.s11[0] - std::polar(0.81, -170.0 * kPi / 180.0)) < 1e-15);
    CHECK(std::abs(r.s22[0]) == doctest::Approx(0.80));
    CHECK(r.z0 == 50.0);
}

TEST_CASE("touchstone DB and RI rows") {
    std::istringstream db("# MHz S DB R 25\n20500 -20 0 -6.0206 90 -6.0206 90 -20 0\n");
    const FrequencyResponse a = read_touchstone(db);
    CHECK(a.grid[0] == 20.5e9);
    CHECK(a.z0 == 25.0);
    CHECK(std::abs(a.s11[0]) == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(std::abs(a.s21[0] - complex(0.0, 0.5)) < 1e-5);
    std::istringstream ri("# Hz S RI R 50\n1e9 0.1 0.2 0.3 0.4 0.3 0.4 0.5 0.6\n");
    const FrequencyResponse b = read_touchstone(ri);
    CHECK(b.s21[0] == complex(0.3, 0.4));
    CHECK(b.s22[0] == complex(0.5, 0.6));
}

TEST_CASE("touchstone RI round trip is bit-stable") {
    const FrequencyResponse r = three_element_response();
    CHECK(r.size() == 3901);
    std::stringstream buf;
    write_touchstone(r, buf);
    const FrequencyResponse back = read_touchstone(buf);
    REQUIRE(back.size() == r.size());
    bool identical = true;
    for (std::size_t i = 0; i < r.size(); ++i) {
        identical = identical && back.grid[i] == r.grid[i] && back.s11[i] == r.s11[i] && back.s21[i] == r.s21[i] &&
                    back.s12[i] == r.s12[i] && back.s22[i] == r.s22[i];
    }
    CHECK(identical);
    std::stringstream again;
    write_touchstone(back, again);
    CHECK(again.str() == buf.str());
}

TEST_CASE("touchstone MA and DB round trips stay within 1e-12") {
    const FrequencyResponse r = cascade(test::three_element(), FrequencyGrid::uniform(1e9, 40e9, 1e8));
    for (TouchstoneFormat fmt : {TouchstoneFormat::MA, TouchstoneFormat::DB}) {
        std::stringstream buf;
        write_touchstone(r, buf, {fmt, "GHZ"});
        const FrequencyResponse back = read_touchstone(buf);
        for (std::size_t i = 0; i < r.size(); ++i) {
            CHECK(test::rel(back.grid[i], r.grid[i]) < 1e-15);
            CHECK(std::abs(back.s21[i] - r.s21[i]) < 1e-12);
            CHECK(std::abs(back.s11[i] - r.s11[i]) < 1e-12);
        }
    }
}

TEST_CASE("touchstone diagnostics are distinct") {
    CHECK(touchstone_issue("# GHz Z RI R 50\n1 0 0 0 0 0 0 0 0\n") == TouchstoneIssue::OptionLine);
    CHECK(touchstone_issue("# GHz S XY R 50\n1 0 0 0 0 0 0 0 0\n") == TouchstoneIssue::OptionLine);
    CHECK(touchstone_issue("# GHz S RI R 50\n# GHz S RI R 50\n") == TouchstoneIssue::OptionLine);
    CHECK(touchstone_issue("# GHz S RI R 50\n2 0 0 0 0 0 0 0 0\n1 0 0 0 0 0 0 0 0\n") == TouchstoneIssue::NonMonotone);
    CHECK(touchstone_issue("# GHz S RI R 50\n1 0 0 0 0 0 0 0 0\n1 0 0 0 0 0 0 0 0\n") == TouchstoneIssue::NonMonotone);
    CHECK(touchstone_issue("# GHz S RI R 50\n1 0 0 0 0 0 0 0 0\n", 3) == TouchstoneIssue::PortCount);
    CHECK(touchstone_issue("# GHz S RI R 50\n1 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0\n") == TouchstoneIssue::PortCount);
    CHECK(touchstone_issue("# GHz S RI R 50\n1 0 0 x 0 0 0 0 0\n") == TouchstoneIssue::Data);
}

TEST_CASE("a 3-port file is rejected by extension") {
    const auto dir = test::scratch("touchstone_ports");
    std::ofstream(dir / "three.s3p") << "# GHz S RI R 50\n1 0 0 0 0 0 0 0 0\n";
    try {
        read_touchstone(dir / "three.s3p");
        FAIL("expected TouchstoneError");
    } catch (const TouchstoneError& e) {
        CHECK(e.issue() == TouchstoneIssue::PortCount);
    }
    CHECK_THROWS_AS(read_touchstone(dir / "missing.s2p"), SchemaError);
}

TEST_CASE("CSV and Touchstone emissions agree") {
    const auto dir = test::scratch("csv_vs_touchstone");
    const FrequencyResponse r = three_element_response();
    write_response_csv(r, dir / "r.csv");
    write_touchstone(r, dir / "r.s2p", {TouchstoneFormat::MA, "GHZ"});
    const FrequencyResponse a = read_response_csv(dir / "r.csv");
    const FrequencyResponse b = read_touchstone(dir / "r.s2p");
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(std::abs(a.grid[i] - b.grid[i]) <= 1e-9 * a.grid[i]);
        CHECK(std::abs(a.s11[i] - b.s11[i]) <= 1e-9);
        CHECK(std::abs(a.s21[i] - b.s21[i]) <= 1e-9);
        CHECK(std::abs(a.s22[i] - b.s22[i]) <= 1e-9);
    }
}

TEST_CASE("response CSV carries derived loss columns") {
    const FrequencyResponse r = cascade(test::three_element(), FrequencyGrid::uniform(15e9, 25e9, 1e9));
    std::stringstream buf;
    write_response_csv(r, buf);
    const CsvTable t = read_csv(buf);
    CHECK(t.header == std::vector<std::string>{"f_hz", "s11_re", "s11_im", "s21_re", "s21_im", "s22_re",
                                               "s22_im", "il_db", "rl_db"});
    REQUIRE(t.rows.size() == r.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
        CHECK(t.rows[i][t.column("il_db")] == doctest::Approx(-20.0 * std::log10(std::abs(r.s21[i]))));
        CHECK(t.rows[i][t.column("rl_db")] == doctest::Approx(-20.0 * std::log10(std::abs(r.s11[i]))));
    }
    CHECK_THROWS_AS(t.column("nope"), SchemaError);
}

TEST_CASE("format_double round-trips") {
    for (double v : {0.1, 1.0 / 3.0, 4.8e-14, 20.5e9, -1.25}) CHECK(std::stod(format_double(v)) == v);
}

TEST_CASE("material tables load from a directory") {
    const MaterialSet t2 = load_material_dir(test::source_dir() / "data/material/eight_element");
    CHECK(t2.dispersion.fs_at(80.0) == doctest::Approx(22.13e9).epsilon(1e-9));
    CHECK(t2.dispersion.fs_at(89.0) == doctest::Approx(20.5e9).epsilon(1e-9));
    const MaterialSet t1 = load_material_dir(test::source_dir() / "data/material/three_element");
    const MaterialSet def = default_material();
    for (double t : {80.0, 90.0, 99.0}) CHECK(t1.dispersion.fs_at(t) == doctest::Approx(def.dispersion.fs_at(t)));
    CHECK(t1.anisotropy.k2_at(45.0, 92.0) == doctest::Approx(0.226));
    CHECK(t1.density.rho == doctest::Approx(def.density.rho));
    const auto rows = read_anisotropy_csv(test::source_dir() / "data/material/three_element/anisotropy.csv");
    CHECK(rows.size() == 9);
}
