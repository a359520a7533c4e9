#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "xbarfilt/fit.hpp"
#include "xbarfilt/ladder.hpp"
#include "xbarfilt/material.hpp"

namespace xbarfilt::io {

/// Optional paths to material anchor tables referenced by a design.
struct MaterialPaths {
    std::optional<std::string> dispersion_csv;
    std::optional<std::string> anisotropy_csv;
    std::optional<std::string> capacitance_csv;
};

struct DesignFile {
    LadderDesign design;
    std::vector<PhysicalRealization> physical;
    std::optional<MaterialPaths> material;

    friend bool operator==(const DesignFile&, const DesignFile&);
};

/// Strict schema: unknown keys and wrong types raise SchemaError naming the
/// JSON path. Scaled-unit spellings (fs_ghz, c0_ff, ls_nh, k2_pct) are
/// accepted on input; output always uses the SI keys.
DesignFile design_from_json(const nlohmann::json& j);
nlohmann::json design_to_json(const DesignFile& d);

DesignFile load_design(const std::filesystem::path& path);
void save_design(const DesignFile& d, const std::filesystem::path& path);

/// Canonical text: sorted keys, numbers rounded to 12 significant digits.
std::string canonical_dump(const nlohmann::json& j);

/// Round to 12 significant digits.
double canonical_number(double v);

nlohmann::json metrics_to_json(const FilterMetrics& m);
nlohmann::json fit_result_to_json(const FitResult& r);

}  // namespace xbarfilt::io
