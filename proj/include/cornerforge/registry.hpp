#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cornerforge/taxonomy.hpp"

namespace cornerforge {

// Sheet-supplied replacement for an ontology range, attached to one cause row.
struct RangeOverride {
    std::string attribute;
    double min = 0.0;
    double max = 0.0;
    std::string unit;

    bool operator==(const RangeOverride&) const = default;
};

struct Cause {
    std::string text;
    std::optional<std::string> scene_ref;
    std::optional<RangeOverride> override_range;

    bool operator==(const Cause&) const = default;
};

// One expert-described corner case, merged from all CSV rows sharing its id.
struct CornerCaseSpec {
    int id = 0;
    std::string description;
    std::vector<Cause> causes; // sorted by text, unique
    SensorSources sources{SensorSource::Video};
    FusionStage fusion = FusionStage::Single;
    std::set<Classification> classifications;

    bool operator==(const CornerCaseSpec&) const = default;
};

// CSV header: id,description,cause,ravioli,source,layer,level
// plus optional columns scene_ref, override_attr, override_min, override_max,
// override_unit. Multiple rows may share an id (one row per cause and
// classification); grouped rows must agree on description, sources and fusion.
std::vector<CornerCaseSpec> load_registry(const std::string& csv_text);

struct RegistryDiagnostic {
    int corner_case_id = 0;
    std::string cause;
    std::string message;
};

// Warnings for causes that cannot be compiled (no scene_ref); never fails.
std::vector<RegistryDiagnostic> validate_registry(const std::vector<CornerCaseSpec>& specs);

} // namespace cornerforge
