#pragma once

#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "cornerforge/ontology.hpp"
#include "cornerforge/registry.hpp"

namespace cornerforge {

// AnnotationTargeted metrics flag individual annotations (any ClassPresence
// predicate present); SceneWide metrics flag every annotation of a qualifying
// sample (traffic jam, weather keywords).
enum class HitMode { AnnotationTargeted, SceneWide };

std::string to_string(HitMode mode);
HitMode parse_hit_mode(std::string_view text);

// One executable dataset query. Predicates are fully resolved: named ranges
// inlined, registry overrides applied, every range in base units (m/s, rad).
struct CompiledMetric {
    int corner_case_id = 0;
    std::string cause_text;
    std::set<Classification> classifications;
    SensorSources sources{SensorSource::Video};
    FusionStage fusion = FusionStage::Single;
    std::vector<Predicate> predicates;
    HitMode hit_mode = HitMode::SceneWide;

    bool operator==(const CompiledMetric&) const = default;
};

struct MetricsFile {
    std::string version = "1";
    std::vector<CompiledMetric> metrics; // sorted by (corner_case_id, cause_text)

    bool operator==(const MetricsFile&) const = default;
};

// One metric per cause that names a scene description; causes without a
// scene_ref are skipped (validate_registry reports them).
MetricsFile compile(const CornerCaseOntology& ontology, const std::vector<CornerCaseSpec>& specs);

nlohmann::json metrics_to_json(const MetricsFile& file);
MetricsFile metrics_from_json(const nlohmann::json& document);

// Ontology classes referenced by any predicate of any metric; these are the
// classes a label mapping must cover.
std::set<std::string> required_classes(const MetricsFile& file);

} // namespace cornerforge
