#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "cornerforge/registry.hpp"
#include "cornerforge/taxonomy.hpp"

namespace cornerforge {

enum class Unit { KmPerHour, MetersPerSecond, Count, Radians, Unitless };

std::string to_string(Unit unit);
Unit parse_unit(std::string_view text);

// km/h values convert to m/s (division by 3.6); every other unit is already a
// base unit (m/s, count, rad, unitless).
Unit base_unit(Unit unit);
double to_base_value(double value, Unit unit);

struct OntologyClass {
    std::string name;
    std::optional<std::string> parent;

    bool operator==(const OntologyClass&) const = default;
};

// Closed interval [min, max] over a named attribute.
struct NamedRange {
    std::string name;
    std::string attribute;
    double min = 0.0;
    double max = 0.0;
    Unit unit = Unit::Unitless;

    bool operator==(const NamedRange&) const = default;
};

struct AttributeRangeFilter {
    std::string attribute;
    double min = 0.0;
    double max = 0.0;
    Unit unit = Unit::Unitless;

    bool operator==(const AttributeRangeFilter&) const = default;
};

// |wrap(annotation heading - ego heading)| <= max_abs_delta, wrap into (-pi, pi].
struct RelativeHeadingFilter {
    double max_abs_delta = 0.0;

    bool operator==(const RelativeHeadingFilter&) const = default;
};

using Filter = std::variant<AttributeRangeFilter, RelativeHeadingFilter>;

struct ClassPresencePredicate {
    std::string class_name;
    int min_count = 1;

    bool operator==(const ClassPresencePredicate&) const = default;
};

struct CountWithFilterPredicate {
    std::string class_name;
    std::vector<Filter> filters;
    int min_count = 1;
    std::optional<int> max_count;

    bool operator==(const CountWithFilterPredicate&) const = default;
};

// range_name is kept when the ontology referenced a NamedRange by name;
// attribute/min/max/unit always hold the resolved values.
struct EgoAttributeRangePredicate {
    std::optional<std::string> range_name;
    std::string attribute;
    double min = 0.0;
    double max = 0.0;
    Unit unit = Unit::Unitless;

    bool operator==(const EgoAttributeRangePredicate&) const = default;
};

struct SceneTextKeywordPredicate {
    std::vector<std::string> keywords;
    int max_edit_distance = 0;

    bool operator==(const SceneTextKeywordPredicate&) const = default;
};

using Predicate = std::variant<ClassPresencePredicate, CountWithFilterPredicate,
                               EgoAttributeRangePredicate, SceneTextKeywordPredicate>;

// Conjunction of predicates naming one corner-case situation.
struct SceneDescription {
    std::string name;
    std::vector<Predicate> predicates;

    bool operator==(const SceneDescription&) const = default;
};

// Cause class plus the corner-case meta information attached to it.
struct MetaLink {
    std::string cause_class;
    int corner_case_id = 0;
    std::string cause;
    std::set<Classification> classifications;
    SensorSources sources{SensorSource::Video};
    FusionStage fusion = FusionStage::Single;
    std::optional<std::string> scene;

    bool operator==(const MetaLink&) const = default;
};

class CornerCaseOntology {
public:
    static CornerCaseOntology load(const nlohmann::json& document);
    nlohmann::json to_json() const;

    const std::vector<OntologyClass>& classes() const { return classes_; }
    const std::vector<NamedRange>& ranges() const { return ranges_; }
    const std::vector<SceneDescription>& scenes() const { return scenes_; }
    const std::vector<MetaLink>& meta() const { return meta_; }

    bool has_class(const std::string& name) const;
    const NamedRange* find_range(const std::string& name) const;
    const SceneDescription* find_scene(const std::string& name) const;

    // Transitive subclass closure including the class itself.
    std::set<std::string> descendants(const std::string& class_name) const;

    bool operator==(const CornerCaseOntology&) const = default;

private:
    void validate() const;
    friend CornerCaseOntology inject_meta_classes(const CornerCaseOntology&,
                                                  const std::vector<CornerCaseSpec>&);

    std::vector<OntologyClass> classes_;   // sorted by name
    std::vector<NamedRange> ranges_;       // sorted by name
    std::vector<SceneDescription> scenes_; // sorted by name
    std::vector<MetaLink> meta_;           // sorted by (corner_case_id, cause)
};

// Adds the classification/source/fusion backbone classes plus one cause class
// per (spec, cause), linked to its meta information and scene description.
// Idempotent; never removes or rewrites what is already present.
CornerCaseOntology inject_meta_classes(const CornerCaseOntology& ontology,
                                       const std::vector<CornerCaseSpec>& specs);

// Deterministic class name for a cause, e.g. "CC1_light_of_oncoming_traffic_at_night".
std::string cause_class_name(int corner_case_id, const std::string& cause);

nlohmann::json predicate_to_json(const Predicate& predicate);
Predicate predicate_from_json(const nlohmann::json& value);

} // namespace cornerforge
