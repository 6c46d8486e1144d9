#include "cornerforge/ontology.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <tuple>

#include "cornerforge/error.hpp"

namespace cornerforge {

namespace {

constexpr double kPi = 3.14159265358979323846;

const nlohmann::json& require_field(const nlohmann::json& object, const char* key,
                                    const std::string& context) {
    const auto it = object.find(key);
    if (it == object.end()) {
        throw Error::validation("Malformed", context + ": missing field '" + key + "'");
    }
    return *it;
}

std::string require_string(const nlohmann::json& object, const char* key, const std::string& context) {
    const nlohmann::json& value = require_field(object, key, context);
    if (!value.is_string()) {
        throw Error::validation("Malformed", context + ": field '" + key + "' must be a string");
    }
    return value.get<std::string>();
}

double require_number(const nlohmann::json& object, const char* key, const std::string& context) {
    const nlohmann::json& value = require_field(object, key, context);
    if (!value.is_number()) {
        throw Error::validation("Malformed", context + ": field '" + key + "' must be a number");
    }
    return value.get<double>();
}

int require_positive_int(const nlohmann::json& object, const char* key, const std::string& context) {
    const nlohmann::json& value = require_field(object, key, context);
    if (!value.is_number_integer() || value.get<int>() <= 0) {
        throw Error::validation("Malformed", context + ": field '" + key + "' must be a positive integer");
    }
    return value.get<int>();
}

} // namespace

std::string to_string(Unit unit) {
    switch (unit) {
    case Unit::KmPerHour: return "km/h";
    case Unit::MetersPerSecond: return "m/s";
    case Unit::Count: return "count";
    case Unit::Radians: return "rad";
    case Unit::Unitless: return "unitless";
    }
    return "?";
}

Unit parse_unit(std::string_view text) {
    if (text == "km/h") return Unit::KmPerHour;
    if (text == "m/s") return Unit::MetersPerSecond;
    if (text == "count") return Unit::Count;
    if (text == "rad") return Unit::Radians;
    if (text == "unitless") return Unit::Unitless;
    throw Error::validation("MalformedRange", "unknown unit '" + std::string(text) + "'");
}

Unit base_unit(Unit unit) {
    return unit == Unit::KmPerHour ? Unit::MetersPerSecond : unit;
}

double to_base_value(double value, Unit unit) {
    return unit == Unit::KmPerHour ? value / 3.6 : value;
}

namespace {

Filter filter_from_json(const nlohmann::json& value, const std::string& context) {
    const std::string kind = require_string(value, "kind", context);
    if (kind == "attribute_range") {
        AttributeRangeFilter filter{require_string(value, "attribute", context),
                                    require_number(value, "min", context),
                                    require_number(value, "max", context),
                                    parse_unit(require_string(value, "unit", context))};
        if (filter.min > filter.max) {
            throw Error::validation("MalformedRange", context + ": filter min exceeds max");
        }
        return filter;
    }
    if (kind == "relative_heading") {
        RelativeHeadingFilter filter{require_number(value, "max_abs_delta", context)};
        if (filter.max_abs_delta < 0.0 || filter.max_abs_delta > kPi) {
            throw Error::validation("MalformedRange",
                                    context + ": max_abs_delta must lie in [0, pi]");
        }
        return filter;
    }
    throw Error::validation("Malformed", context + ": unknown filter kind '" + kind + "'");
}

nlohmann::json filter_to_json(const Filter& filter) {
    nlohmann::json out;
    if (const auto* range = std::get_if<AttributeRangeFilter>(&filter)) {
        out["kind"] = "attribute_range";
        out["attribute"] = range->attribute;
        out["min"] = range->min;
        out["max"] = range->max;
        out["unit"] = to_string(range->unit);
    } else {
        const auto& heading = std::get<RelativeHeadingFilter>(filter);
        out["kind"] = "relative_heading";
        out["max_abs_delta"] = heading.max_abs_delta;
    }
    return out;
}

} // namespace

Predicate predicate_from_json(const nlohmann::json& value) {
    const std::string context = "predicate";
    const std::string kind = require_string(value, "kind", context);
    if (kind == "class_presence") {
        ClassPresencePredicate predicate{require_string(value, "class", context), 1};
        if (value.contains("min_count")) {
            predicate.min_count = require_positive_int(value, "min_count", context);
        }
        return predicate;
    }
    if (kind == "count_with_filter") {
        CountWithFilterPredicate predicate;
        predicate.class_name = require_string(value, "class", context);
        predicate.min_count = require_positive_int(value, "min_count", context);
        if (value.contains("max_count") && !value["max_count"].is_null()) {
            predicate.max_count = require_positive_int(value, "max_count", context);
            if (*predicate.max_count < predicate.min_count) {
                throw Error::validation("MalformedRange", context + ": max_count below min_count");
            }
        }
        if (value.contains("filters")) {
            const nlohmann::json& filters = value["filters"];
            if (!filters.is_array()) {
                throw Error::validation("Malformed", context + ": filters must be an array");
            }
            for (const nlohmann::json& filter : filters) {
                predicate.filters.push_back(filter_from_json(filter, context));
            }
        }
        return predicate;
    }
    if (kind == "ego_attribute_range") {
        EgoAttributeRangePredicate predicate;
        if (value.contains("range")) {
            predicate.range_name = require_string(value, "range", context);
            // A bare name is resolved against the named range by the loader;
            // compiled metrics carry the name and the resolved values.
            if (!value.contains("attribute")) return predicate;
        }
        predicate.attribute = require_string(value, "attribute", context);
        predicate.min = require_number(value, "min", context);
        predicate.max = require_number(value, "max", context);
        predicate.unit = parse_unit(require_string(value, "unit", context));
        if (predicate.min > predicate.max) {
            throw Error::validation("MalformedRange", context + ": min exceeds max");
        }
        return predicate;
    }
    if (kind == "scene_text_keyword") {
        SceneTextKeywordPredicate predicate;
        const nlohmann::json& keywords = require_field(value, "keywords", context);
        if (!keywords.is_array() || keywords.empty()) {
            throw Error::validation("Malformed", context + ": keywords must be a non-empty array");
        }
        for (const nlohmann::json& keyword : keywords) {
            if (!keyword.is_string() || keyword.get<std::string>().empty()) {
                throw Error::validation("Malformed", context + ": keywords must be non-empty strings");
            }
            const std::string text = keyword.get<std::string>();
            if (std::any_of(text.begin(), text.end(),
                            [](unsigned char c) { return std::isupper(c); })) {
                throw Error::validation("Malformed",
                                        context + ": keyword '" + text + "' must be lowercase");
            }
            predicate.keywords.push_back(text);
        }
        const nlohmann::json& dist = require_field(value, "max_edit_distance", context);
        if (!dist.is_number_integer() || dist.get<int>() < 0) {
            throw Error::validation("Malformed", context + ": max_edit_distance must be >= 0");
        }
        predicate.max_edit_distance = dist.get<int>();
        return predicate;
    }
    throw Error::validation("Malformed", context + ": unknown predicate kind '" + kind + "'");
}

nlohmann::json predicate_to_json(const Predicate& predicate) {
    nlohmann::json out;
    if (const auto* presence = std::get_if<ClassPresencePredicate>(&predicate)) {
        out["kind"] = "class_presence";
        out["class"] = presence->class_name;
        out["min_count"] = presence->min_count;
    } else if (const auto* count = std::get_if<CountWithFilterPredicate>(&predicate)) {
        out["kind"] = "count_with_filter";
        out["class"] = count->class_name;
        out["min_count"] = count->min_count;
        if (count->max_count.has_value()) out["max_count"] = *count->max_count;
        out["filters"] = nlohmann::json::array();
        for (const Filter& filter : count->filters) out["filters"].push_back(filter_to_json(filter));
    } else if (const auto* ego = std::get_if<EgoAttributeRangePredicate>(&predicate)) {
        out["kind"] = "ego_attribute_range";
        if (ego->range_name.has_value() && ego->attribute.empty()) {
            out["range"] = *ego->range_name;
        } else {
            if (ego->range_name.has_value()) out["range"] = *ego->range_name;
            out["attribute"] = ego->attribute;
            out["min"] = ego->min;
            out["max"] = ego->max;
            out["unit"] = to_string(ego->unit);
        }
    } else {
        const auto& keyword = std::get<SceneTextKeywordPredicate>(predicate);
        out["kind"] = "scene_text_keyword";
        out["keywords"] = keyword.keywords;
        out["max_edit_distance"] = keyword.max_edit_distance;
    }
    return out;
}

namespace {

std::set<Classification> classifications_from_json(const nlohmann::json& value,
                                                   const std::string& context) {
    if (!value.is_array() || value.empty()) {
        throw Error::validation("Malformed", context + ": classifications must be a non-empty array");
    }
    std::set<Classification> out;
    for (const nlohmann::json& entry : value) {
        if (!entry.is_string()) {
            throw Error::validation("Malformed", context + ": classification entries must be strings");
        }
        const std::string text = entry.get<std::string>();
        const std::size_t slash = text.find('/');
        if (slash == std::string::npos) {
            throw Error::validation("Malformed",
                                    context + ": classification '" + text + "' must be 'Layer/Level'");
        }
        out.insert(parse_classification(text.substr(0, slash), text.substr(slash + 1)));
    }
    return out;
}

nlohmann::json classifications_to_json(const std::set<Classification>& classifications) {
    nlohmann::json out = nlohmann::json::array();
    for (const Classification& classification : classifications) {
        out.push_back(classification.to_string());
    }
    return out;
}

// Meta classes every classification/source/fusion value maps onto.
struct BackboneClass {
    const char* name;
    const char* parent; // nullptr for the root
};

constexpr BackboneClass kBackbone[] = {
    {"CornerCaseMeta", nullptr},
    {"CornerCaseCause", "CornerCaseMeta"},
    {"CornerCaseClassification", "CornerCaseMeta"},
    {"SensorLayer", "CornerCaseClassification"},
    {"ContentLayer", "CornerCaseClassification"},
    {"PhysicalLevel", "SensorLayer"},
    {"HardwareLevel", "SensorLayer"},
    {"DomainLevel", "ContentLayer"},
    {"ObjectLevel", "ContentLayer"},
    {"SceneLevel", "ContentLayer"},
    {"SubLevel", "CornerCaseClassification"},
    {"GlobalOutlier", "SubLevel"},
    {"LocalOutlier", "SubLevel"},
    {"Collective", "SubLevel"},
    {"Contextual", "SubLevel"},
    {"SensorSource", "CornerCaseMeta"},
    {"Radar", "SensorSource"},
    {"Video", "SensorSource"},
    {"Lidar", "SensorSource"},
    {"FusionOption", "CornerCaseMeta"},
    {"SingleSource", "FusionOption"},
    {"MultiSource", "FusionOption"},
};

std::string layer_meta_class(Layer layer) {
    return layer == Layer::Sensor ? "SensorLayer" : "ContentLayer";
}

std::string level_meta_class(Level level) {
    return to_string(level) + "Level";
}

std::string sublevel_meta_class(SubLevel sublevel) {
    switch (sublevel) {
    case SubLevel::GlobalOutlier: return "GlobalOutlier";
    case SubLevel::LocalOutlier: return "LocalOutlier";
    case SubLevel::Collective: return "Collective";
    case SubLevel::Contextual: return "Contextual";
    }
    return "?";
}

std::string source_meta_class(SensorSource source) {
    switch (source) {
    case SensorSource::Radar: return "Radar";
    case SensorSource::Video: return "Video";
    case SensorSource::Lidar: return "Lidar";
    }
    return "?";
}

std::string fusion_meta_class(FusionStage fusion) {
    return fusion == FusionStage::Single ? "SingleSource" : "MultiSource";
}

} // namespace

CornerCaseOntology CornerCaseOntology::load(const nlohmann::json& document) {
    if (!document.is_object()) {
        throw Error::validation("Malformed", "ontology document must be a JSON object");
    }
    const std::string version = require_string(document, "version", "ontology");
    if (version != "1") {
        throw Error::validation("VersionMismatch", "unsupported ontology version '" + version + "'");
    }

    CornerCaseOntology ontology;
    for (const nlohmann::json& entry : require_field(document, "classes", "ontology")) {
        OntologyClass cls{require_string(entry, "name", "class"), std::nullopt};
        if (entry.contains("parent") && !entry["parent"].is_null()) {
            cls.parent = require_string(entry, "parent", "class");
        }
        ontology.classes_.push_back(std::move(cls));
    }
    if (document.contains("ranges")) {
        for (const nlohmann::json& entry : document["ranges"]) {
            NamedRange range{require_string(entry, "name", "range"),
                             require_string(entry, "attribute", "range"),
                             require_number(entry, "min", "range"),
                             require_number(entry, "max", "range"),
                             parse_unit(require_string(entry, "unit", "range"))};
            ontology.ranges_.push_back(std::move(range));
        }
    }
    if (document.contains("scenes")) {
        for (const nlohmann::json& entry : document["scenes"]) {
            SceneDescription scene;
            scene.name = require_string(entry, "name", "scene");
            const nlohmann::json& predicates = require_field(entry, "predicates", "scene " + scene.name);
            if (!predicates.is_array() || predicates.empty()) {
                throw Error::validation("Malformed",
                                        "scene " + scene.name + ": predicates must be a non-empty array");
            }
            for (const nlohmann::json& predicate : predicates) {
                scene.predicates.push_back(predicate_from_json(predicate));
            }
            ontology.scenes_.push_back(std::move(scene));
        }
    }
    if (document.contains("meta")) {
        for (const nlohmann::json& entry : document["meta"]) {
            MetaLink link;
            link.cause_class = require_string(entry, "cause_class", "meta");
            link.corner_case_id = require_positive_int(entry, "corner_case_id", "meta");
            link.cause = require_string(entry, "cause", "meta");
            link.classifications =
                classifications_from_json(require_field(entry, "classifications", "meta"), "meta");
            link.sources = SensorSources::parse(require_string(entry, "sources", "meta"));
            link.fusion = parse_fusion(require_string(entry, "fusion", "meta"));
            if (entry.contains("scene") && !entry["scene"].is_null()) {
                link.scene = require_string(entry, "scene", "meta");
            }
            ontology.meta_.push_back(std::move(link));
        }
    }

    std::sort(ontology.classes_.begin(), ontology.classes_.end(),
              [](const OntologyClass& a, const OntologyClass& b) { return a.name < b.name; });
    std::sort(ontology.ranges_.begin(), ontology.ranges_.end(),
              [](const NamedRange& a, const NamedRange& b) { return a.name < b.name; });
    std::sort(ontology.scenes_.begin(), ontology.scenes_.end(),
              [](const SceneDescription& a, const SceneDescription& b) { return a.name < b.name; });
    std::sort(ontology.meta_.begin(), ontology.meta_.end(), [](const MetaLink& a, const MetaLink& b) {
        return std::tie(a.corner_case_id, a.cause) < std::tie(b.corner_case_id, b.cause);
    });

    // Resolve named ranges inside ego predicates before validating.
    for (SceneDescription& scene : ontology.scenes_) {
        for (Predicate& predicate : scene.predicates) {
            auto* ego = std::get_if<EgoAttributeRangePredicate>(&predicate);
            if (ego == nullptr || !ego->range_name.has_value()) continue;
            const NamedRange* range = ontology.find_range(*ego->range_name);
            if (range == nullptr) {
                throw Error::validation("DanglingReference",
                                        "scene " + scene.name + ": unknown range '" + *ego->range_name + "'");
            }
            ego->attribute = range->attribute;
            ego->min = range->min;
            ego->max = range->max;
            ego->unit = range->unit;
        }
    }

    ontology.validate();
    return ontology;
}

void CornerCaseOntology::validate() const {
    std::map<std::string, const OntologyClass*> by_name;
    for (const OntologyClass& cls : classes_) {
        if (cls.name.empty()) {
            throw Error::validation("Malformed", "ontology class with empty name");
        }
        if (!by_name.emplace(cls.name, &cls).second) {
            throw Error::validation("DuplicateId", "ontology class '" + cls.name + "' defined twice");
        }
    }
    for (const OntologyClass& cls : classes_) {
        if (cls.parent.has_value() && by_name.find(*cls.parent) == by_name.end()) {
            throw Error::validation("DanglingReference",
                                    "class '" + cls.name + "' references unknown parent '" + *cls.parent + "'");
        }
    }
    // Walk parent chains; a chain longer than the class count means a cycle.
    for (const OntologyClass& cls : classes_) {
        const OntologyClass* current = &cls;
        std::size_t steps = 0;
        while (current->parent.has_value()) {
            if (++steps > classes_.size()) {
                throw Error::validation("CyclicSubclass",
                                        "subclass cycle through '" + cls.name + "'");
            }
            current = by_name.at(*current->parent);
        }
    }

    std::set<std::string> range_names;
    for (const NamedRange& range : ranges_) {
        if (!range_names.insert(range.name).second) {
            throw Error::validation("DuplicateId", "range '" + range.name + "' defined twice");
        }
        if (!(range.min <= range.max)) {
            throw Error::validation("MalformedRange", "range '" + range.name + "': min exceeds max");
        }
        if (!std::isfinite(range.min) || !std::isfinite(range.max)) {
            throw Error::validation("MalformedRange", "range '" + range.name + "': bounds must be finite");
        }
    }

    std::set<std::string> scene_names;
    for (const SceneDescription& scene : scenes_) {
        if (!scene_names.insert(scene.name).second) {
            throw Error::validation("DuplicateId", "scene '" + scene.name + "' defined twice");
        }
        for (const Predicate& predicate : scene.predicates) {
            const std::string* class_ref = nullptr;
            if (const auto* presence = std::get_if<ClassPresencePredicate>(&predicate)) {
                class_ref = &presence->class_name;
            } else if (const auto* count = std::get_if<CountWithFilterPredicate>(&predicate)) {
                class_ref = &count->class_name;
            }
            if (class_ref != nullptr && by_name.find(*class_ref) == by_name.end()) {
                throw Error::validation("DanglingReference",
                                        "scene " + scene.name + ": unknown class '" + *class_ref + "'");
            }
        }
    }

    std::set<std::pair<int, std::string>> meta_keys;
    for (const MetaLink& link : meta_) {
        if (!meta_keys.emplace(link.corner_case_id, link.cause).second) {
            throw Error::validation("DuplicateId",
                                    "meta link for corner case " + std::to_string(link.corner_case_id) +
                                        " cause '" + link.cause + "' defined twice");
        }
        if (by_name.find(link.cause_class) == by_name.end()) {
            throw Error::validation("DanglingReference",
                                    "meta link references unknown cause class '" + link.cause_class + "'");
        }
        if (link.scene.has_value() && !scene_names.contains(*link.scene)) {
            throw Error::validation("UnresolvedSceneRef",
                                    "meta link references unknown scene '" + *link.scene + "'");
        }
        for (const Classification& classification : link.classifications) {
            std::vector<std::string> required{layer_meta_class(classification.layer()),
                                              level_meta_class(classification.level())};
            if (classification.sublevel().has_value()) {
                required.push_back(sublevel_meta_class(*classification.sublevel()));
            }
            for (const std::string& name : required) {
                if (by_name.find(name) == by_name.end()) {
                    throw Error::validation("DanglingReference",
                                            "meta link requires missing taxonomy class '" + name + "'");
                }
            }
        }
        for (SensorSource source : {SensorSource::Radar, SensorSource::Video, SensorSource::Lidar}) {
            if (link.sources.contains(source) &&
                by_name.find(source_meta_class(source)) == by_name.end()) {
                throw Error::validation("DanglingReference",
                                        "meta link requires missing taxonomy class '" +
                                            source_meta_class(source) + "'");
            }
        }
        if (by_name.find(fusion_meta_class(link.fusion)) == by_name.end()) {
            throw Error::validation("DanglingReference", "meta link requires missing taxonomy class '" +
                                                             fusion_meta_class(link.fusion) + "'");
        }
    }
}

nlohmann::json CornerCaseOntology::to_json() const {
    nlohmann::json document;
    document["version"] = "1";
    document["classes"] = nlohmann::json::array();
    for (const OntologyClass& cls : classes_) {
        nlohmann::json entry;
        entry["name"] = cls.name;
        if (cls.parent.has_value()) entry["parent"] = *cls.parent;
        document["classes"].push_back(std::move(entry));
    }
    document["ranges"] = nlohmann::json::array();
    for (const NamedRange& range : ranges_) {
        nlohmann::json entry;
        entry["name"] = range.name;
        entry["attribute"] = range.attribute;
        entry["min"] = range.min;
        entry["max"] = range.max;
        entry["unit"] = to_string(range.unit);
        document["ranges"].push_back(std::move(entry));
    }
    document["scenes"] = nlohmann::json::array();
    for (const SceneDescription& scene : scenes_) {
        nlohmann::json entry;
        entry["name"] = scene.name;
        entry["predicates"] = nlohmann::json::array();
        for (const Predicate& predicate : scene.predicates) {
            entry["predicates"].push_back(predicate_to_json(predicate));
        }
        document["scenes"].push_back(std::move(entry));
    }
    document["meta"] = nlohmann::json::array();
    for (const MetaLink& link : meta_) {
        nlohmann::json entry;
        entry["cause_class"] = link.cause_class;
        entry["corner_case_id"] = link.corner_case_id;
        entry["cause"] = link.cause;
        entry["classifications"] = classifications_to_json(link.classifications);
        entry["sources"] = link.sources.to_string();
        entry["fusion"] = to_string(link.fusion);
        if (link.scene.has_value()) entry["scene"] = *link.scene;
        document["meta"].push_back(std::move(entry));
    }
    return document;
}

bool CornerCaseOntology::has_class(const std::string& name) const {
    return std::any_of(classes_.begin(), classes_.end(),
                       [&](const OntologyClass& cls) { return cls.name == name; });
}

const NamedRange* CornerCaseOntology::find_range(const std::string& name) const {
    const auto it = std::find_if(ranges_.begin(), ranges_.end(),
                                 [&](const NamedRange& range) { return range.name == name; });
    return it == ranges_.end() ? nullptr : &*it;
}

const SceneDescription* CornerCaseOntology::find_scene(const std::string& name) const {
    const auto it = std::find_if(scenes_.begin(), scenes_.end(),
                                 [&](const SceneDescription& scene) { return scene.name == name; });
    return it == scenes_.end() ? nullptr : &*it;
}

std::set<std::string> CornerCaseOntology::descendants(const std::string& class_name) const {
    if (!has_class(class_name)) {
        throw Error::validation("UnknownClass", "unknown ontology class '" + class_name + "'");
    }
    std::multimap<std::string, std::string> children;
    for (const OntologyClass& cls : classes_) {
        if (cls.parent.has_value()) children.emplace(*cls.parent, cls.name);
    }
    std::set<std::string> closure{class_name};
    std::vector<std::string> frontier{class_name};
    while (!frontier.empty()) {
        const std::string current = std::move(frontier.back());
        frontier.pop_back();
        const auto [begin, end] = children.equal_range(current);
        for (auto it = begin; it != end; ++it) {
            if (closure.insert(it->second).second) frontier.push_back(it->second);
        }
    }
    return closure;
}

std::string cause_class_name(int corner_case_id, const std::string& cause) {
    std::string slug;
    for (char raw : cause) {
        const auto c = static_cast<unsigned char>(raw);
        slug += std::isalnum(c) ? static_cast<char>(std::tolower(c)) : '_';
    }
    return "CC" + std::to_string(corner_case_id) + "_" + slug;
}

CornerCaseOntology inject_meta_classes(const CornerCaseOntology& ontology,
                                       const std::vector<CornerCaseSpec>& specs) {
    CornerCaseOntology enriched = ontology;

    std::map<std::string, std::optional<std::string>> existing;
    for (const OntologyClass& cls : enriched.classes_) existing.emplace(cls.name, cls.parent);

    auto add_class = [&](const std::string& name, std::optional<std::string> parent) {
        const auto it = existing.find(name);
        if (it != existing.end()) {
            if (it->second != parent) {
                throw Error::validation("ConflictingMeta",
                                        "class '" + name + "' already exists with a different parent");
            }
            return;
        }
        enriched.classes_.push_back({name, parent});
        existing.emplace(name, std::move(parent));
    };

    for (const BackboneClass& cls : kBackbone) {
        add_class(cls.name, cls.parent == nullptr ? std::nullopt
                                                  : std::optional<std::string>(cls.parent));
    }

    for (const CornerCaseSpec& spec : specs) {
        for (const Cause& cause : spec.causes) {
            if (cause.scene_ref.has_value() && enriched.find_scene(*cause.scene_ref) == nullptr) {
                throw Error::validation("UnresolvedSceneRef",
                                        "corner case " + std::to_string(spec.id) + " cause '" + cause.text +
                                            "': scene_ref '" + *cause.scene_ref + "' names no scene");
            }
            add_class(cause_class_name(spec.id, cause.text), "CornerCaseCause");

            MetaLink link{cause_class_name(spec.id, cause.text),
                          spec.id,
                          cause.text,
                          spec.classifications,
                          spec.sources,
                          spec.fusion,
                          cause.scene_ref};
            const auto it = std::find_if(enriched.meta_.begin(), enriched.meta_.end(),
                                         [&](const MetaLink& other) {
                                             return other.corner_case_id == link.corner_case_id &&
                                                    other.cause == link.cause;
                                         });
            if (it == enriched.meta_.end()) {
                enriched.meta_.push_back(std::move(link));
            } else if (*it != link) {
                throw Error::validation("ConflictingMeta",
                                        "corner case " + std::to_string(spec.id) + " cause '" + cause.text +
                                            "' already linked with different meta information");
            }
        }
    }

    std::sort(enriched.classes_.begin(), enriched.classes_.end(),
              [](const OntologyClass& a, const OntologyClass& b) { return a.name < b.name; });
    std::sort(enriched.meta_.begin(), enriched.meta_.end(), [](const MetaLink& a, const MetaLink& b) {
        return std::tie(a.corner_case_id, a.cause) < std::tie(b.corner_case_id, b.cause);
    });
    enriched.validate();
    return enriched;
}

} // namespace cornerforge
