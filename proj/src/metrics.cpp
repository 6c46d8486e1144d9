#include "cornerforge/metrics.hpp"

#include <algorithm>
#include <tuple>

#include "cornerforge/error.hpp"
#include "cornerforge/log.hpp"

namespace cornerforge {

std::string to_string(HitMode mode) {
    return mode == HitMode::AnnotationTargeted ? "annotation_targeted" : "scene_wide";
}

HitMode parse_hit_mode(std::string_view text) {
    if (text == "annotation_targeted") return HitMode::AnnotationTargeted;
    if (text == "scene_wide") return HitMode::SceneWide;
    throw Error::validation("Malformed", "unknown hit mode '" + std::string(text) + "'");
}

namespace {

bool has_class_presence(const std::vector<Predicate>& predicates) {
    return std::any_of(predicates.begin(), predicates.end(), [](const Predicate& predicate) {
        return std::holds_alternative<ClassPresencePredicate>(predicate);
    });
}

void apply_override(std::vector<Predicate>& predicates, const RangeOverride& range,
                    int corner_case_id, const std::string& cause) {
    const Unit unit = parse_unit(range.unit);
    bool applied = false;
    for (Predicate& predicate : predicates) {
        auto* ego = std::get_if<EgoAttributeRangePredicate>(&predicate);
        if (ego == nullptr || ego->attribute != range.attribute) continue;
        if (base_unit(unit) != base_unit(ego->unit)) {
            throw Error::validation("UnitMismatch",
                                    "corner case " + std::to_string(corner_case_id) + " cause '" + cause +
                                        "': override unit '" + range.unit + "' is incompatible with range unit '" +
                                        to_string(ego->unit) + "'");
        }
        ego->min = range.min;
        ego->max = range.max;
        ego->unit = unit;
        applied = true;
    }
    if (!applied) {
        throw Error::validation("InvalidOverride",
                                "corner case " + std::to_string(corner_case_id) + " cause '" + cause +
                                    "': override attribute '" + range.attribute +
                                    "' matches no range predicate in the scene");
    }
}

void convert_to_base_units(std::vector<Predicate>& predicates) {
    for (Predicate& predicate : predicates) {
        if (auto* ego = std::get_if<EgoAttributeRangePredicate>(&predicate)) {
            ego->min = to_base_value(ego->min, ego->unit);
            ego->max = to_base_value(ego->max, ego->unit);
            ego->unit = base_unit(ego->unit);
        } else if (auto* count = std::get_if<CountWithFilterPredicate>(&predicate)) {
            for (Filter& filter : count->filters) {
                if (auto* range = std::get_if<AttributeRangeFilter>(&filter)) {
                    range->min = to_base_value(range->min, range->unit);
                    range->max = to_base_value(range->max, range->unit);
                    range->unit = base_unit(range->unit);
                }
            }
        }
    }
}

} // namespace

MetricsFile compile(const CornerCaseOntology& ontology, const std::vector<CornerCaseSpec>& specs) {
    MetricsFile file;
    for (const CornerCaseSpec& spec : specs) {
        for (const Cause& cause : spec.causes) {
            if (!cause.scene_ref.has_value()) {
                log::info("corner case " + std::to_string(spec.id) + " cause '" + cause.text +
                          "' has no scene description; skipped");
                continue;
            }
            const SceneDescription* scene = ontology.find_scene(*cause.scene_ref);
            if (scene == nullptr) {
                throw Error::validation("UnresolvedSceneRef",
                                        "corner case " + std::to_string(spec.id) + " cause '" + cause.text +
                                            "': scene_ref '" + *cause.scene_ref + "' names no scene");
            }
            CompiledMetric metric;
            metric.corner_case_id = spec.id;
            metric.cause_text = cause.text;
            metric.classifications = spec.classifications;
            metric.sources = spec.sources;
            metric.fusion = spec.fusion;
            metric.predicates = scene->predicates;
            if (cause.override_range.has_value()) {
                apply_override(metric.predicates, *cause.override_range, spec.id, cause.text);
            }
            convert_to_base_units(metric.predicates);
            metric.hit_mode = has_class_presence(metric.predicates) ? HitMode::AnnotationTargeted
                                                                    : HitMode::SceneWide;
            file.metrics.push_back(std::move(metric));
        }
    }
    std::sort(file.metrics.begin(), file.metrics.end(),
              [](const CompiledMetric& a, const CompiledMetric& b) {
                  return std::tie(a.corner_case_id, a.cause_text) <
                         std::tie(b.corner_case_id, b.cause_text);
              });
    return file;
}

nlohmann::json metrics_to_json(const MetricsFile& file) {
    nlohmann::json document;
    document["version"] = file.version;
    document["metrics"] = nlohmann::json::array();
    for (const CompiledMetric& metric : file.metrics) {
        nlohmann::json entry;
        entry["corner_case_id"] = metric.corner_case_id;
        entry["cause"] = metric.cause_text;
        entry["classifications"] = nlohmann::json::array();
        for (const Classification& classification : metric.classifications) {
            entry["classifications"].push_back(classification.to_string());
        }
        entry["sources"] = metric.sources.to_string();
        entry["fusion"] = to_string(metric.fusion);
        entry["hit_mode"] = to_string(metric.hit_mode);
        entry["predicates"] = nlohmann::json::array();
        for (const Predicate& predicate : metric.predicates) {
            entry["predicates"].push_back(predicate_to_json(predicate));
        }
        document["metrics"].push_back(std::move(entry));
    }
    return document;
}

MetricsFile metrics_from_json(const nlohmann::json& document) {
    if (!document.is_object() || !document.contains("version") || !document["version"].is_string()) {
        throw Error::validation("Malformed", "metrics document must carry a string version");
    }
    MetricsFile file;
    file.version = document["version"].get<std::string>();
    if (file.version != "1") {
        throw Error::validation("VersionMismatch", "unsupported metrics version '" + file.version + "'");
    }
    if (!document.contains("metrics") || !document["metrics"].is_array()) {
        throw Error::validation("Malformed", "metrics document must carry a metrics array");
    }
    std::set<std::pair<int, std::string>> seen;
    for (const nlohmann::json& entry : document["metrics"]) {
        CompiledMetric metric;
        if (!entry.contains("corner_case_id") || !entry["corner_case_id"].is_number_integer()) {
            throw Error::validation("Malformed", "metric entry missing integer corner_case_id");
        }
        metric.corner_case_id = entry["corner_case_id"].get<int>();
        if (!entry.contains("cause") || !entry["cause"].is_string()) {
            throw Error::validation("Malformed", "metric entry missing cause");
        }
        metric.cause_text = entry["cause"].get<std::string>();
        if (!seen.emplace(metric.corner_case_id, metric.cause_text).second) {
            throw Error::validation("DuplicateId",
                                    "duplicate metric for corner case " +
                                        std::to_string(metric.corner_case_id) + " cause '" +
                                        metric.cause_text + "'");
        }
        if (!entry.contains("classifications") || !entry["classifications"].is_array() ||
            entry["classifications"].empty()) {
            throw Error::validation("Malformed", "metric entry missing classifications");
        }
        for (const nlohmann::json& text : entry["classifications"]) {
            const std::string value = text.get<std::string>();
            const std::size_t slash = value.find('/');
            if (slash == std::string::npos) {
                throw Error::validation("Malformed", "classification '" + value + "' must be 'Layer/Level'");
            }
            metric.classifications.insert(
                parse_classification(value.substr(0, slash), value.substr(slash + 1)));
        }
        if (!entry.contains("sources") || !entry["sources"].is_string()) {
            throw Error::validation("Malformed", "metric entry missing sources");
        }
        metric.sources = SensorSources::parse(entry["sources"].get<std::string>());
        if (!entry.contains("fusion") || !entry["fusion"].is_string()) {
            throw Error::validation("Malformed", "metric entry missing fusion");
        }
        metric.fusion = parse_fusion(entry["fusion"].get<std::string>());
        if (!entry.contains("predicates") || !entry["predicates"].is_array() ||
            entry["predicates"].empty()) {
            throw Error::validation("Malformed", "metric entry must carry a non-empty predicates array");
        }
        for (const nlohmann::json& predicate : entry["predicates"]) {
            metric.predicates.push_back(predicate_from_json(predicate));
        }
        if (!entry.contains("hit_mode") || !entry["hit_mode"].is_string()) {
            throw Error::validation("Malformed", "metric entry missing hit_mode");
        }
        metric.hit_mode = parse_hit_mode(entry["hit_mode"].get<std::string>());
        const HitMode expected = has_class_presence(metric.predicates) ? HitMode::AnnotationTargeted
                                                                       : HitMode::SceneWide;
        if (metric.hit_mode != expected) {
            throw Error::validation("Malformed",
                                    "metric for corner case " + std::to_string(metric.corner_case_id) +
                                        " cause '" + metric.cause_text +
                                        "': hit_mode contradicts its predicates");
        }
        file.metrics.push_back(std::move(metric));
    }
    return file;
}

std::set<std::string> required_classes(const MetricsFile& file) {
    std::set<std::string> classes;
    for (const CompiledMetric& metric : file.metrics) {
        for (const Predicate& predicate : metric.predicates) {
            if (const auto* presence = std::get_if<ClassPresencePredicate>(&predicate)) {
                classes.insert(presence->class_name);
            } else if (const auto* count = std::get_if<CountWithFilterPredicate>(&predicate)) {
                classes.insert(count->class_name);
            }
        }
    }
    return classes;
}

} // namespace cornerforge
