#include "cornerforge/extraction.hpp"

#include <algorithm>
#include <cmath>
#include <thread>
#include <tuple>

#include "cornerforge/error.hpp"
#include "cornerforge/textsearch.hpp"

namespace cornerforge {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Wrap an angle difference into (-pi, pi].
double wrap_angle(double delta) {
    delta = std::fmod(delta, 2.0 * kPi);
    if (delta <= -kPi) delta += 2.0 * kPi;
    if (delta > kPi) delta -= 2.0 * kPi;
    return delta;
}

double ego_attribute(const Sample& sample, const std::string& attribute) {
    if (attribute == "speed") return sample.ego.speed;
    if (attribute == "heading") return sample.ego.heading;
    throw Error::validation("MissingAttribute",
                            "sample " + sample.id + " has no ego attribute '" + attribute + "'");
}

double annotation_attribute(const Annotation& annotation, const std::string& attribute) {
    const auto it = annotation.attributes.find(attribute);
    if (it == annotation.attributes.end()) {
        throw Error::validation("MissingAttribute", "annotation " + annotation.id +
                                                        " has no attribute '" + attribute + "'");
    }
    try {
        std::size_t consumed = 0;
        const double value = std::stod(it->second, &consumed);
        if (consumed != it->second.size()) throw std::invalid_argument(it->second);
        return value;
    } catch (const std::exception&) {
        throw Error::validation("Malformed", "annotation " + annotation.id + " attribute '" + attribute +
                                                 "' is not numeric: '" + it->second + "'");
    }
}

bool filter_passes(const Filter& filter, const Annotation& annotation, const Sample& sample,
                   const LabelMapping& mapping) {
    if (const auto* range = std::get_if<AttributeRangeFilter>(&filter)) {
        const double value = annotation_attribute(annotation, mapping.resolve_attribute(range->attribute));
        return range->min <= value && value <= range->max;
    }
    const auto& heading = std::get<RelativeHeadingFilter>(filter);
    return std::abs(wrap_angle(annotation.heading - sample.ego.heading)) <= heading.max_abs_delta;
}

bool keywords_hold(const SceneTextKeywordPredicate& predicate, const TokenStream& tokens) {
    return std::all_of(predicate.keywords.begin(), predicate.keywords.end(),
                       [&](const std::string& keyword) {
                           return keyword_match(tokens, keyword, predicate.max_edit_distance);
                       });
}

} // namespace

PredicateOutcome evaluate_predicate(const Predicate& predicate, const Sample& sample,
                                    const Scene& scene, const DatasetIndex& dataset,
                                    const LabelMapping& mapping) {
    PredicateOutcome outcome;
    if (const auto* keyword = std::get_if<SceneTextKeywordPredicate>(&predicate)) {
        outcome.matched = keywords_hold(*keyword, tokenize(scene.description_text));
        return outcome;
    }
    if (const auto* ego = std::get_if<EgoAttributeRangePredicate>(&predicate)) {
        const double value = ego_attribute(sample, mapping.resolve_attribute(ego->attribute));
        outcome.matched = ego->min <= value && value <= ego->max;
        return outcome;
    }
    if (const auto* count = std::get_if<CountWithFilterPredicate>(&predicate)) {
        const std::set<std::string>& labels = mapping.query_labels(count->class_name);
        int matching = 0;
        for (std::size_t index : dataset.annotations_of(sample.id)) {
            const Annotation& annotation = dataset.annotations()[index];
            if (!labels.contains(annotation.label)) continue;
            const bool passes = std::all_of(count->filters.begin(), count->filters.end(),
                                            [&](const Filter& filter) {
                                                return filter_passes(filter, annotation, sample, mapping);
                                            });
            if (passes) ++matching;
        }
        outcome.matched = matching >= count->min_count &&
                          (!count->max_count.has_value() || matching <= *count->max_count);
        return outcome;
    }
    const auto& presence = std::get<ClassPresencePredicate>(predicate);
    const std::set<std::string>& labels = mapping.query_labels(presence.class_name);
    for (std::size_t index : dataset.annotations_of(sample.id)) {
        const Annotation& annotation = dataset.annotations()[index];
        if (labels.contains(annotation.label)) outcome.annotation_ids.insert(annotation.id);
    }
    outcome.matched = outcome.annotation_ids.size() >= static_cast<std::size_t>(presence.min_count);
    return outcome;
}

namespace {

// Evaluates one metric over a contiguous range of scenes.
HitSet evaluate_scene_range(const CompiledMetric& metric, const DatasetIndex& dataset,
                            const LabelMapping& mapping, std::size_t begin, std::size_t end) {
    HitSet hits;
    hits.corner_case_id = metric.corner_case_id;
    hits.cause_text = metric.cause_text;

    std::vector<const SceneTextKeywordPredicate*> scene_predicates;
    std::vector<const Predicate*> sample_predicates;
    for (const Predicate& predicate : metric.predicates) {
        if (const auto* keyword = std::get_if<SceneTextKeywordPredicate>(&predicate)) {
            scene_predicates.push_back(keyword);
        } else {
            sample_predicates.push_back(&predicate);
        }
    }

    for (std::size_t scene_index = begin; scene_index < end; ++scene_index) {
        const Scene& scene = dataset.scenes()[scene_index];
        const TokenStream tokens = tokenize(scene.description_text);
        const bool scene_ok =
            std::all_of(scene_predicates.begin(), scene_predicates.end(),
                        [&](const SceneTextKeywordPredicate* p) { return keywords_hold(*p, tokens); });
        if (!scene_ok) continue;

        for (std::size_t sample_index : dataset.samples_of(scene.id)) {
            const Sample& sample = dataset.samples()[sample_index];
            bool qualifies = true;
            std::set<std::string> targeted;
            for (const Predicate* predicate : sample_predicates) {
                PredicateOutcome outcome = evaluate_predicate(*predicate, sample, scene, dataset, mapping);
                if (!outcome.matched) {
                    qualifies = false;
                    break;
                }
                if (std::holds_alternative<ClassPresencePredicate>(*predicate)) {
                    targeted.merge(outcome.annotation_ids);
                }
            }
            if (!qualifies) continue;

            hits.scene_ids.insert(scene.id);
            hits.sample_ids.insert(sample.id);
            if (metric.hit_mode == HitMode::SceneWide) {
                for (std::size_t index : dataset.annotations_of(sample.id)) {
                    hits.annotation_ids.insert(dataset.annotations()[index].id);
                }
            } else {
                hits.annotation_ids.merge(targeted);
            }
        }
    }
    return hits;
}

void check_upward_closure(const HitSet& hits, const DatasetIndex& dataset) {
    for (const std::string& sample_id : hits.sample_ids) {
        const Sample* sample = dataset.find_sample(sample_id);
        if (sample == nullptr || !hits.scene_ids.contains(sample->scene_id)) {
            throw Error::validation("ClosureViolation",
                                    "hit sample " + sample_id + " lacks its scene in the hit set");
        }
    }
    for (const std::string& annotation_id : hits.annotation_ids) {
        const Annotation* annotation = dataset.find_annotation(annotation_id);
        if (annotation == nullptr || !hits.sample_ids.contains(annotation->sample_id)) {
            throw Error::validation("ClosureViolation",
                                    "hit annotation " + annotation_id + " lacks its sample in the hit set");
        }
    }
}

} // namespace

HitSet evaluate_metric(const CompiledMetric& metric, const DatasetIndex& dataset,
                       const LabelMapping& mapping, int jobs) {
    const std::size_t n_scenes = dataset.scenes().size();
    const std::size_t workers =
        std::max<std::size_t>(1, std::min<std::size_t>(jobs <= 0 ? 1 : jobs, n_scenes));

    HitSet merged;
    if (workers == 1) {
        merged = evaluate_scene_range(metric, dataset, mapping, 0, n_scenes);
    } else {
        std::vector<HitSet> parts(workers);
        std::vector<std::thread> threads;
        const std::size_t chunk = (n_scenes + workers - 1) / workers;
        for (std::size_t w = 0; w < workers; ++w) {
            const std::size_t begin = w * chunk;
            const std::size_t end = std::min(n_scenes, begin + chunk);
            threads.emplace_back([&, w, begin, end] {
                parts[w] = evaluate_scene_range(metric, dataset, mapping, begin, end);
            });
        }
        for (std::thread& thread : threads) thread.join();
        merged.corner_case_id = metric.corner_case_id;
        merged.cause_text = metric.cause_text;
        for (HitSet& part : parts) {
            merged.scene_ids.merge(part.scene_ids);
            merged.sample_ids.merge(part.sample_ids);
            merged.annotation_ids.merge(part.annotation_ids);
        }
    }
    check_upward_closure(merged, dataset);
    return merged;
}

ExtractionResult extract_all(const MetricsFile& metrics, const DatasetIndex& dataset,
                             const LabelMapping& mapping, int jobs) {
    ExtractionResult result;
    result.total_annotations = dataset.annotations().size();
    result.total_samples = dataset.samples().size();
    result.total_scenes = dataset.scenes().size();

    std::set<std::string> covered_annotations;
    std::set<std::string> covered_samples;
    std::set<std::string> covered_scenes;
    for (const CompiledMetric& metric : metrics.metrics) {
        HitSet hits = evaluate_metric(metric, dataset, mapping, jobs);
        covered_annotations.insert(hits.annotation_ids.begin(), hits.annotation_ids.end());
        covered_samples.insert(hits.sample_ids.begin(), hits.sample_ids.end());
        covered_scenes.insert(hits.scene_ids.begin(), hits.scene_ids.end());
        result.hits.push_back(std::move(hits));
    }
    std::sort(result.hits.begin(), result.hits.end(), [](const HitSet& a, const HitSet& b) {
        return std::tie(a.corner_case_id, a.cause_text) < std::tie(b.corner_case_id, b.cause_text);
    });

    auto fraction = [](std::size_t covered, std::size_t total) {
        return total == 0 ? 0.0 : static_cast<double>(covered) / static_cast<double>(total);
    };
    result.coverage.annotations = fraction(covered_annotations.size(), result.total_annotations);
    result.coverage.samples = fraction(covered_samples.size(), result.total_samples);
    result.coverage.scenes = fraction(covered_scenes.size(), result.total_scenes);
    return result;
}

nlohmann::json extraction_to_json(const ExtractionResult& result) {
    nlohmann::json document;
    document["version"] = "1";
    document["hits"] = nlohmann::json::array();
    for (const HitSet& hits : result.hits) {
        nlohmann::json entry;
        entry["corner_case_id"] = hits.corner_case_id;
        entry["cause"] = hits.cause_text;
        entry["scene_ids"] = hits.scene_ids;
        entry["sample_ids"] = hits.sample_ids;
        entry["annotation_ids"] = hits.annotation_ids;
        document["hits"].push_back(std::move(entry));
    }
    document["totals"] = {{"annotations", result.total_annotations},
                          {"samples", result.total_samples},
                          {"scenes", result.total_scenes}};
    document["coverage"] = {{"annotations", result.coverage.annotations},
                            {"samples", result.coverage.samples},
                            {"scenes", result.coverage.scenes}};
    return document;
}

ExtractionResult extraction_from_json(const nlohmann::json& document) {
    if (!document.is_object() || !document.contains("version") || document["version"] != "1") {
        throw Error::validation("VersionMismatch", "unsupported hits document version");
    }
    ExtractionResult result;
    if (!document.contains("hits") || !document["hits"].is_array()) {
        throw Error::validation("Malformed", "hits document must carry a hits array");
    }
    std::set<std::pair<int, std::string>> seen;
    for (const nlohmann::json& entry : document["hits"]) {
        HitSet hits;
        if (!entry.contains("corner_case_id") || !entry["corner_case_id"].is_number_integer() ||
            !entry.contains("cause") || !entry["cause"].is_string()) {
            throw Error::validation("Malformed", "hit entry must carry corner_case_id and cause");
        }
        hits.corner_case_id = entry["corner_case_id"].get<int>();
        hits.cause_text = entry["cause"].get<std::string>();
        if (!seen.emplace(hits.corner_case_id, hits.cause_text).second) {
            throw Error::validation("DuplicateId",
                                    "duplicate hit entry for corner case " +
                                        std::to_string(hits.corner_case_id) + " cause '" +
                                        hits.cause_text + "'");
        }
        auto read_ids = [&](const char* key, std::set<std::string>& target) {
            if (!entry.contains(key) || !entry[key].is_array()) {
                throw Error::validation("Malformed", std::string("hit entry must carry ") + key);
            }
            for (const nlohmann::json& id : entry[key]) target.insert(id.get<std::string>());
        };
        read_ids("scene_ids", hits.scene_ids);
        read_ids("sample_ids", hits.sample_ids);
        read_ids("annotation_ids", hits.annotation_ids);
        result.hits.push_back(std::move(hits));
    }
    if (!document.contains("totals") || !document.contains("coverage")) {
        throw Error::validation("Malformed", "hits document must carry totals and coverage");
    }
    result.total_annotations = document["totals"]["annotations"].get<std::size_t>();
    result.total_samples = document["totals"]["samples"].get<std::size_t>();
    result.total_scenes = document["totals"]["scenes"].get<std::size_t>();
    result.coverage.annotations = document["coverage"]["annotations"].get<double>();
    result.coverage.samples = document["coverage"]["samples"].get<double>();
    result.coverage.scenes = document["coverage"]["scenes"].get<double>();
    return result;
}

} // namespace cornerforge
