#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "cornerforge/dataset.hpp"
#include "cornerforge/metrics.hpp"

namespace cornerforge {

// A-priori corner cases one metric found. Upward-closed: every hit sample's
// scene is a hit scene, every hit annotation's sample is a hit sample.
struct HitSet {
    int corner_case_id = 0;
    std::string cause_text;
    std::set<std::string> scene_ids;
    std::set<std::string> sample_ids;
    std::set<std::string> annotation_ids;

    bool operator==(const HitSet&) const = default;
};

struct Coverage {
    double annotations = 0.0;
    double samples = 0.0;
    double scenes = 0.0;

    bool operator==(const Coverage&) const = default;
};

struct ExtractionResult {
    std::vector<HitSet> hits; // sorted by (corner_case_id, cause_text)
    std::size_t total_annotations = 0;
    std::size_t total_samples = 0;
    std::size_t total_scenes = 0;
    Coverage coverage; // |union of hit ids| / total, per granularity

    bool operator==(const ExtractionResult&) const = default;
};

// ClassPresence predicates report which annotations matched; every other
// predicate only answers yes/no.
struct PredicateOutcome {
    bool matched = false;
    std::set<std::string> annotation_ids;
};

PredicateOutcome evaluate_predicate(const Predicate& predicate, const Sample& sample,
                                    const Scene& scene, const DatasetIndex& dataset,
                                    const LabelMapping& mapping);

HitSet evaluate_metric(const CompiledMetric& metric, const DatasetIndex& dataset,
                       const LabelMapping& mapping, int jobs = 1);

ExtractionResult extract_all(const MetricsFile& metrics, const DatasetIndex& dataset,
                             const LabelMapping& mapping, int jobs = 1);

nlohmann::json extraction_to_json(const ExtractionResult& result);
ExtractionResult extraction_from_json(const nlohmann::json& document);

} // namespace cornerforge
