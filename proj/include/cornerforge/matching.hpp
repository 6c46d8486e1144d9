#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cornerforge/dataset.hpp"

namespace cornerforge {

struct Detection {
    std::string id;
    std::string sample_id;
    std::string label; // dataset vocabulary
    Vec3 center;
    double score = 0.0; // in [0, 1]

    bool operator==(const Detection&) const = default;
};

std::vector<Detection> detections_from_json(const nlohmann::json& document,
                                            const DatasetIndex& dataset);
nlohmann::json detections_to_json(const std::vector<Detection>& detections);

// Minimum-total-cost maximum matching: min(n, m) (row, col) pairs. Among
// equal-cost optima the lexicographically lowest pair set is returned.
std::set<std::pair<int, int>> solve_assignment(const std::vector<std::vector<double>>& cost);

struct TpPair {
    std::string annotation_id;
    std::string detection_id;
    double distance = 0.0;

    bool operator==(const TpPair&) const = default;
    auto operator<=>(const TpPair&) const = default;
};

// Per-sample partition: every annotation is TP or FN, every detection TP or FP.
struct MatchOutcome {
    std::string sample_id;
    std::vector<TpPair> tp_pairs; // sorted by annotation_id
    std::set<std::string> fn_annotations;
    std::set<std::string> fp_detections;

    bool operator==(const MatchOutcome&) const = default;
};

MatchOutcome match_sample(const std::vector<Annotation>& gts, const std::vector<Detection>& dets,
                          double threshold_m);

struct EnrichedAnnotation {
    Annotation annotation;
    std::string scene_id;
    bool detected = false; // TP when true, FN when false
    std::optional<std::string> detection_id;
    std::optional<double> detection_score;
    std::optional<double> distance;

    bool operator==(const EnrichedAnnotation&) const = default;
};

struct EnrichmentResult {
    std::vector<EnrichedAnnotation> annotations; // sorted by (sample_id, annotation id)
    std::vector<MatchOutcome> outcomes;          // sorted by sample_id, one per sample
    std::size_t tp_count = 0;
    std::size_t fn_count = 0;
    std::size_t fp_count = 0;
    std::size_t detection_count = 0;

    bool operator==(const EnrichmentResult&) const = default;
};

EnrichmentResult enrich(const DatasetIndex& dataset, const std::vector<Detection>& detections,
                        double threshold_m, int jobs = 1);

nlohmann::json enrichment_to_json(const EnrichmentResult& result);
EnrichmentResult enrichment_from_json(const nlohmann::json& document);

} // namespace cornerforge
