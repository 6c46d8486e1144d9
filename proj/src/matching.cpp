#include "cornerforge/matching.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "cornerforge/error.hpp"

namespace cornerforge {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Minimum total cost of assigning every row to a distinct column; requires
// rows <= cols. Classic O(rows^2 * cols) potentials formulation.
double hungarian_total(const std::vector<std::vector<double>>& a) {
    const int n = static_cast<int>(a.size());
    const int m = n == 0 ? 0 : static_cast<int>(a[0].size());
    if (n == 0) return 0.0;

    std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
    std::vector<int> p(m + 1, 0), way(m + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(m + 1, kInf);
        std::vector<char> used(m + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = p[j0];
            int j1 = -1;
            double delta = kInf;
            for (int j = 1; j <= m; ++j) {
                if (used[j]) continue;
                const double cur = a[i0 - 1][j - 1] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= m; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }

    double total = 0.0;
    for (int j = 1; j <= m; ++j) {
        if (p[j] != 0) total += a[p[j] - 1][j - 1];
    }
    return total;
}

// Minimum total over maximum matchings of an arbitrary rectangle; transposes
// when rows exceed columns so every assignment problem has rows <= cols.
double min_matching_total(const std::vector<std::vector<double>>& cost,
                          const std::vector<int>& rows, const std::vector<int>& cols) {
    if (rows.empty() || cols.empty()) return 0.0;
    const bool transpose = rows.size() > cols.size();
    const std::vector<int>& r = transpose ? cols : rows;
    const std::vector<int>& c = transpose ? rows : cols;
    std::vector<std::vector<double>> sub(r.size(), std::vector<double>(c.size()));
    for (std::size_t i = 0; i < r.size(); ++i) {
        for (std::size_t j = 0; j < c.size(); ++j) {
            sub[i][j] = transpose ? cost[c[j]][r[i]] : cost[r[i]][c[j]];
        }
    }
    return hungarian_total(sub);
}

} // namespace

std::set<std::pair<int, int>> solve_assignment(const std::vector<std::vector<double>>& cost) {
    const int n = static_cast<int>(cost.size());
    const int m = n == 0 ? 0 : static_cast<int>(cost[0].size());
    if (n == 0 || m == 0) return {};
    for (int i = 0; i < n; ++i) {
        if (static_cast<int>(cost[i].size()) != m) {
            throw Error::validation("Malformed", "cost matrix rows have unequal lengths");
        }
        for (int j = 0; j < m; ++j) {
            if (!std::isfinite(cost[i][j])) {
                throw Error::validation("NonFinite", "cost matrix entry is not finite");
            }
            if (cost[i][j] < 0.0) {
                throw Error::validation("NegativeCost", "cost matrix entry is negative");
            }
        }
    }

    std::vector<int> all_cols(m);
    for (int j = 0; j < m; ++j) all_cols[j] = j;
    std::vector<int> remaining_rows(n);
    for (int i = 0; i < n; ++i) remaining_rows[i] = i;

    double target = min_matching_total(cost, remaining_rows, all_cols);

    // Fix pairs in lexicographic order: commit (r, c) whenever the remaining
    // subproblem can still reach the optimal total.
    std::set<std::pair<int, int>> pairs;
    std::vector<int> free_cols = all_cols;
    int pairs_left = std::min(n, m);
    for (int r = 0; r < n && pairs_left > 0; ++r) {
        std::vector<int> rows_below;
        for (int i = r + 1; i < n; ++i) rows_below.push_back(i);

        const double tolerance = 1e-9 * std::max(1.0, std::abs(target));
        bool fixed = false;
        for (std::size_t k = 0; k < free_cols.size(); ++k) {
            const int c = free_cols[k];
            std::vector<int> cols_rest = free_cols;
            cols_rest.erase(cols_rest.begin() + static_cast<std::ptrdiff_t>(k));
            const double rest = min_matching_total(cost, rows_below, cols_rest);
            if (cost[r][c] + rest <= target + tolerance) {
                pairs.emplace(r, c);
                free_cols = std::move(cols_rest);
                target -= cost[r][c];
                --pairs_left;
                fixed = true;
                break;
            }
        }
        // No extension through row r reaches the optimum, so some optimal
        // solution skips it; enough rows remain because pairs never exceed
        // min(n, m).
        if (!fixed && static_cast<int>(rows_below.size()) < pairs_left) {
            throw Error::validation("Internal", "assignment search failed to place a required row");
        }
    }
    return pairs;
}

MatchOutcome match_sample(const std::vector<Annotation>& gts, const std::vector<Detection>& dets,
                          double threshold_m) {
    if (threshold_m <= 0.0) {
        throw Error::validation("Malformed", "matching threshold must be positive");
    }
    MatchOutcome outcome;
    if (!gts.empty()) outcome.sample_id = gts.front().sample_id;
    else if (!dets.empty()) outcome.sample_id = dets.front().sample_id;

    std::set<std::string> labels;
    std::map<std::string, std::vector<const Annotation*>> gts_by_label;
    std::map<std::string, std::vector<const Detection*>> dets_by_label;
    for (const Annotation& gt : gts) {
        if (gt.sample_id != outcome.sample_id) {
            throw Error::validation("UnknownSample",
                                    "annotation " + gt.id + " belongs to a different sample");
        }
        gts_by_label[gt.label].push_back(&gt);
        labels.insert(gt.label);
    }
    for (const Detection& det : dets) {
        if (det.sample_id != outcome.sample_id) {
            throw Error::validation("UnknownSample",
                                    "detection " + det.id + " belongs to a different sample");
        }
        dets_by_label[det.label].push_back(&det);
        labels.insert(det.label);
    }

    for (const std::string& label : labels) {
        std::vector<const Annotation*> label_gts =
            gts_by_label.contains(label) ? gts_by_label[label] : std::vector<const Annotation*>{};
        std::vector<const Detection*> label_dets =
            dets_by_label.contains(label) ? dets_by_label[label] : std::vector<const Detection*>{};
        std::sort(label_gts.begin(), label_gts.end(),
                  [](const Annotation* a, const Annotation* b) { return a->id < b->id; });
        std::sort(label_dets.begin(), label_dets.end(),
                  [](const Detection* a, const Detection* b) { return a->id < b->id; });

        std::vector<std::vector<double>> cost(label_gts.size(),
                                              std::vector<double>(label_dets.size()));
        for (std::size_t i = 0; i < label_gts.size(); ++i) {
            for (std::size_t j = 0; j < label_dets.size(); ++j) {
                cost[i][j] = std::hypot(label_gts[i]->center.x - label_dets[j]->center.x,
                                        label_gts[i]->center.y - label_dets[j]->center.y);
            }
        }

        std::set<std::size_t> matched_gts;
        std::set<std::size_t> matched_dets;
        if (!label_gts.empty() && !label_dets.empty()) {
            for (const auto& [row, col] : solve_assignment(cost)) {
                const double distance = cost[row][col];
                if (distance > threshold_m) continue; // closed gate, applied after assignment
                outcome.tp_pairs.push_back(
                    {label_gts[row]->id, label_dets[col]->id, distance});
                matched_gts.insert(static_cast<std::size_t>(row));
                matched_dets.insert(static_cast<std::size_t>(col));
            }
        }
        for (std::size_t i = 0; i < label_gts.size(); ++i) {
            if (!matched_gts.contains(i)) outcome.fn_annotations.insert(label_gts[i]->id);
        }
        for (std::size_t j = 0; j < label_dets.size(); ++j) {
            if (!matched_dets.contains(j)) outcome.fp_detections.insert(label_dets[j]->id);
        }
    }
    std::sort(outcome.tp_pairs.begin(), outcome.tp_pairs.end(),
              [](const TpPair& a, const TpPair& b) { return a.annotation_id < b.annotation_id; });
    return outcome;
}

namespace {

MatchOutcome match_one_sample(const DatasetIndex& dataset, const Sample& sample,
                              const std::vector<const Detection*>& sample_dets, double threshold_m) {
    std::vector<Annotation> gts;
    for (std::size_t index : dataset.annotations_of(sample.id)) {
        gts.push_back(dataset.annotations()[index]);
    }
    std::vector<Detection> dets;
    for (const Detection* det : sample_dets) dets.push_back(*det);
    MatchOutcome outcome = match_sample(gts, dets, threshold_m);
    outcome.sample_id = sample.id; // empty samples still carry their id
    return outcome;
}

} // namespace

EnrichmentResult enrich(const DatasetIndex& dataset, const std::vector<Detection>& detections,
                        double threshold_m, int jobs) {
    std::map<std::string, std::vector<const Detection*>> dets_by_sample;
    for (const Detection& det : detections) {
        if (dataset.find_sample(det.sample_id) == nullptr) {
            throw Error::validation("UnknownSample",
                                    "detection " + det.id + " references missing sample " + det.sample_id);
        }
        dets_by_sample[det.sample_id].push_back(&det);
    }

    const std::vector<Sample>& samples = dataset.samples();
    std::vector<MatchOutcome> outcomes(samples.size());
    const std::size_t workers =
        std::max<std::size_t>(1, std::min<std::size_t>(jobs <= 0 ? 1 : jobs, samples.size()));
    static const std::vector<const Detection*> kNoDetections;
    auto run_range = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const auto it = dets_by_sample.find(samples[i].id);
            outcomes[i] = match_one_sample(dataset, samples[i],
                                           it == dets_by_sample.end() ? kNoDetections : it->second,
                                           threshold_m);
        }
    };
    if (workers <= 1) {
        run_range(0, samples.size());
    } else {
        std::vector<std::thread> threads;
        const std::size_t chunk = (samples.size() + workers - 1) / workers;
        for (std::size_t w = 0; w < workers; ++w) {
            const std::size_t begin = w * chunk;
            const std::size_t end = std::min(samples.size(), begin + chunk);
            threads.emplace_back([&, begin, end] { run_range(begin, end); });
        }
        for (std::thread& thread : threads) thread.join();
    }

    EnrichmentResult result;
    result.outcomes = std::move(outcomes);
    result.detection_count = detections.size();
    for (const MatchOutcome& outcome : result.outcomes) {
        const Sample* sample = dataset.find_sample(outcome.sample_id);
        std::map<std::string, const TpPair*> tp_by_annotation;
        for (const TpPair& pair : outcome.tp_pairs) tp_by_annotation.emplace(pair.annotation_id, &pair);

        std::map<std::string, const Detection*> det_by_id;
        const auto it = dets_by_sample.find(outcome.sample_id);
        if (it != dets_by_sample.end()) {
            for (const Detection* det : it->second) det_by_id.emplace(det->id, det);
        }

        for (std::size_t index : dataset.annotations_of(outcome.sample_id)) {
            const Annotation& annotation = dataset.annotations()[index];
            EnrichedAnnotation enriched;
            enriched.annotation = annotation;
            enriched.scene_id = sample->scene_id;
            const auto tp = tp_by_annotation.find(annotation.id);
            if (tp != tp_by_annotation.end()) {
                enriched.detected = true;
                enriched.detection_id = tp->second->detection_id;
                enriched.detection_score = det_by_id.at(tp->second->detection_id)->score;
                enriched.distance = tp->second->distance;
            }
            result.annotations.push_back(std::move(enriched));
        }
        result.tp_count += outcome.tp_pairs.size();
        result.fn_count += outcome.fn_annotations.size();
        result.fp_count += outcome.fp_detections.size();
    }
    // samples are sorted by id and annotations_of() is sorted, so the
    // enriched list is already in (sample_id, annotation_id) order.

    if (result.tp_count + result.fn_count != dataset.annotations().size() ||
        result.tp_count + result.fp_count != detections.size()) {
        throw Error::validation("Internal", "TP/FN/FP conservation violated");
    }
    return result;
}

std::vector<Detection> detections_from_json(const nlohmann::json& document,
                                            const DatasetIndex& dataset) {
    if (!document.is_object() || !document.contains("version") || document["version"] != "1") {
        throw Error::validation("VersionMismatch", "unsupported detections document version");
    }
    if (!document.contains("detections") || !document["detections"].is_array()) {
        throw Error::validation("Malformed", "detections document must carry a detections array");
    }
    std::vector<Detection> detections;
    std::set<std::string> seen;
    for (const nlohmann::json& entry : document["detections"]) {
        Detection det;
        if (!entry.contains("id") || !entry["id"].is_string()) {
            throw Error::validation("Malformed", "detection entry missing id");
        }
        det.id = entry["id"].get<std::string>();
        if (!seen.insert(det.id).second) {
            throw Error::validation("DuplicateId", "detection id '" + det.id + "' is not unique");
        }
        const std::string context = "detection " + det.id;
        if (!entry.contains("sample_id") || !entry["sample_id"].is_string()) {
            throw Error::validation("Malformed", context + ": missing sample_id");
        }
        det.sample_id = entry["sample_id"].get<std::string>();
        if (dataset.find_sample(det.sample_id) == nullptr) {
            throw Error::validation("UnknownSample",
                                    context + " references missing sample " + det.sample_id);
        }
        if (!entry.contains("label") || !entry["label"].is_string()) {
            throw Error::validation("Malformed", context + ": missing label");
        }
        det.label = entry["label"].get<std::string>();
        if (!entry.contains("center") || !entry["center"].is_array() || entry["center"].size() != 3) {
            throw Error::validation("Malformed", context + ": center must be [x, y, z]");
        }
        det.center = {entry["center"][0].get<double>(), entry["center"][1].get<double>(),
                      entry["center"][2].get<double>()};
        if (!entry.contains("score") || !entry["score"].is_number()) {
            throw Error::validation("Malformed", context + ": missing score");
        }
        det.score = entry["score"].get<double>();
        if (!(det.score >= 0.0 && det.score <= 1.0)) {
            throw Error::validation("Malformed", context + ": score must lie in [0, 1]");
        }
        detections.push_back(std::move(det));
    }
    return detections;
}

nlohmann::json detections_to_json(const std::vector<Detection>& detections) {
    nlohmann::json document;
    document["version"] = "1";
    document["detections"] = nlohmann::json::array();
    for (const Detection& det : detections) {
        nlohmann::json entry;
        entry["id"] = det.id;
        entry["sample_id"] = det.sample_id;
        entry["label"] = det.label;
        entry["center"] = nlohmann::json::array({det.center.x, det.center.y, det.center.z});
        entry["score"] = det.score;
        document["detections"].push_back(std::move(entry));
    }
    return document;
}

nlohmann::json enrichment_to_json(const EnrichmentResult& result) {
    nlohmann::json document;
    document["version"] = "1";
    document["annotations"] = nlohmann::json::array();
    for (const EnrichedAnnotation& enriched : result.annotations) {
        nlohmann::json entry;
        entry["id"] = enriched.annotation.id;
        entry["sample_id"] = enriched.annotation.sample_id;
        entry["scene_id"] = enriched.scene_id;
        entry["label"] = enriched.annotation.label;
        entry["center"] = nlohmann::json::array(
            {enriched.annotation.center.x, enriched.annotation.center.y, enriched.annotation.center.z});
        entry["size"] = nlohmann::json::array(
            {enriched.annotation.size.x, enriched.annotation.size.y, enriched.annotation.size.z});
        entry["heading"] = enriched.annotation.heading;
        if (!enriched.annotation.attributes.empty()) {
            entry["attributes"] = enriched.annotation.attributes;
        }
        entry["outcome"] = enriched.detected ? "TP" : "FN";
        if (enriched.detected) {
            entry["detection_id"] = *enriched.detection_id;
            entry["detection_score"] = *enriched.detection_score;
            entry["distance"] = *enriched.distance;
        }
        document["annotations"].push_back(std::move(entry));
    }
    document["samples"] = nlohmann::json::array();
    for (const MatchOutcome& outcome : result.outcomes) {
        nlohmann::json entry;
        entry["id"] = outcome.sample_id;
        entry["tp"] = outcome.tp_pairs.size();
        entry["fn"] = outcome.fn_annotations.size();
        entry["fp"] = outcome.fp_detections.size();
        entry["fp_detection_ids"] = outcome.fp_detections;
        document["samples"].push_back(std::move(entry));
    }
    document["totals"] = {{"tp", result.tp_count},
                          {"fn", result.fn_count},
                          {"fp", result.fp_count},
                          {"annotations", result.annotations.size()},
                          {"detections", result.detection_count}};
    return document;
}

EnrichmentResult enrichment_from_json(const nlohmann::json& document) {
    if (!document.is_object() || !document.contains("version") || document["version"] != "1") {
        throw Error::validation("VersionMismatch", "unsupported enriched document version");
    }
    if (!document.contains("annotations") || !document["annotations"].is_array() ||
        !document.contains("samples") || !document["samples"].is_array() ||
        !document.contains("totals")) {
        throw Error::validation("Malformed", "enriched document must carry annotations/samples/totals");
    }
    EnrichmentResult result;
    std::map<std::string, MatchOutcome> outcomes;
    for (const nlohmann::json& entry : document["samples"]) {
        MatchOutcome outcome;
        outcome.sample_id = entry.at("id").get<std::string>();
        for (const nlohmann::json& id : entry.at("fp_detection_ids")) {
            outcome.fp_detections.insert(id.get<std::string>());
        }
        outcomes.emplace(outcome.sample_id, std::move(outcome));
    }
    for (const nlohmann::json& entry : document["annotations"]) {
        EnrichedAnnotation enriched;
        enriched.annotation.id = entry.at("id").get<std::string>();
        enriched.annotation.sample_id = entry.at("sample_id").get<std::string>();
        enriched.scene_id = entry.at("scene_id").get<std::string>();
        enriched.annotation.label = entry.at("label").get<std::string>();
        const nlohmann::json& center = entry.at("center");
        enriched.annotation.center = {center[0].get<double>(), center[1].get<double>(),
                                      center[2].get<double>()};
        const nlohmann::json& size = entry.at("size");
        enriched.annotation.size = {size[0].get<double>(), size[1].get<double>(), size[2].get<double>()};
        enriched.annotation.heading = entry.at("heading").get<double>();
        if (entry.contains("attributes")) {
            for (const auto& [key, value] : entry["attributes"].items()) {
                enriched.annotation.attributes.emplace(key, value.get<std::string>());
            }
        }
        const std::string flag = entry.at("outcome").get<std::string>();
        if (flag != "TP" && flag != "FN") {
            throw Error::validation("Malformed",
                                    "annotation " + enriched.annotation.id + ": outcome must be TP or FN");
        }
        enriched.detected = flag == "TP";
        const auto outcome = outcomes.find(enriched.annotation.sample_id);
        if (outcome == outcomes.end()) {
            throw Error::validation("Malformed", "annotation " + enriched.annotation.id +
                                                     " references sample absent from samples list");
        }
        if (enriched.detected) {
            enriched.detection_id = entry.at("detection_id").get<std::string>();
            enriched.detection_score = entry.at("detection_score").get<double>();
            enriched.distance = entry.at("distance").get<double>();
            outcome->second.tp_pairs.push_back(
                {enriched.annotation.id, *enriched.detection_id, *enriched.distance});
        } else {
            outcome->second.fn_annotations.insert(enriched.annotation.id);
        }
        result.annotations.push_back(std::move(enriched));
    }
    for (auto& [sample_id, outcome] : outcomes) {
        std::sort(outcome.tp_pairs.begin(), outcome.tp_pairs.end(),
                  [](const TpPair& a, const TpPair& b) { return a.annotation_id < b.annotation_id; });
        result.outcomes.push_back(std::move(outcome));
    }
    result.tp_count = document["totals"].at("tp").get<std::size_t>();
    result.fn_count = document["totals"].at("fn").get<std::size_t>();
    result.fp_count = document["totals"].at("fp").get<std::size_t>();
    result.detection_count = document["totals"].at("detections").get<std::size_t>();
    return result;
}

} // namespace cornerforge
