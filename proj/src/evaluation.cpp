#include "cornerforge/evaluation.hpp"

#include <algorithm>
#include <cstdio>
#include <tuple>

#include "cornerforge/error.hpp"

namespace cornerforge {

APosterioriResult derive_a_posteriori(const ExtractionResult& hits, const EnrichmentResult& outcomes) {
    struct Flags {
        bool detected = false;
        const std::string* scene_id = nullptr;
    };
    std::map<std::string, Flags> by_annotation;
    for (const EnrichedAnnotation& enriched : outcomes.annotations) {
        by_annotation[enriched.annotation.id] = {enriched.detected, &enriched.scene_id};
    }

    APosterioriResult result;
    result.total_annotations = hits.total_annotations;
    result.total_samples = hits.total_samples;
    result.total_scenes = hits.total_scenes;
    result.coverage = hits.coverage;
    result.tp_count = outcomes.tp_count;
    result.fn_count = outcomes.fn_count;
    result.fp_count = outcomes.fp_count;

    for (const HitSet& hitset : hits.hits) {
        APosterioriEntry entry;
        entry.corner_case_id = hitset.corner_case_id;
        entry.cause_text = hitset.cause_text;
        entry.a_priori_annotations = hitset.annotation_ids;
        entry.a_priori_scenes = hitset.scene_ids;
        for (const std::string& annotation_id : hitset.annotation_ids) {
            const auto it = by_annotation.find(annotation_id);
            if (it == by_annotation.end()) {
                throw Error::validation("IdMismatch",
                                        "hit annotation " + annotation_id +
                                            " is absent from the enriched dataset");
            }
            if (!it->second.detected) {
                entry.a_posteriori_annotations.insert(annotation_id);
                entry.a_posteriori_scenes.insert(*it->second.scene_id);
            }
        }
        result.entries.push_back(std::move(entry));
    }
    std::sort(result.entries.begin(), result.entries.end(),
              [](const APosterioriEntry& a, const APosterioriEntry& b) {
                  return std::tie(a.corner_case_id, a.cause_text) <
                         std::tie(b.corner_case_id, b.cause_text);
              });
    return result;
}

nlohmann::json a_posteriori_to_json(const APosterioriResult& result) {
    nlohmann::json document;
    document["version"] = "1";
    document["entries"] = nlohmann::json::array();
    for (const APosterioriEntry& entry : result.entries) {
        nlohmann::json row;
        row["corner_case_id"] = entry.corner_case_id;
        row["cause"] = entry.cause_text;
        row["a_priori_annotations"] = entry.a_priori_annotations;
        row["a_posteriori_annotations"] = entry.a_posteriori_annotations;
        row["a_priori_scenes"] = entry.a_priori_scenes;
        row["a_posteriori_scenes"] = entry.a_posteriori_scenes;
        document["entries"].push_back(std::move(row));
    }
    document["totals"] = {{"annotations", result.total_annotations},
                          {"samples", result.total_samples},
                          {"scenes", result.total_scenes},
                          {"tp", result.tp_count},
                          {"fn", result.fn_count},
                          {"fp", result.fp_count}};
    document["coverage"] = {{"annotations", result.coverage.annotations},
                            {"samples", result.coverage.samples},
                            {"scenes", result.coverage.scenes}};
    return document;
}

APosterioriResult a_posteriori_from_json(const nlohmann::json& document) {
    if (!document.is_object() || !document.contains("version") || document["version"] != "1") {
        throw Error::validation("VersionMismatch", "unsupported a-posteriori document version");
    }
    APosterioriResult result;
    for (const nlohmann::json& row : document.at("entries")) {
        APosterioriEntry entry;
        entry.corner_case_id = row.at("corner_case_id").get<int>();
        entry.cause_text = row.at("cause").get<std::string>();
        auto read_ids = [&](const char* key, std::set<std::string>& target) {
            for (const nlohmann::json& id : row.at(key)) target.insert(id.get<std::string>());
        };
        read_ids("a_priori_annotations", entry.a_priori_annotations);
        read_ids("a_posteriori_annotations", entry.a_posteriori_annotations);
        read_ids("a_priori_scenes", entry.a_priori_scenes);
        read_ids("a_posteriori_scenes", entry.a_posteriori_scenes);
        result.entries.push_back(std::move(entry));
    }
    const nlohmann::json& totals = document.at("totals");
    result.total_annotations = totals.at("annotations").get<std::size_t>();
    result.total_samples = totals.at("samples").get<std::size_t>();
    result.total_scenes = totals.at("scenes").get<std::size_t>();
    result.tp_count = totals.at("tp").get<std::size_t>();
    result.fn_count = totals.at("fn").get<std::size_t>();
    result.fp_count = totals.at("fp").get<std::size_t>();
    const nlohmann::json& coverage = document.at("coverage");
    result.coverage.annotations = coverage.at("annotations").get<double>();
    result.coverage.samples = coverage.at("samples").get<double>();
    result.coverage.scenes = coverage.at("scenes").get<double>();
    return result;
}

namespace {

void fill_ratio(ReportRow& row) {
    if (row.a_priori > 0) {
        row.ratio = static_cast<double>(row.a_posteriori) / static_cast<double>(row.a_priori);
    }
}

} // namespace

CornerCaseReport aggregate(const APosterioriResult& result, const std::vector<CornerCaseSpec>& specs) {
    CornerCaseReport report;
    report.total_annotations = result.total_annotations;
    report.total_samples = result.total_samples;
    report.total_scenes = result.total_scenes;
    report.coverage = result.coverage;
    report.tp_count = result.tp_count;
    report.fn_count = result.fn_count;
    report.fp_count = result.fp_count;

    std::map<int, std::vector<const APosterioriEntry*>> entries_by_id;
    for (const APosterioriEntry& entry : result.entries) {
        entries_by_id[entry.corner_case_id].push_back(&entry);
    }

    for (const CornerCaseSpec& spec : specs) {
        // Union over the corner case's causes: an annotation hit through two
        // causes counts once for the corner case.
        std::set<std::string> a_priori_annotations;
        std::set<std::string> a_posteriori_annotations;
        std::set<std::string> a_priori_scenes;
        std::set<std::string> a_posteriori_scenes;
        const auto entries = entries_by_id.find(spec.id);
        if (entries != entries_by_id.end()) {
            for (const APosterioriEntry* entry : entries->second) {
                a_priori_annotations.insert(entry->a_priori_annotations.begin(),
                                            entry->a_priori_annotations.end());
                a_posteriori_annotations.insert(entry->a_posteriori_annotations.begin(),
                                                entry->a_posteriori_annotations.end());
                a_priori_scenes.insert(entry->a_priori_scenes.begin(), entry->a_priori_scenes.end());
                a_posteriori_scenes.insert(entry->a_posteriori_scenes.begin(),
                                           entry->a_posteriori_scenes.end());
            }
        }

        const std::string key = std::to_string(spec.id);
        ReportRow& annotations_row = report.corner_case[key];
        annotations_row.a_priori = a_priori_annotations.size();
        annotations_row.a_posteriori = a_posteriori_annotations.size();
        fill_ratio(annotations_row);

        ReportRow& scenes_row = report.corner_case_scenes[key];
        scenes_row.a_priori = a_priori_scenes.size();
        scenes_row.a_posteriori = a_posteriori_scenes.size();
        fill_ratio(scenes_row);

        for (const Classification& classification : spec.classifications) {
            ReportRow& layer_row = report.layer[to_string(classification.layer())];
            layer_row.a_priori += a_priori_annotations.size();
            layer_row.a_posteriori += a_posteriori_annotations.size();
            ReportRow& level_row = report.level[classification.to_string()];
            level_row.a_priori += a_priori_annotations.size();
            level_row.a_posteriori += a_posteriori_annotations.size();
        }
    }
    for (auto& [key, row] : report.layer) fill_ratio(row);
    for (auto& [key, row] : report.level) fill_ratio(row);
    return report;
}

namespace {

nlohmann::json rows_to_json(const std::map<std::string, ReportRow>& rows) {
    nlohmann::json out = nlohmann::json::object();
    for (const auto& [key, row] : rows) {
        nlohmann::json entry;
        entry["a_priori"] = row.a_priori;
        entry["a_posteriori"] = row.a_posteriori;
        if (row.ratio.has_value()) entry["ratio"] = *row.ratio;
        out[key] = std::move(entry);
    }
    return out;
}

std::map<std::string, ReportRow> rows_from_json(const nlohmann::json& value) {
    std::map<std::string, ReportRow> rows;
    for (const auto& [key, entry] : value.items()) {
        ReportRow row;
        row.a_priori = entry.at("a_priori").get<std::size_t>();
        row.a_posteriori = entry.at("a_posteriori").get<std::size_t>();
        if (entry.contains("ratio")) row.ratio = entry["ratio"].get<double>();
        rows.emplace(key, row);
    }
    return rows;
}

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string quoted = "\"";
    for (char c : field) {
        if (c == '"') quoted += '"';
        quoted += c;
    }
    quoted += '"';
    return quoted;
}

std::string format_ratio(const std::optional<double>& ratio) {
    if (!ratio.has_value()) return "";
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "%.17g", *ratio);
    return buffer;
}

} // namespace

nlohmann::json report_to_json(const CornerCaseReport& report) {
    nlohmann::json document;
    document["version"] = "1";
    document["rows"] = {{"corner_case", rows_to_json(report.corner_case)},
                        {"corner_case_scenes", rows_to_json(report.corner_case_scenes)},
                        {"layer", rows_to_json(report.layer)},
                        {"level", rows_to_json(report.level)}};
    document["totals"] = {{"annotations", report.total_annotations},
                          {"samples", report.total_samples},
                          {"scenes", report.total_scenes},
                          {"tp", report.tp_count},
                          {"fn", report.fn_count},
                          {"fp", report.fp_count}};
    document["coverage"] = {{"annotations", report.coverage.annotations},
                            {"samples", report.coverage.samples},
                            {"scenes", report.coverage.scenes}};
    return document;
}

CornerCaseReport report_from_json(const nlohmann::json& document) {
    if (!document.is_object() || !document.contains("version") || document["version"] != "1") {
        throw Error::validation("VersionMismatch", "unsupported report document version");
    }
    CornerCaseReport report;
    const nlohmann::json& rows = document.at("rows");
    report.corner_case = rows_from_json(rows.at("corner_case"));
    report.corner_case_scenes = rows_from_json(rows.at("corner_case_scenes"));
    report.layer = rows_from_json(rows.at("layer"));
    report.level = rows_from_json(rows.at("level"));
    const nlohmann::json& totals = document.at("totals");
    report.total_annotations = totals.at("annotations").get<std::size_t>();
    report.total_samples = totals.at("samples").get<std::size_t>();
    report.total_scenes = totals.at("scenes").get<std::size_t>();
    report.tp_count = totals.at("tp").get<std::size_t>();
    report.fn_count = totals.at("fn").get<std::size_t>();
    report.fp_count = totals.at("fp").get<std::size_t>();
    const nlohmann::json& coverage = document.at("coverage");
    report.coverage.annotations = coverage.at("annotations").get<double>();
    report.coverage.samples = coverage.at("samples").get<double>();
    report.coverage.scenes = coverage.at("scenes").get<double>();
    return report;
}

std::string report_to_csv(const CornerCaseReport& report) {
    std::string csv = "scope,key,a_priori,a_posteriori,ratio\n";
    auto emit = [&](const char* scope, const std::map<std::string, ReportRow>& rows) {
        for (const auto& [key, row] : rows) {
            csv += scope;
            csv += ',';
            csv += csv_escape(key);
            csv += ',';
            csv += std::to_string(row.a_priori);
            csv += ',';
            csv += std::to_string(row.a_posteriori);
            csv += ',';
            csv += format_ratio(row.ratio);
            csv += '\n';
        }
    };
    emit("corner_case", report.corner_case);
    emit("corner_case_scenes", report.corner_case_scenes);
    emit("layer", report.layer);
    emit("level", report.level);
    return csv;
}

std::string write_report(const CornerCaseReport& report, const std::string& format) {
    if (format == "json") {
        return report_to_json(report).dump(2) + "\n";
    }
    if (format == "csv") {
        return report_to_csv(report);
    }
    throw Error::validation("UnsupportedFormat", "unsupported report format '" + format + "'");
}

} // namespace cornerforge
