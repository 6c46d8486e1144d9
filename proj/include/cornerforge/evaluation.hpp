#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "cornerforge/extraction.hpp"
#include "cornerforge/matching.hpp"
#include "cornerforge/registry.hpp"

namespace cornerforge {

// A-priori hits of one (corner case, cause) intersected with what the
// detector missed.
struct APosterioriEntry {
    int corner_case_id = 0;
    std::string cause_text;
    std::set<std::string> a_priori_annotations;
    std::set<std::string> a_posteriori_annotations; // the FN subset
    std::set<std::string> a_priori_scenes;
    std::set<std::string> a_posteriori_scenes; // scenes with >= 1 FN a-priori annotation

    bool operator==(const APosterioriEntry&) const = default;
};

struct APosterioriResult {
    std::vector<APosterioriEntry> entries; // sorted by (corner_case_id, cause_text)
    // Carried through for the report.
    std::size_t total_annotations = 0;
    std::size_t total_samples = 0;
    std::size_t total_scenes = 0;
    Coverage coverage;
    std::size_t tp_count = 0;
    std::size_t fn_count = 0;
    std::size_t fp_count = 0;

    bool operator==(const APosterioriResult&) const = default;
};

APosterioriResult derive_a_posteriori(const ExtractionResult& hits, const EnrichmentResult& outcomes);

nlohmann::json a_posteriori_to_json(const APosterioriResult& result);
APosterioriResult a_posteriori_from_json(const nlohmann::json& document);

struct ReportRow {
    std::size_t a_priori = 0;
    std::size_t a_posteriori = 0;
    std::optional<double> ratio; // absent when a_priori == 0

    bool operator==(const ReportRow&) const = default;
};

// Counts are annotation-granular except corner_case_scenes, which applies the
// scene-level reading. Layer/level rows sum the per-corner-case contributions
// of every (corner case, classification) pair, so multi-classified corner
// cases count toward each of their classifications.
struct CornerCaseReport {
    std::map<std::string, ReportRow> corner_case;        // key: corner case id
    std::map<std::string, ReportRow> corner_case_scenes; // key: corner case id
    std::map<std::string, ReportRow> layer;              // key: "Sensor" / "Content"
    std::map<std::string, ReportRow> level;              // key: "Layer/Level[ - Sublevel]"
    std::size_t total_annotations = 0;
    std::size_t total_samples = 0;
    std::size_t total_scenes = 0;
    Coverage coverage;
    std::size_t tp_count = 0;
    std::size_t fn_count = 0;
    std::size_t fp_count = 0;

    bool operator==(const CornerCaseReport&) const = default;
};

CornerCaseReport aggregate(const APosterioriResult& result, const std::vector<CornerCaseSpec>& specs);

nlohmann::json report_to_json(const CornerCaseReport& report);
CornerCaseReport report_from_json(const nlohmann::json& document);
std::string report_to_csv(const CornerCaseReport& report);

// format: "json" or "csv"; anything else is UnsupportedFormat.
std::string write_report(const CornerCaseReport& report, const std::string& format);

} // namespace cornerforge
