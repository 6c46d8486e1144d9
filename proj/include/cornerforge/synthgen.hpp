#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>

#include <json.hpp>

namespace cornerforge {

struct PlantedCounts {
    int traffic_jam = 0;
    int rain_text = 0;
    int rain_misspelled = 0;
    int negated_rain = 0;
    int night_oncoming = 0;
    int traffic_cones = 0;

    bool operator==(const PlantedCounts&) const = default;
};

enum class DetectorKind { Perfect, Null, Degraded };

struct DetectorSpec {
    DetectorKind kind = DetectorKind::Perfect;
    double drop_fraction = 0.0; // degraded: drop exactly floor(p * N) annotations
    double jitter_max_m = 0.0;  // degraded: xy jitter radius for kept detections

    bool operator==(const DetectorSpec&) const = default;
};

struct SynthSpec {
    std::uint64_t seed = 0;
    int n_scenes = 0;
    int samples_per_scene = 1;
    int background_density = 0; // annotations per ordinary sample
    PlantedCounts planted;
    DetectorSpec detector;

    bool operator==(const SynthSpec&) const = default;
};

SynthSpec synth_spec_from_json(const nlohmann::json& document);

struct KindLog {
    std::set<std::string> scene_ids;
    std::set<std::string> sample_ids;
    std::set<std::string> annotation_ids;

    bool operator==(const KindLog&) const = default;
};

// Ground truth about what was planted where; the oracle for extraction and
// detector-endpoint tests.
struct PlantLog {
    std::map<std::string, KindLog> kinds; // keyed by scenario kind name
    std::set<std::string> dropped_annotation_ids;

    bool operator==(const PlantLog&) const = default;
};

nlohmann::json plantlog_to_json(const PlantLog& log);
PlantLog plantlog_from_json(const nlohmann::json& document);

struct SynthOutput {
    nlohmann::json dataset;
    nlohmann::json detections;
    PlantLog plantlog;
};

// Byte-identical output for identical specs.
SynthOutput generate(const SynthSpec& spec);

} // namespace cornerforge
