#include "cornerforge/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <vector>

#include "cornerforge/error.hpp"
#include "cornerforge/log.hpp"

namespace cornerforge {

namespace {

constexpr double kPi = 3.14159265358979323846;

// mt19937_64 output is standardized; the mappings below are hand-rolled so
// generated bytes are identical across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    int uniform_int(int lo, int hi) { // inclusive bounds
        return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1));
    }

    double uniform(double lo, double hi) { // [lo, hi)
        const double unit = static_cast<double>(next() >> 11) * 0x1.0p-53;
        return lo + (hi - lo) * unit;
    }

    template <typename T>
    void shuffle(std::vector<T>& values) {
        for (std::size_t i = values.size(); i > 1; --i) {
            const std::size_t j = next() % i;
            std::swap(values[i - 1], values[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

double wrap_angle(double angle) {
    angle = std::fmod(angle, 2.0 * kPi);
    if (angle <= -kPi) angle += 2.0 * kPi;
    if (angle > kPi) angle -= 2.0 * kPi;
    return angle;
}

// (-pi, pi] exactly: uniform(0, 2pi) is [0, 2pi), so pi - draw stays in range.
double random_heading(Rng& rng) { return kPi - rng.uniform(0.0, 2.0 * kPi); }

struct LabelShape {
    const char* label;
    double w, l, h;
};

constexpr LabelShape kBackgroundShapes[] = {
    {"car", 1.9, 4.5, 1.6},        {"car", 1.9, 4.5, 1.6},  {"car", 1.9, 4.5, 1.6},
    {"truck", 2.5, 8.0, 3.0},      {"bus", 2.9, 11.0, 3.3}, {"pedestrian", 0.6, 0.6, 1.7},
    {"pedestrian", 0.6, 0.6, 1.7}, {"barrier", 2.5, 0.5, 1.0},
};
constexpr LabelShape kVehicleShapes[] = {
    {"car", 1.9, 4.5, 1.6}, {"truck", 2.5, 8.0, 3.0}, {"bus", 2.9, 11.0, 3.3}};
constexpr LabelShape kPedestrianShape{"pedestrian", 0.6, 0.6, 1.7};
constexpr LabelShape kConeShape{"traffic_cone", 0.3, 0.3, 0.7};

// Fixed descriptions; their vocabulary is audited against the fixture
// keywords so fuzzy matching cannot leak across scenario kinds.
const char* scene_description(const std::string& kind, int scene_index) {
    if (kind == "traffic_jam") return "dense traffic jam during the evening commute";
    if (kind == "rain_text") return "heavy rain on the highway";
    if (kind == "rain_misspelled") return "heavy raim during the drive";
    if (kind == "negated_rain") return "no rain and a clear view";
    if (kind == "night_oncoming") return "night drive with oncoming traffic glare";
    if (kind == "traffic_cones") return "construction zone with traffic cones on the street";
    static const char* backgrounds[] = {
        "city traffic flows smoothly",
        "calm suburban street with parked cars",
        "usual highway drive in the afternoon",
        "quiet crossing at a junction",
    };
    return backgrounds[scene_index % 4];
}

struct Emitter {
    nlohmann::json& annotations;
    const std::string& sample_id;
    Rng& rng;
    int next_index = 0;

    // Grid placement keeps every pair of annotation centers in a sample at
    // least 2 m apart, so a <= 0.2 m detector jitter can never flip the
    // optimal assignment away from the identity.
    std::string emit(const LabelShape& shape, double heading) {
        const int col = next_index % 6;
        const int row = next_index / 6;
        ++next_index;
        char id[64];
        std::snprintf(id, sizeof(id), "%s_a%02d", sample_id.c_str(), next_index - 1);
        nlohmann::json entry;
        entry["id"] = id;
        entry["sample_id"] = sample_id;
        entry["label"] = shape.label;
        entry["center"] = nlohmann::json::array({6.0 + 4.0 * col + rng.uniform(-1.0, 1.0),
                                                 -10.0 + 4.0 * row + rng.uniform(-1.0, 1.0),
                                                 shape.h / 2.0});
        entry["size"] = nlohmann::json::array({shape.w, shape.l, shape.h});
        entry["heading"] = heading;
        annotations.push_back(std::move(entry));
        return id;
    }
};

} // namespace

SynthSpec synth_spec_from_json(const nlohmann::json& document) {
    if (!document.is_object()) {
        throw Error::validation("Malformed", "synth spec must be a JSON object");
    }
    auto require_int = [&](const nlohmann::json& object, const char* key) {
        if (!object.contains(key) || !object[key].is_number_integer()) {
            throw Error::validation("Malformed", std::string("synth spec: missing integer '") + key + "'");
        }
        return object[key].get<std::int64_t>();
    };

    SynthSpec spec;
    spec.seed = static_cast<std::uint64_t>(require_int(document, "seed"));
    spec.n_scenes = static_cast<int>(require_int(document, "n_scenes"));
    spec.samples_per_scene =
        document.contains("samples_per_scene") ? static_cast<int>(require_int(document, "samples_per_scene")) : 4;
    spec.background_density = static_cast<int>(require_int(document, "background_density"));
    if (!document.contains("planted") || !document["planted"].is_object()) {
        throw Error::validation("Malformed", "synth spec: missing planted counts");
    }
    const nlohmann::json& planted = document["planted"];
    auto planted_count = [&](const char* key) {
        return planted.contains(key) ? static_cast<int>(require_int(planted, key)) : 0;
    };
    spec.planted.traffic_jam = planted_count("traffic_jam");
    spec.planted.rain_text = planted_count("rain_text");
    spec.planted.rain_misspelled = planted_count("rain_misspelled");
    spec.planted.negated_rain = planted_count("negated_rain");
    spec.planted.night_oncoming = planted_count("night_oncoming");
    spec.planted.traffic_cones = planted_count("traffic_cones");

    if (!document.contains("detector") || !document["detector"].is_object()) {
        throw Error::validation("Malformed", "synth spec: missing detector");
    }
    const nlohmann::json& detector = document["detector"];
    const std::string kind = detector.contains("kind") && detector["kind"].is_string()
                                 ? detector["kind"].get<std::string>()
                                 : "";
    if (kind == "perfect") {
        spec.detector.kind = DetectorKind::Perfect;
    } else if (kind == "null") {
        spec.detector.kind = DetectorKind::Null;
    } else if (kind == "degraded") {
        spec.detector.kind = DetectorKind::Degraded;
    } else {
        throw Error::validation("Malformed", "synth spec: detector kind must be perfect|null|degraded");
    }
    if (detector.contains("drop_fraction")) {
        spec.detector.drop_fraction = detector["drop_fraction"].get<double>();
    }
    if (detector.contains("jitter_max_m")) {
        spec.detector.jitter_max_m = detector["jitter_max_m"].get<double>();
    }
    return spec;
}

SynthOutput generate(const SynthSpec& spec) {
    if (spec.n_scenes < 1 || spec.samples_per_scene < 1 || spec.background_density < 0) {
        throw Error::validation("InfeasibleSpec", "scene, sample, and density counts must be positive");
    }
    const int planted_total = spec.planted.traffic_jam + spec.planted.rain_text +
                              spec.planted.rain_misspelled + spec.planted.negated_rain +
                              spec.planted.night_oncoming + spec.planted.traffic_cones;
    if (spec.planted.traffic_jam < 0 || spec.planted.rain_text < 0 || spec.planted.rain_misspelled < 0 ||
        spec.planted.negated_rain < 0 || spec.planted.night_oncoming < 0 ||
        spec.planted.traffic_cones < 0) {
        throw Error::validation("InfeasibleSpec", "planted counts must be non-negative");
    }
    if (planted_total > spec.n_scenes) {
        throw Error::validation("InfeasibleSpec", "planted scenario counts exceed the scene count");
    }
    if (!(spec.detector.drop_fraction >= 0.0 && spec.detector.drop_fraction <= 1.0)) {
        throw Error::validation("InfeasibleSpec", "drop_fraction must lie in [0, 1]");
    }
    if (spec.detector.jitter_max_m < 0.0) {
        throw Error::validation("InfeasibleSpec", "jitter_max_m must be >= 0");
    }
    if (spec.detector.kind == DetectorKind::Degraded && spec.detector.jitter_max_m >= 0.5) {
        log::warn("detector jitter reaches the matching gate; dropped-annotation counts may not "
                  "equal FN counts");
    }

    Rng rng(spec.seed);

    std::vector<std::string> kinds;
    auto plant = [&](const char* kind, int count) {
        for (int i = 0; i < count; ++i) kinds.emplace_back(kind);
    };
    plant("traffic_jam", spec.planted.traffic_jam);
    plant("rain_text", spec.planted.rain_text);
    plant("rain_misspelled", spec.planted.rain_misspelled);
    plant("negated_rain", spec.planted.negated_rain);
    plant("night_oncoming", spec.planted.night_oncoming);
    plant("traffic_cones", spec.planted.traffic_cones);
    while (static_cast<int>(kinds.size()) < spec.n_scenes) kinds.emplace_back("background");
    rng.shuffle(kinds);

    SynthOutput output;
    output.dataset["version"] = "1";
    nlohmann::json& scenes = output.dataset["scenes"] = nlohmann::json::array();
    nlohmann::json& samples = output.dataset["samples"] = nlohmann::json::array();
    nlohmann::json& annotations = output.dataset["annotations"] = nlohmann::json::array();
    for (const char* kind : {"traffic_jam", "rain_text", "rain_misspelled", "negated_rain",
                             "night_oncoming", "traffic_cones"}) {
        output.plantlog.kinds.emplace(kind, KindLog{});
    }

    std::int64_t timestamp = 1'500'000'000'000'000;
    for (int scene_index = 0; scene_index < spec.n_scenes; ++scene_index) {
        const std::string& kind = kinds[static_cast<std::size_t>(scene_index)];
        char scene_id[32];
        std::snprintf(scene_id, sizeof(scene_id), "scene_%04d", scene_index);
        scenes.push_back({{"id", scene_id},
                          {"description_text", scene_description(kind, scene_index)},
                          {"split", "val"}});

        KindLog* log_entry = kind == "background" ? nullptr : &output.plantlog.kinds.at(kind);
        if (log_entry != nullptr) log_entry->scene_ids.insert(scene_id);

        for (int sample_index = 0; sample_index < spec.samples_per_scene; ++sample_index) {
            char sample_id[48];
            std::snprintf(sample_id, sizeof(sample_id), "%s_s%02d", scene_id, sample_index);
            timestamp += 500000;

            const bool jam = kind == "traffic_jam";
            const double speed = jam ? rng.uniform(0.2, 5.0) : rng.uniform(8.0, 15.0);
            const double ego_heading = random_heading(rng);
            samples.push_back({{"id", sample_id},
                               {"scene_id", scene_id},
                               {"timestamp", timestamp},
                               {"ego", {{"speed", speed}, {"heading", ego_heading}}}});
            if (log_entry != nullptr) log_entry->sample_ids.insert(sample_id);

            const std::string sample_id_str = sample_id;
            Emitter emit{annotations, sample_id_str, rng};
            std::vector<std::string> sample_annotation_ids;
            std::vector<std::string> cone_annotation_ids;

            if (jam) {
                for (int i = 0; i < 12; ++i) {
                    const LabelShape& shape = kVehicleShapes[rng.uniform_int(0, 2)];
                    const double heading = wrap_angle(ego_heading + rng.uniform(-0.6, 0.6));
                    sample_annotation_ids.push_back(emit.emit(shape, heading));
                }
                for (int i = 0; i < 2; ++i) {
                    sample_annotation_ids.push_back(emit.emit(kPedestrianShape, random_heading(rng)));
                }
            } else {
                for (int i = 0; i < spec.background_density; ++i) {
                    const LabelShape& shape = kBackgroundShapes[rng.uniform_int(0, 7)];
                    sample_annotation_ids.push_back(emit.emit(shape, random_heading(rng)));
                }
                if (kind == "night_oncoming") {
                    const double heading = wrap_angle(ego_heading + kPi);
                    sample_annotation_ids.push_back(emit.emit(kVehicleShapes[0], heading));
                }
                if (kind == "traffic_cones") {
                    const int cones = rng.uniform_int(2, 3);
                    for (int i = 0; i < cones; ++i) {
                        cone_annotation_ids.push_back(emit.emit(kConeShape, 0.0));
                    }
                }
            }

            if (log_entry != nullptr) {
                // The cone metric targets cone annotations only; every other
                // planted kind flags the whole sample.
                if (kind == "traffic_cones") {
                    log_entry->annotation_ids.insert(cone_annotation_ids.begin(),
                                                     cone_annotation_ids.end());
                } else {
                    log_entry->annotation_ids.insert(sample_annotation_ids.begin(),
                                                     sample_annotation_ids.end());
                }
            }
        }
    }

    output.detections["version"] = "1";
    nlohmann::json& detections = output.detections["detections"] = nlohmann::json::array();
    if (spec.detector.kind != DetectorKind::Null) {
        std::vector<char> dropped(annotations.size(), 0);
        if (spec.detector.kind == DetectorKind::Degraded) {
            const auto drop_count = static_cast<std::size_t>(
                std::floor(spec.detector.drop_fraction * static_cast<double>(annotations.size())));
            std::vector<std::size_t> order(annotations.size());
            for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
            rng.shuffle(order);
            for (std::size_t i = 0; i < drop_count; ++i) {
                dropped[order[i]] = 1;
                output.plantlog.dropped_annotation_ids.insert(
                    annotations[order[i]]["id"].get<std::string>());
            }
        }
        for (std::size_t i = 0; i < annotations.size(); ++i) {
            if (dropped[i]) continue;
            const nlohmann::json& annotation = annotations[i];
            double x = annotation["center"][0].get<double>();
            double y = annotation["center"][1].get<double>();
            double score = 0.9;
            if (spec.detector.kind == DetectorKind::Degraded) {
                const double angle = rng.uniform(0.0, 2.0 * kPi);
                const double radius = spec.detector.jitter_max_m * std::sqrt(rng.uniform(0.0, 1.0));
                x += radius * std::cos(angle);
                y += radius * std::sin(angle);
                score = rng.uniform(0.5, 1.0);
            }
            detections.push_back({{"id", "det_" + annotation["id"].get<std::string>()},
                                  {"sample_id", annotation["sample_id"]},
                                  {"label", annotation["label"]},
                                  {"center", nlohmann::json::array(
                                                 {x, y, annotation["center"][2].get<double>()})},
                                  {"score", score}});
        }
    }
    return output;
}

nlohmann::json plantlog_to_json(const PlantLog& log) {
    nlohmann::json document;
    document["version"] = "1";
    document["kinds"] = nlohmann::json::object();
    for (const auto& [kind, entry] : log.kinds) {
        document["kinds"][kind] = {{"scene_ids", entry.scene_ids},
                                   {"sample_ids", entry.sample_ids},
                                   {"annotation_ids", entry.annotation_ids}};
    }
    document["dropped_annotation_ids"] = log.dropped_annotation_ids;
    return document;
}

PlantLog plantlog_from_json(const nlohmann::json& document) {
    if (!document.is_object() || !document.contains("version") || document["version"] != "1") {
        throw Error::validation("VersionMismatch", "unsupported plant log version");
    }
    PlantLog log;
    for (const auto& [kind, entry] : document.at("kinds").items()) {
        KindLog kind_log;
        for (const nlohmann::json& id : entry.at("scene_ids")) {
            kind_log.scene_ids.insert(id.get<std::string>());
        }
        for (const nlohmann::json& id : entry.at("sample_ids")) {
            kind_log.sample_ids.insert(id.get<std::string>());
        }
        for (const nlohmann::json& id : entry.at("annotation_ids")) {
            kind_log.annotation_ids.insert(id.get<std::string>());
        }
        log.kinds.emplace(kind, std::move(kind_log));
    }
    for (const nlohmann::json& id : document.at("dropped_annotation_ids")) {
        log.dropped_annotation_ids.insert(id.get<std::string>());
    }
    return log;
}

} // namespace cornerforge
