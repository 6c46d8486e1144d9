#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "cornerforge/metrics.hpp"
#include "cornerforge/ontology.hpp"

namespace cornerforge {

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    bool operator==(const Vec3&) const = default;
};

// A 20-second recorded segment with its informal description.
struct Scene {
    std::string id;
    std::string description_text;
    std::string split; // "train" or "val"

    bool operator==(const Scene&) const = default;
};

struct EgoState {
    double speed = 0.0;   // m/s, >= 0
    double heading = 0.0; // rad in (-pi, pi]

    bool operator==(const EgoState&) const = default;
};

// One annotated frame.
struct Sample {
    std::string id;
    std::string scene_id;
    std::int64_t timestamp = 0; // microseconds
    EgoState ego;

    bool operator==(const Sample&) const = default;
};

// One labeled 3D box.
struct Annotation {
    std::string id;
    std::string sample_id;
    std::string label; // dataset vocabulary
    Vec3 center;       // meters
    Vec3 size;         // (w, l, h) meters, strictly positive
    double heading = 0.0;
    std::map<std::string, std::string> attributes;

    bool operator==(const Annotation&) const = default;
};

class DatasetIndex {
public:
    static DatasetIndex load(const nlohmann::json& document);
    nlohmann::json to_json() const;

    const std::vector<Scene>& scenes() const { return scenes_; }
    const std::vector<Sample>& samples() const { return samples_; }
    const std::vector<Annotation>& annotations() const { return annotations_; }

    const Scene* find_scene(const std::string& id) const;
    const Sample* find_sample(const std::string& id) const;
    const Annotation* find_annotation(const std::string& id) const;

    // Sample indices of a scene sorted by timestamp; annotation indices of a
    // sample sorted by id. Indices address the vectors above.
    const std::vector<std::size_t>& samples_of(const std::string& scene_id) const;
    const std::vector<std::size_t>& annotations_of(const std::string& sample_id) const;

private:
    void build_indexes();

    std::vector<Scene> scenes_;           // sorted by id
    std::vector<Sample> samples_;         // sorted by id
    std::vector<Annotation> annotations_; // sorted by id
    std::map<std::string, std::size_t> scene_by_id_;
    std::map<std::string, std::size_t> sample_by_id_;
    std::map<std::string, std::size_t> annotation_by_id_;
    std::map<std::string, std::vector<std::size_t>> samples_of_scene_;
    std::map<std::string, std::vector<std::size_t>> annotations_of_sample_;
};

// Ontology class -> dataset label strings, with subclass closure: a class
// without a direct entry resolves through its nearest mapped ancestor.
class LabelMapping {
public:
    static LabelMapping load(const nlohmann::json& document, const CornerCaseOntology& ontology,
                             const MetricsFile& metrics);

    // Direct entry if present, else the nearest mapped ancestor's labels.
    const std::set<std::string>& resolve_labels(const std::string& ontology_class) const;

    // Labels answering "is this annotation a <class>?": union of
    // resolve_labels over the class and all its descendants.
    const std::set<std::string>& query_labels(const std::string& ontology_class) const;

    // Attribute-name remapping; identity for unmapped names.
    const std::string& resolve_attribute(const std::string& name) const;

private:
    std::map<std::string, std::set<std::string>> resolved_;
    std::map<std::string, std::set<std::string>> query_;
    std::map<std::string, std::string> attribute_remap_;
};

} // namespace cornerforge
