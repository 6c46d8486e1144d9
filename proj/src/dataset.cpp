#include "cornerforge/dataset.hpp"

#include <algorithm>
#include <cmath>

#include "cornerforge/error.hpp"

namespace cornerforge {

namespace {

constexpr double kPi = 3.14159265358979323846;

const nlohmann::json& require_field(const nlohmann::json& object, const char* key,
                                    const std::string& context) {
    const auto it = object.find(key);
    if (it == object.end()) {
        throw Error::validation("Malformed", context + ": missing field '" + key + "'");
    }
    return *it;
}

std::string require_string(const nlohmann::json& object, const char* key, const std::string& context) {
    const nlohmann::json& value = require_field(object, key, context);
    if (!value.is_string()) {
        throw Error::validation("Malformed", context + ": field '" + key + "' must be a string");
    }
    return value.get<std::string>();
}

double require_number(const nlohmann::json& object, const char* key, const std::string& context) {
    const nlohmann::json& value = require_field(object, key, context);
    if (!value.is_number()) {
        throw Error::validation("Malformed", context + ": field '" + key + "' must be a number");
    }
    return value.get<double>();
}

Vec3 require_vec3(const nlohmann::json& object, const char* key, const std::string& context) {
    const nlohmann::json& value = require_field(object, key, context);
    if (!value.is_array() || value.size() != 3 ||
        !std::all_of(value.begin(), value.end(),
                     [](const nlohmann::json& v) { return v.is_number(); })) {
        throw Error::validation("Malformed", context + ": field '" + key + "' must be [x, y, z]");
    }
    return {value[0].get<double>(), value[1].get<double>(), value[2].get<double>()};
}

nlohmann::json vec3_to_json(const Vec3& v) { return nlohmann::json::array({v.x, v.y, v.z}); }

} // namespace

DatasetIndex DatasetIndex::load(const nlohmann::json& document) {
    if (!document.is_object()) {
        throw Error::validation("Malformed", "dataset document must be a JSON object");
    }
    const std::string version = require_string(document, "version", "dataset");
    if (version != "1") {
        throw Error::validation("VersionMismatch", "unsupported dataset version '" + version + "'");
    }

    DatasetIndex index;
    for (const nlohmann::json& entry : require_field(document, "scenes", "dataset")) {
        Scene scene;
        scene.id = require_string(entry, "id", "scene");
        scene.description_text =
            entry.contains("description_text") ? require_string(entry, "description_text", "scene") : "";
        scene.split = require_string(entry, "split", "scene " + scene.id);
        if (scene.split != "train" && scene.split != "val") {
            throw Error::validation("Malformed",
                                    "scene " + scene.id + ": split must be 'train' or 'val'");
        }
        index.scenes_.push_back(std::move(scene));
    }
    for (const nlohmann::json& entry : require_field(document, "samples", "dataset")) {
        Sample sample;
        sample.id = require_string(entry, "id", "sample");
        sample.scene_id = require_string(entry, "scene_id", "sample " + sample.id);
        const nlohmann::json& timestamp = require_field(entry, "timestamp", "sample " + sample.id);
        if (!timestamp.is_number_integer()) {
            throw Error::validation("Malformed", "sample " + sample.id + ": timestamp must be integer");
        }
        sample.timestamp = timestamp.get<std::int64_t>();
        const nlohmann::json& ego = require_field(entry, "ego", "sample " + sample.id);
        sample.ego.speed = require_number(ego, "speed", "sample " + sample.id + " ego");
        sample.ego.heading = require_number(ego, "heading", "sample " + sample.id + " ego");
        if (!(sample.ego.speed >= 0.0)) {
            throw Error::validation("Malformed", "sample " + sample.id + ": ego speed must be >= 0");
        }
        if (!(sample.ego.heading > -kPi && sample.ego.heading <= kPi)) {
            throw Error::validation("Malformed",
                                    "sample " + sample.id + ": ego heading must lie in (-pi, pi]");
        }
        index.samples_.push_back(std::move(sample));
    }
    for (const nlohmann::json& entry : require_field(document, "annotations", "dataset")) {
        Annotation annotation;
        annotation.id = require_string(entry, "id", "annotation");
        const std::string context = "annotation " + annotation.id;
        annotation.sample_id = require_string(entry, "sample_id", context);
        annotation.label = require_string(entry, "label", context);
        annotation.center = require_vec3(entry, "center", context);
        annotation.size = require_vec3(entry, "size", context);
        annotation.heading = require_number(entry, "heading", context);
        if (!(annotation.size.x > 0.0 && annotation.size.y > 0.0 && annotation.size.z > 0.0)) {
            throw Error::validation("Malformed", context + ": size must be strictly positive");
        }
        if (entry.contains("attributes")) {
            const nlohmann::json& attributes = entry["attributes"];
            if (!attributes.is_object()) {
                throw Error::validation("Malformed", context + ": attributes must be an object");
            }
            for (const auto& [key, value] : attributes.items()) {
                if (!value.is_string()) {
                    throw Error::validation("Malformed",
                                            context + ": attribute '" + key + "' must be a string");
                }
                annotation.attributes.emplace(key, value.get<std::string>());
            }
        }
        index.annotations_.push_back(std::move(annotation));
    }

    // Timestamp monotonicity is judged on document order, per scene.
    std::map<std::string, std::int64_t> last_timestamp;
    for (const Sample& sample : index.samples_) {
        const auto it = last_timestamp.find(sample.scene_id);
        if (it != last_timestamp.end() && sample.timestamp <= it->second) {
            throw Error::validation("NonMonotonicTimestamps",
                                    "sample " + sample.id + ": timestamp does not increase within scene " +
                                        sample.scene_id);
        }
        last_timestamp[sample.scene_id] = sample.timestamp;
    }

    std::sort(index.scenes_.begin(), index.scenes_.end(),
              [](const Scene& a, const Scene& b) { return a.id < b.id; });
    std::sort(index.samples_.begin(), index.samples_.end(),
              [](const Sample& a, const Sample& b) { return a.id < b.id; });
    std::sort(index.annotations_.begin(), index.annotations_.end(),
              [](const Annotation& a, const Annotation& b) { return a.id < b.id; });
    index.build_indexes();
    return index;
}

void DatasetIndex::build_indexes() {
    for (std::size_t i = 0; i < scenes_.size(); ++i) {
        if (!scene_by_id_.emplace(scenes_[i].id, i).second) {
            throw Error::validation("DuplicateId", "scene id '" + scenes_[i].id + "' is not unique");
        }
    }
    for (std::size_t i = 0; i < samples_.size(); ++i) {
        const Sample& sample = samples_[i];
        if (!sample_by_id_.emplace(sample.id, i).second) {
            throw Error::validation("DuplicateId", "sample id '" + sample.id + "' is not unique");
        }
        if (!scene_by_id_.contains(sample.scene_id)) {
            throw Error::validation("DanglingReference",
                                    "sample " + sample.id + " references missing scene " + sample.scene_id);
        }
        samples_of_scene_[sample.scene_id].push_back(i);
    }
    for (std::size_t i = 0; i < annotations_.size(); ++i) {
        const Annotation& annotation = annotations_[i];
        if (!annotation_by_id_.emplace(annotation.id, i).second) {
            throw Error::validation("DuplicateId", "annotation id '" + annotation.id + "' is not unique");
        }
        if (!sample_by_id_.contains(annotation.sample_id)) {
            throw Error::validation("DanglingReference", "annotation " + annotation.id +
                                                             " references missing sample " +
                                                             annotation.sample_id);
        }
        annotations_of_sample_[annotation.sample_id].push_back(i);
    }
    for (auto& [scene_id, indices] : samples_of_scene_) {
        std::sort(indices.begin(), indices.end(), [&](std::size_t a, std::size_t b) {
            return samples_[a].timestamp < samples_[b].timestamp;
        });
    }
    // annotations_ is sorted by id, so per-sample index lists already are.
}

nlohmann::json DatasetIndex::to_json() const {
    nlohmann::json document;
    document["version"] = "1";
    document["scenes"] = nlohmann::json::array();
    for (const Scene& scene : scenes_) {
        nlohmann::json entry;
        entry["id"] = scene.id;
        entry["description_text"] = scene.description_text;
        entry["split"] = scene.split;
        document["scenes"].push_back(std::move(entry));
    }
    document["samples"] = nlohmann::json::array();
    for (const Sample& sample : samples_) {
        nlohmann::json entry;
        entry["id"] = sample.id;
        entry["scene_id"] = sample.scene_id;
        entry["timestamp"] = sample.timestamp;
        entry["ego"] = {{"speed", sample.ego.speed}, {"heading", sample.ego.heading}};
        document["samples"].push_back(std::move(entry));
    }
    document["annotations"] = nlohmann::json::array();
    for (const Annotation& annotation : annotations_) {
        nlohmann::json entry;
        entry["id"] = annotation.id;
        entry["sample_id"] = annotation.sample_id;
        entry["label"] = annotation.label;
        entry["center"] = vec3_to_json(annotation.center);
        entry["size"] = vec3_to_json(annotation.size);
        entry["heading"] = annotation.heading;
        if (!annotation.attributes.empty()) {
            entry["attributes"] = annotation.attributes;
        }
        document["annotations"].push_back(std::move(entry));
    }
    return document;
}

const Scene* DatasetIndex::find_scene(const std::string& id) const {
    const auto it = scene_by_id_.find(id);
    return it == scene_by_id_.end() ? nullptr : &scenes_[it->second];
}

const Sample* DatasetIndex::find_sample(const std::string& id) const {
    const auto it = sample_by_id_.find(id);
    return it == sample_by_id_.end() ? nullptr : &samples_[it->second];
}

const Annotation* DatasetIndex::find_annotation(const std::string& id) const {
    const auto it = annotation_by_id_.find(id);
    return it == annotation_by_id_.end() ? nullptr : &annotations_[it->second];
}

namespace {
const std::vector<std::size_t> kNoIndices;
} // namespace

const std::vector<std::size_t>& DatasetIndex::samples_of(const std::string& scene_id) const {
    const auto it = samples_of_scene_.find(scene_id);
    return it == samples_of_scene_.end() ? kNoIndices : it->second;
}

const std::vector<std::size_t>& DatasetIndex::annotations_of(const std::string& sample_id) const {
    const auto it = annotations_of_sample_.find(sample_id);
    return it == annotations_of_sample_.end() ? kNoIndices : it->second;
}

LabelMapping LabelMapping::load(const nlohmann::json& document, const CornerCaseOntology& ontology,
                                const MetricsFile& metrics) {
    if (!document.is_object()) {
        throw Error::validation("Malformed", "mapping document must be a JSON object");
    }
    const std::string version = require_string(document, "version", "mapping");
    if (version != "1") {
        throw Error::validation("VersionMismatch", "unsupported mapping version '" + version + "'");
    }

    std::map<std::string, std::set<std::string>> entries;
    const nlohmann::json& classes = require_field(document, "classes", "mapping");
    if (!classes.is_object()) {
        throw Error::validation("Malformed", "mapping classes must be an object");
    }
    for (const auto& [class_name, labels] : classes.items()) {
        if (!ontology.has_class(class_name)) {
            throw Error::validation("UnknownClass",
                                    "mapping names unknown ontology class '" + class_name + "'");
        }
        if (!labels.is_array() || labels.empty()) {
            throw Error::validation("Malformed",
                                    "mapping for '" + class_name + "' must be a non-empty label array");
        }
        std::set<std::string>& target = entries[class_name];
        for (const nlohmann::json& label : labels) {
            if (!label.is_string() || label.get<std::string>().empty()) {
                throw Error::validation("Malformed",
                                        "mapping for '" + class_name + "' must list non-empty strings");
            }
            target.insert(label.get<std::string>());
        }
    }

    LabelMapping mapping;
    if (document.contains("attributes")) {
        const nlohmann::json& attributes = document["attributes"];
        if (!attributes.is_object()) {
            throw Error::validation("Malformed", "mapping attributes must be an object");
        }
        for (const auto& [name, target] : attributes.items()) {
            if (!target.is_string()) {
                throw Error::validation("Malformed", "attribute remap '" + name + "' must be a string");
            }
            mapping.attribute_remap_.emplace(name, target.get<std::string>());
        }
    }

    // Resolve every ontology class through its nearest mapped ancestor.
    std::map<std::string, std::optional<std::string>> parent;
    for (const OntologyClass& cls : ontology.classes()) parent.emplace(cls.name, cls.parent);
    for (const OntologyClass& cls : ontology.classes()) {
        const std::string* current = &cls.name;
        while (true) {
            const auto entry = entries.find(*current);
            if (entry != entries.end()) {
                mapping.resolved_.emplace(cls.name, entry->second);
                break;
            }
            const std::optional<std::string>& up = parent.at(*current);
            if (!up.has_value()) break; // uncovered class; only an error if a metric needs it
            current = &*up;
        }
    }

    std::set<std::string> missing;
    for (const std::string& required : required_classes(metrics)) {
        if (!ontology.has_class(required)) {
            throw Error::validation("UnknownClass",
                                    "metrics reference unknown ontology class '" + required + "'");
        }
        if (!mapping.resolved_.contains(required)) missing.insert(required);
    }
    if (!missing.empty()) {
        std::string names;
        for (const std::string& name : missing) {
            if (!names.empty()) names += ", ";
            names += name;
        }
        throw Error::validation("MissingMapping", "no mapping covers required class(es): " + names);
    }

    // Query view: a class matches the labels of itself and all descendants.
    for (const OntologyClass& cls : ontology.classes()) {
        std::set<std::string> labels;
        for (const std::string& member : ontology.descendants(cls.name)) {
            const auto it = mapping.resolved_.find(member);
            if (it != mapping.resolved_.end()) labels.insert(it->second.begin(), it->second.end());
        }
        mapping.query_.emplace(cls.name, std::move(labels));
    }
    return mapping;
}

const std::set<std::string>& LabelMapping::resolve_labels(const std::string& ontology_class) const {
    const auto query = query_.find(ontology_class);
    if (query == query_.end()) {
        throw Error::validation("UnknownClass", "unknown ontology class '" + ontology_class + "'");
    }
    const auto it = resolved_.find(ontology_class);
    if (it == resolved_.end()) {
        throw Error::validation("MissingMapping",
                                "no mapping covers class '" + ontology_class + "'");
    }
    return it->second;
}

const std::set<std::string>& LabelMapping::query_labels(const std::string& ontology_class) const {
    const auto it = query_.find(ontology_class);
    if (it == query_.end()) {
        throw Error::validation("UnknownClass", "unknown ontology class '" + ontology_class + "'");
    }
    return it->second;
}

const std::string& LabelMapping::resolve_attribute(const std::string& name) const {
    const auto it = attribute_remap_.find(name);
    return it == attribute_remap_.end() ? name : it->second;
}

} // namespace cornerforge
