#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <unistd.h>

#include <json.hpp>

// Shared helpers for the test binaries. CF_FIXTURES_DIR and (for the CLI
// tests) CF_BINARY_PATH are injected by CMake.

namespace testsupport {

inline std::filesystem::path fixtures_dir() { return std::filesystem::path(CF_FIXTURES_DIR); }

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

inline std::string fixture_text(const std::string& name) { return read_file(fixtures_dir() / name); }

inline nlohmann::json fixture_json(const std::string& name) {
    return nlohmann::json::parse(fixture_text(name));
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

// Self-deleting scratch directory, unique per instance within the process.
struct TempDir {
    std::filesystem::path path;

    TempDir() {
        static std::atomic<int> counter{0};
        path = std::filesystem::temp_directory_path() /
               ("cornerforge_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter.fetch_add(1)));
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
};

// Minimal dataset-document builders; center/size are [x, y, z] arrays.
inline nlohmann::json jscene(const std::string& id, const std::string& text,
                             const std::string& split = "val") {
    return {{"id", id}, {"description_text", text}, {"split", split}};
}

inline nlohmann::json jsample(const std::string& id, const std::string& scene_id,
                              long long timestamp, double speed, double heading) {
    return {{"id", id},
            {"scene_id", scene_id},
            {"timestamp", timestamp},
            {"ego", {{"speed", speed}, {"heading", heading}}}};
}

inline nlohmann::json jann(const std::string& id, const std::string& sample_id,
                           const std::string& label, double x, double y, double heading = 0.0) {
    return {{"id", id},          {"sample_id", sample_id},
            {"label", label},    {"center", {x, y, 0.8}},
            {"size", {2.0, 4.5, 1.6}}, {"heading", heading}};
}

inline nlohmann::json jdataset(nlohmann::json scenes, nlohmann::json samples,
                               nlohmann::json annotations) {
    return {{"version", "1"},
            {"scenes", std::move(scenes)},
            {"samples", std::move(samples)},
            {"annotations", std::move(annotations)}};
}

inline nlohmann::json jdet(const std::string& id, const std::string& sample_id,
                           const std::string& label, double x, double y, double score = 0.9) {
    return {{"id", id},
            {"sample_id", sample_id},
            {"label", label},
            {"center", {x, y, 0.8}},
            {"score", score}};
}

inline nlohmann::json jdetections(nlohmann::json detections) {
    return {{"version", "1"}, {"detections", std::move(detections)}};
}

} // namespace testsupport
