#pragma once

#include <compare>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>

namespace cornerforge {

// Corner-case classification vocabulary. Two layers; each level is legal only
// under one layer, and sublevels only under specific levels:
//   Sensor  -> Physical | Hardware   (sublevel: Global Outlier | Local Outlier)
//   Content -> Domain | Object | Scene (Scene sublevel: Collective | Contextual)
// Sublevels are optional everywhere they are legal; Domain and Object never
// carry one. Temporal and Method layers are rejected as out of scope.

enum class Layer { Sensor, Content };
enum class Level { Physical, Hardware, Domain, Object, Scene };
enum class SubLevel { GlobalOutlier, LocalOutlier, Collective, Contextual };
enum class SensorSource { Radar, Video, Lidar };
enum class FusionStage { Single, Multi };

std::string to_string(Layer layer);
std::string to_string(Level level);
std::string to_string(SubLevel sublevel);
std::string to_string(FusionStage fusion);

Layer parse_layer(std::string_view text);
FusionStage parse_fusion(std::string_view text);

bool level_legal_under(Layer layer, Level level);
bool sublevel_legal_under(Level level, SubLevel sublevel);

class Classification {
public:
    // Throws IllegalCombination for a (layer, level, sublevel) triple outside
    // the legality rules above.
    static Classification make(Layer layer, Level level,
                               std::optional<SubLevel> sublevel = std::nullopt);

    Layer layer() const { return layer_; }
    Level level() const { return level_; }
    const std::optional<SubLevel>& sublevel() const { return sublevel_; }

    // Canonical forms: level_string() is "Physical - Global Outlier",
    // to_string() is "Sensor/Physical - Global Outlier".
    std::string level_string() const;
    std::string to_string() const;

    auto operator<=>(const Classification&) const = default;

private:
    Classification(Layer layer, Level level, std::optional<SubLevel> sublevel)
        : layer_(layer), level_(level), sublevel_(sublevel) {}

    Layer layer_;
    Level level_;
    std::optional<SubLevel> sublevel_;
};

// level_text may carry a " - " separated sublevel ("Physical - Global Outlier").
// Parsing is case-insensitive; serialization is the canonical capitalized form.
Classification parse_classification(std::string_view layer_text, std::string_view level_text);

// Non-empty subset of {Radar, Video, Lidar}, written "R/V/L".
class SensorSources {
public:
    SensorSources(std::initializer_list<SensorSource> members);

    // Slash-separated tokens from {R, V, L}, case-insensitive, order-insensitive.
    static SensorSources parse(std::string_view text);

    bool contains(SensorSource source) const;
    std::string to_string() const;

    auto operator<=>(const SensorSources&) const = default;

private:
    explicit SensorSources(unsigned bits) : bits_(bits) {}
    unsigned bits_ = 0;
};

} // namespace cornerforge
