#include "cornerforge/taxonomy.hpp"

#include <algorithm>
#include <cctype>

#include "cornerforge/error.hpp"

namespace cornerforge {

namespace {

std::string lower(std::string_view text) {
    std::string out(text);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string_view trim(std::string_view text) {
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
    return text;
}

Level parse_level_token(std::string_view text) {
    const std::string t = lower(trim(text));
    if (t == "physical") return Level::Physical;
    if (t == "hardware") return Level::Hardware;
    if (t == "domain") return Level::Domain;
    if (t == "object") return Level::Object;
    if (t == "scene") return Level::Scene;
    throw Error::validation("UnknownToken", "unknown level '" + std::string(text) + "'");
}

SubLevel parse_sublevel_token(std::string_view text) {
    const std::string t = lower(trim(text));
    if (t == "global outlier") return SubLevel::GlobalOutlier;
    if (t == "local outlier") return SubLevel::LocalOutlier;
    if (t == "collective") return SubLevel::Collective;
    if (t == "contextual") return SubLevel::Contextual;
    throw Error::validation("UnknownToken", "unknown sublevel '" + std::string(text) + "'");
}

} // namespace

std::string to_string(Layer layer) {
    return layer == Layer::Sensor ? "Sensor" : "Content";
}

std::string to_string(Level level) {
    switch (level) {
    case Level::Physical: return "Physical";
    case Level::Hardware: return "Hardware";
    case Level::Domain: return "Domain";
    case Level::Object: return "Object";
    case Level::Scene: return "Scene";
    }
    return "?";
}

std::string to_string(SubLevel sublevel) {
    switch (sublevel) {
    case SubLevel::GlobalOutlier: return "Global Outlier";
    case SubLevel::LocalOutlier: return "Local Outlier";
    case SubLevel::Collective: return "Collective";
    case SubLevel::Contextual: return "Contextual";
    }
    return "?";
}

std::string to_string(FusionStage fusion) {
    return fusion == FusionStage::Single ? "Single" : "Multi";
}

Layer parse_layer(std::string_view text) {
    const std::string t = lower(trim(text));
    if (t == "sensor") return Layer::Sensor;
    if (t == "content") return Layer::Content;
    if (t == "temporal" || t == "method") {
        throw Error::validation("OutOfScopeLayer",
                                "layer '" + std::string(trim(text)) + "' is out of scope");
    }
    throw Error::validation("UnknownToken", "unknown layer '" + std::string(text) + "'");
}

FusionStage parse_fusion(std::string_view text) {
    const std::string t = lower(trim(text));
    if (t == "single") return FusionStage::Single;
    if (t == "multi") return FusionStage::Multi;
    throw Error::validation("UnknownToken", "unknown fusion stage '" + std::string(text) + "'");
}

bool level_legal_under(Layer layer, Level level) {
    if (layer == Layer::Sensor) {
        return level == Level::Physical || level == Level::Hardware;
    }
    return level == Level::Domain || level == Level::Object || level == Level::Scene;
}

bool sublevel_legal_under(Level level, SubLevel sublevel) {
    if (level == Level::Physical || level == Level::Hardware) {
        return sublevel == SubLevel::GlobalOutlier || sublevel == SubLevel::LocalOutlier;
    }
    if (level == Level::Scene) {
        return sublevel == SubLevel::Collective || sublevel == SubLevel::Contextual;
    }
    return false;
}

Classification Classification::make(Layer layer, Level level, std::optional<SubLevel> sublevel) {
    if (!level_legal_under(layer, level)) {
        throw Error::validation("IllegalCombination",
                                "level " + cornerforge::to_string(level) + " is not legal under layer " +
                                    cornerforge::to_string(layer));
    }
    if (sublevel.has_value() && !sublevel_legal_under(level, *sublevel)) {
        throw Error::validation("IllegalCombination",
                                "sublevel " + cornerforge::to_string(*sublevel) + " is not legal under level " +
                                    cornerforge::to_string(level));
    }
    return {layer, level, sublevel};
}

std::string Classification::level_string() const {
    std::string out = cornerforge::to_string(level_);
    if (sublevel_.has_value()) {
        out += " - ";
        out += cornerforge::to_string(*sublevel_);
    }
    return out;
}

std::string Classification::to_string() const {
    return cornerforge::to_string(layer_) + "/" + level_string();
}

Classification parse_classification(std::string_view layer_text, std::string_view level_text) {
    if (trim(layer_text).empty() || trim(level_text).empty()) {
        throw Error::validation("UnknownToken", "empty layer or level text");
    }
    const Layer layer = parse_layer(layer_text);
    std::optional<SubLevel> sublevel;
    std::string_view level_part = level_text;
    if (const auto separator = level_text.find(" - "); separator != std::string_view::npos) {
        level_part = level_text.substr(0, separator);
        sublevel = parse_sublevel_token(level_text.substr(separator + 3));
    }
    return Classification::make(layer, parse_level_token(level_part), sublevel);
}

namespace {

unsigned bit_of(SensorSource source) {
    switch (source) {
    case SensorSource::Radar: return 1u;
    case SensorSource::Video: return 2u;
    case SensorSource::Lidar: return 4u;
    }
    return 0u;
}

} // namespace

SensorSources::SensorSources(std::initializer_list<SensorSource> members) {
    for (SensorSource member : members) bits_ |= bit_of(member);
    if (bits_ == 0) {
        throw Error::validation("EmptySet", "sensor source set must be non-empty");
    }
}

SensorSources SensorSources::parse(std::string_view text) {
    unsigned bits = 0;
    std::size_t start = 0;
    const std::string body{trim(text)};
    while (start <= body.size()) {
        std::size_t end = body.find('/', start);
        if (end == std::string::npos) end = body.size();
        const std::string token = lower(trim(std::string_view(body).substr(start, end - start)));
        if (!token.empty()) {
            if (token == "r") {
                bits |= bit_of(SensorSource::Radar);
            } else if (token == "v") {
                bits |= bit_of(SensorSource::Video);
            } else if (token == "l") {
                bits |= bit_of(SensorSource::Lidar);
            } else {
                throw Error::validation("UnknownToken", "unknown sensor source '" + token + "'");
            }
        }
        if (end == body.size()) break;
        start = end + 1;
    }
    if (bits == 0) {
        throw Error::validation("EmptySet", "sensor source list '" + std::string(text) + "' is empty");
    }
    return SensorSources(bits);
}

bool SensorSources::contains(SensorSource source) const {
    return (bits_ & bit_of(source)) != 0;
}

std::string SensorSources::to_string() const {
    std::string out;
    for (SensorSource source : {SensorSource::Radar, SensorSource::Video, SensorSource::Lidar}) {
        if (!contains(source)) continue;
        if (!out.empty()) out += '/';
        out += source == SensorSource::Radar ? "R" : source == SensorSource::Video ? "V" : "L";
    }
    return out;
}

} // namespace cornerforge
