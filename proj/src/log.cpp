#include "cornerforge/log.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace cornerforge::log {

namespace {

Level parse_level() {
    const char* env = std::getenv("CORNERFORGE_LOG");
    if (env == nullptr) return Level::Warn;
    if (std::strcmp(env, "debug") == 0) return Level::Debug;
    if (std::strcmp(env, "info") == 0) return Level::Info;
    if (std::strcmp(env, "warn") == 0) return Level::Warn;
    if (std::strcmp(env, "error") == 0) return Level::Error;
    return Level::Warn;
}

const char* tag(Level level) {
    switch (level) {
    case Level::Debug: return "debug";
    case Level::Info: return "info";
    case Level::Warn: return "warn";
    case Level::Error: return "error";
    }
    return "?";
}

} // namespace

Level threshold() {
    static const Level value = parse_level();
    return value;
}

void write(Level level, const std::string& message) {
    if (level < threshold()) return;
    std::fprintf(stderr, "[cornerforge %s] %s\n", tag(level), message.c_str());
}

} // namespace cornerforge::log
