#pragma once

#include <string>

#include <json.hpp>

namespace cornerforge::io {

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

// Throws a validation error naming `context` when the text is not JSON.
nlohmann::json parse_json(const std::string& text, const std::string& context);

nlohmann::json load_json_file(const std::string& path);

// Canonical form: 2-space indent, lexicographic keys, trailing newline.
std::string dump_json(const nlohmann::json& document);
void write_json_file(const std::string& path, const nlohmann::json& document);

} // namespace cornerforge::io
