#include "cornerforge/io.hpp"

#include <fstream>
#include <sstream>

#include "cornerforge/error.hpp"

namespace cornerforge::io {

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in.is_open()) {
        throw Error::io("FileNotFound", "cannot open " + path);
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad()) {
        throw Error::io("ReadFailed", "error while reading " + path);
    }
    return buffer.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out.is_open()) {
        throw Error::io("WriteFailed", "cannot open " + path + " for writing");
    }
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out.good()) {
        throw Error::io("WriteFailed", "error while writing " + path);
    }
}

nlohmann::json parse_json(const std::string& text, const std::string& context) {
    nlohmann::json document = nlohmann::json::parse(text, nullptr, false);
    if (document.is_discarded()) {
        throw Error::validation("Malformed", context + " is not valid JSON");
    }
    return document;
}

nlohmann::json load_json_file(const std::string& path) {
    return parse_json(read_text_file(path), path);
}

std::string dump_json(const nlohmann::json& document) {
    return document.dump(2) + "\n";
}

void write_json_file(const std::string& path, const nlohmann::json& document) {
    write_text_file(path, dump_json(document));
}

} // namespace cornerforge::io
