#include "cornerforge/registry.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <string_view>

#include "cornerforge/error.hpp"

namespace cornerforge {

namespace {

// RFC4180 subset: comma separators, optional double-quoted fields with ""
// escapes, LF or CRLF row ends.
std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;

    if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);

    auto end_field = [&] {
        row.push_back(std::move(field));
        field.clear();
        field_started = false;
    };
    auto end_row = [&] {
        end_field();
        rows.push_back(std::move(row));
        row.clear();
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"' && !field_started) {
            in_quotes = true;
            field_started = true;
        } else if (c == ',') {
            end_field();
        } else if (c == '\n') {
            if (!field.empty() && field.back() == '\r') field.pop_back();
            end_row();
        } else {
            field += c;
            field_started = true;
        }
    }
    if (in_quotes) {
        throw Error::validation("Malformed", "unterminated quoted CSV field");
    }
    if (field_started || !field.empty() || !row.empty()) {
        if (!field.empty() && field.back() == '\r') field.pop_back();
        end_row();
    }
    // Drop rows that are entirely empty (trailing blank lines).
    std::erase_if(rows, [](const std::vector<std::string>& r) {
        return r.size() == 1 && r[0].empty();
    });
    return rows;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

double parse_double_field(std::string_view text, const std::string& column) {
    const std::string_view body = trim(text);
    double value = 0.0;
    const auto result = std::from_chars(body.data(), body.data() + body.size(), value);
    if (result.ec != std::errc() || result.ptr != body.data() + body.size()) {
        throw Error::validation("MalformedValue",
                                "column " + column + ": '" + std::string(text) + "' is not a number");
    }
    return value;
}

struct ColumnIndex {
    std::map<std::string, std::size_t> by_name;

    std::optional<std::size_t> find(const std::string& name) const {
        const auto it = by_name.find(name);
        if (it == by_name.end()) return std::nullopt;
        return it->second;
    }
};

constexpr const char* kRequiredColumns[] = {"id", "description", "cause", "ravioli",
                                            "source", "layer", "level"};
constexpr const char* kOptionalColumns[] = {"scene_ref", "override_attr", "override_min",
                                            "override_max", "override_unit"};

ColumnIndex index_header(const std::vector<std::string>& header) {
    ColumnIndex index;
    for (std::size_t i = 0; i < header.size(); ++i) {
        std::string name{trim(header[i])};
        std::transform(name.begin(), name.end(), name.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        const bool known = std::any_of(std::begin(kRequiredColumns), std::end(kRequiredColumns),
                                       [&](const char* c) { return name == c; }) ||
                           std::any_of(std::begin(kOptionalColumns), std::end(kOptionalColumns),
                                       [&](const char* c) { return name == c; });
        if (!known) {
            throw Error::validation("UnknownColumn", "unknown registry column '" + name + "'");
        }
        if (!index.by_name.emplace(name, i).second) {
            throw Error::validation("DuplicateId", "registry column '" + name + "' appears twice");
        }
    }
    for (const char* required : kRequiredColumns) {
        if (!index.find(required)) {
            throw Error::validation("MissingColumn", "registry is missing column '" + std::string(required) + "'");
        }
    }
    return index;
}

struct RawRow {
    int id;
    std::string description;
    std::string cause;
    SensorSources sources;
    FusionStage fusion;
    Classification classification;
    std::optional<std::string> scene_ref;
    std::optional<RangeOverride> override_range;
};

RawRow parse_row(const ColumnIndex& index, const std::vector<std::string>& cells, std::size_t line) {
    auto cell = [&](const std::string& name) -> std::string {
        const auto pos = index.find(name);
        if (!pos || *pos >= cells.size()) return {};
        return std::string(trim(cells[*pos]));
    };

    const std::string id_text = cell("id");
    int id = 0;
    const auto parsed = std::from_chars(id_text.data(), id_text.data() + id_text.size(), id);
    if (parsed.ec != std::errc() || parsed.ptr != id_text.data() + id_text.size() || id <= 0) {
        throw Error::validation("MalformedValue",
                                "row " + std::to_string(line) + ": id '" + id_text +
                                    "' is not a positive integer");
    }

    RawRow row{
        .id = id,
        .description = cell("description"),
        .cause = cell("cause"),
        .sources = SensorSources::parse(cell("ravioli")),
        .fusion = parse_fusion(cell("source")),
        .classification = parse_classification(cell("layer"), cell("level")),
        .scene_ref = std::nullopt,
        .override_range = std::nullopt,
    };
    if (row.description.empty()) {
        throw Error::validation("MalformedValue", "row " + std::to_string(line) + ": empty description");
    }
    if (row.cause.empty()) {
        throw Error::validation("MalformedValue", "row " + std::to_string(line) + ": empty cause");
    }

    if (const std::string ref = cell("scene_ref"); !ref.empty()) row.scene_ref = ref;

    const std::string attr = cell("override_attr");
    const std::string min_text = cell("override_min");
    const std::string max_text = cell("override_max");
    const std::string unit = cell("override_unit");
    const bool any_override = !attr.empty() || !min_text.empty() || !max_text.empty() || !unit.empty();
    if (any_override) {
        if (attr.empty() || min_text.empty() || max_text.empty() || unit.empty()) {
            throw Error::validation("InvalidOverride",
                                    "row " + std::to_string(line) +
                                        ": override_attr/min/max/unit must be given together");
        }
        RangeOverride range{attr, parse_double_field(min_text, "override_min"),
                            parse_double_field(max_text, "override_max"), unit};
        if (range.min > range.max) {
            throw Error::validation("MalformedRange",
                                    "row " + std::to_string(line) + ": override min exceeds max");
        }
        row.override_range = range;
    }
    return row;
}

} // namespace

std::vector<CornerCaseSpec> load_registry(const std::string& csv_text) {
    const auto rows = parse_csv(csv_text);
    if (rows.empty()) {
        throw Error::validation("MissingColumn", "registry has no header row");
    }
    const ColumnIndex index = index_header(rows[0]);

    std::map<int, CornerCaseSpec> by_id;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const RawRow row = parse_row(index, rows[i], i + 1);
        auto [it, inserted] = by_id.try_emplace(row.id);
        CornerCaseSpec& spec = it->second;
        if (inserted) {
            spec.id = row.id;
            spec.description = row.description;
            spec.sources = row.sources;
            spec.fusion = row.fusion;
        } else {
            if (spec.description != row.description) {
                throw Error::validation("DuplicateConflict",
                                        "corner case " + std::to_string(row.id) +
                                            ": rows disagree on description");
            }
            if (spec.sources != row.sources) {
                throw Error::validation("DuplicateConflict",
                                        "corner case " + std::to_string(row.id) +
                                            ": rows disagree on sensor sources");
            }
            if (spec.fusion != row.fusion) {
                throw Error::validation("DuplicateConflict",
                                        "corner case " + std::to_string(row.id) +
                                            ": rows disagree on fusion stage");
            }
        }
        spec.classifications.insert(row.classification);

        const Cause incoming{row.cause, row.scene_ref, row.override_range};
        const auto cause_it = std::find_if(spec.causes.begin(), spec.causes.end(),
                                           [&](const Cause& c) { return c.text == row.cause; });
        if (cause_it == spec.causes.end()) {
            spec.causes.push_back(incoming);
        } else if (*cause_it != incoming) {
            throw Error::validation("DuplicateConflict",
                                    "corner case " + std::to_string(row.id) + " cause '" + row.cause +
                                        "': rows disagree on scene_ref or override");
        }
    }

    std::vector<CornerCaseSpec> specs;
    specs.reserve(by_id.size());
    for (auto& [id, spec] : by_id) {
        std::sort(spec.causes.begin(), spec.causes.end(),
                  [](const Cause& a, const Cause& b) { return a.text < b.text; });
        specs.push_back(std::move(spec));
    }
    return specs;
}

std::vector<RegistryDiagnostic> validate_registry(const std::vector<CornerCaseSpec>& specs) {
    std::vector<RegistryDiagnostic> diagnostics;
    for (const CornerCaseSpec& spec : specs) {
        for (const Cause& cause : spec.causes) {
            if (!cause.scene_ref.has_value()) {
                diagnostics.push_back({spec.id, cause.text,
                                       "corner case " + std::to_string(spec.id) + " cause '" + cause.text +
                                           "' has no scene_ref and cannot be compiled"});
            }
        }
    }
    return diagnostics;
}

} // namespace cornerforge
