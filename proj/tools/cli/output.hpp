// output.hpp — tables, headers and file emission for dtclab runs.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

namespace dtc::cli {

using json = nlohmann::json;

inline constexpr std::string_view kToolName = "dtclab";
inline constexpr std::string_view kToolVersion = "0.1.0";

enum class Format { csv, json };
Format parse_format(std::string_view text);
std::string_view to_string(Format format);

using Cell = std::variant<std::int64_t, double, std::string, bool, std::nullptr_t>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

// One output file; `suffix` is appended to the run stem ("" for the main table).
struct Artifact {
    std::string suffix;
    std::variant<Table, json> body;
};

struct RunHeader {
    std::string command;
    json config;
    double wall_time_s = 0.0;
};

// %.12g, with nan/inf spelled out
std::string format_number(double value);
// RFC 4180: quote when the field holds a comma, quote, CR or LF
std::string csv_field(std::string_view text);

// FNV-1a 64 over the compact, key-sorted dump of the config.
std::uint64_t config_hash(const json& config);
std::string hash_hex(std::uint64_t hash);

std::string render_csv(const Table& table, const RunHeader& header);
std::string render_json(const Artifact& artifact, const RunHeader& header);
std::string render(const Artifact& artifact, const RunHeader& header, Format format);

// Everything after the '#' header block (CSV) or the "payload" member (JSON).
std::string payload_section(std::string_view rendered);

struct LoadedConfig {
    std::string command;   // empty when the file does not name one
    json config;
};

// Accepts a JSON run description ({"command": ..., "config": {...}} or a bare
// object of settings), a JSON output of an earlier run, or a CSV output of an
// earlier run (its "# config:" line).
LoadedConfig load_config_file(const std::filesystem::path& path);

// Stem for the output files of one run. `out` may be empty (use the output
// directory from DTCLAB_OUT_DIR, else "."), a directory (ends with '/' or
// exists) or a file path whose extension is dropped.
std::filesystem::path output_stem(const std::string& out, std::string_view command);

std::filesystem::path artifact_path(const std::filesystem::path& stem, const Artifact& artifact,
                                    Format format);

} // namespace dtc::cli
