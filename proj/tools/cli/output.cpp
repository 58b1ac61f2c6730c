#include "output.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "dtc/num/errors.hpp"

namespace dtc::cli {

Format parse_format(std::string_view text) {
    if (text == "csv") return Format::csv;
    if (text == "json") return Format::json;
    throw ValidationError("unknown format '" + std::string(text) + "' (expected csv or json)");
}

std::string_view to_string(Format format) {
    return format == Format::csv ? "csv" : "json";
}

std::string format_number(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", value);
    return buf;
}

std::string csv_field(std::string_view text) {
    if (text.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(text);
    std::string out = "\"";
    for (char c : text) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

namespace {

std::string cell_text(const Cell& cell) {
    struct Visitor {
        std::string operator()(std::int64_t v) const { return std::to_string(v); }
        std::string operator()(double v) const { return format_number(v); }
        std::string operator()(const std::string& v) const { return csv_field(v); }
        std::string operator()(bool v) const { return v ? "true" : "false"; }
        std::string operator()(std::nullptr_t) const { return ""; }
    };
    return std::visit(Visitor{}, cell);
}

json cell_json(const Cell& cell) {
    struct Visitor {
        json operator()(std::int64_t v) const { return v; }
        json operator()(double v) const { return std::isfinite(v) ? json(v) : json(nullptr); }
        json operator()(const std::string& v) const { return v; }
        json operator()(bool v) const { return v; }
        json operator()(std::nullptr_t) const { return nullptr; }
    };
    return std::visit(Visitor{}, cell);
}

std::string header_json(const RunHeader& header) {
    return header.config.dump();
}

} // namespace

std::uint64_t config_hash(const json& config) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : config.dump()) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hash_hex(std::uint64_t hash) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

std::string render_csv(const Table& table, const RunHeader& header) {
    std::ostringstream os;
    os << "# tool: " << kToolName << ' ' << kToolVersion << '\n';
    os << "# command: " << header.command << '\n';
    os << "# config: " << header_json(header) << '\n';
    os << "# config_hash: " << hash_hex(config_hash(header.config)) << '\n';
    os << "# wall_time_s: " << format_number(header.wall_time_s) << '\n';
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
        if (i) os << ',';
        os << csv_field(table.columns[i]);
    }
    os << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) os << ',';
            os << cell_text(row[i]);
        }
        os << '\n';
    }
    return os.str();
}

std::string render_json(const Artifact& artifact, const RunHeader& header) {
    json doc;
    doc["tool"] = std::string(kToolName) + " " + std::string(kToolVersion);
    doc["command"] = header.command;
    doc["config"] = header.config;
    doc["config_hash"] = hash_hex(config_hash(header.config));
    doc["wall_time_s"] = header.wall_time_s;
    if (const auto* table = std::get_if<Table>(&artifact.body)) {
        json rows = json::array();
        for (const auto& row : table->rows) {
            json r = json::array();
            for (const auto& cell : row) r.push_back(cell_json(cell));
            rows.push_back(std::move(r));
        }
        doc["payload"] = {{"columns", table->columns}, {"rows", std::move(rows)}};
    } else {
        doc["payload"] = std::get<json>(artifact.body);
    }
    return doc.dump(2) + "\n";
}

std::string render(const Artifact& artifact, const RunHeader& header, Format format) {
    if (const auto* table = std::get_if<Table>(&artifact.body); table && format == Format::csv) {
        return render_csv(*table, header);
    }
    return render_json(artifact, header);
}

std::string payload_section(std::string_view rendered) {
    if (!rendered.empty() && rendered.front() == '{') {
        return json::parse(rendered).at("payload").dump();
    }
    std::size_t pos = 0;
    while (pos < rendered.size() && rendered[pos] == '#') {
        const auto eol = rendered.find('\n', pos);
        if (eol == std::string_view::npos) return {};
        pos = eol + 1;
    }
    return std::string(rendered.substr(pos));
}

LoadedConfig load_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot read config file '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();

    LoadedConfig loaded;
    if (text.rfind("#", 0) == 0) {
        std::istringstream lines(text);
        std::string line;
        bool found = false;
        while (std::getline(lines, line) && line.rfind("#", 0) == 0) {
            if (line.rfind("# command: ", 0) == 0) loaded.command = line.substr(11);
            if (line.rfind("# config: ", 0) == 0) {
                loaded.config = json::parse(line.substr(10));
                found = true;
            }
        }
        if (!found) throw ValidationError("config file '" + path.string() + "' has no '# config:' line");
        return loaded;
    }

    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError("config file '" + path.string() + "' is not valid JSON: " + e.what());
    }
    if (!doc.is_object()) throw ValidationError("config file must hold a JSON object");
    if (doc.contains("config")) {
        if (doc.contains("command")) loaded.command = doc.at("command").get<std::string>();
        loaded.config = doc.at("config");
    } else {
        if (doc.contains("command")) {
            loaded.command = doc.at("command").get<std::string>();
            doc.erase("command");
        }
        loaded.config = doc;
    }
    if (!loaded.config.is_object()) throw ValidationError("config must be a JSON object");
    return loaded;
}

std::filesystem::path output_stem(const std::string& out, std::string_view command) {
    namespace fs = std::filesystem;
    if (out.empty()) {
        const char* dir = std::getenv("DTCLAB_OUT_DIR");
        return fs::path(dir && *dir ? dir : ".") / std::string(command);
    }
    if (out.back() == '/' || fs::is_directory(out)) return fs::path(out) / std::string(command);
    fs::path p(out);
    if (p.extension() == ".csv" || p.extension() == ".json") p.replace_extension();
    return p;
}

std::filesystem::path artifact_path(const std::filesystem::path& stem, const Artifact& artifact,
                                    Format format) {
    const bool csv = std::holds_alternative<Table>(artifact.body) && format == Format::csv;
    auto name = stem.filename().string() + artifact.suffix + (csv ? ".csv" : ".json");
    return stem.parent_path() / name;
}

} // namespace dtc::cli
