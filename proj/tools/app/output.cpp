#include "output.hpp"

#include "pdiss/errors.hpp"
#include "pdiss/units.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace pdiss::app {

void CsvTable::add_row(std::vector<std::string> row) {
    if (row.size() != header.size()) throw InvalidArgument("CsvTable: row width differs from header");
    rows.push_back(std::move(row));
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 12);
    return std::string(buf, res.ptr);
}

namespace {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace

std::string to_csv(const CsvTable& table) {
    std::string out;
    auto line = [&out](const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) out += ',';
            out += csv_field(fields[i]);
        }
        out += "\r\n";
    };
    line(table.header);
    for (const auto& row : table.rows) line(row);
    return out;
}

const std::vector<double>& CsvData::column(const std::string& name) const {
    const auto it = columns.find(name);
    if (it == columns.end()) throw InvalidArgument("CSV has no column '" + name + "'");
    return it->second;
}

CsvData read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open '" + path.string() + "'");
    CsvData data;
    std::string line;
    if (!std::getline(in, line)) throw InvalidArgument("'" + path.string() + "' is empty");
    data.header = split_csv_line(line);
    for (const auto& name : data.header) data.columns[name];
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != data.header.size()) {
            throw InvalidArgument(path.string() + ":" + std::to_string(line_no) + ": expected " +
                                  std::to_string(data.header.size()) + " fields");
        }
        for (std::size_t i = 0; i < fields.size(); ++i) {
            double v = 0.0;
            const auto& f = fields[i];
            const auto res = std::from_chars(f.data(), f.data() + f.size(), v);
            if (res.ec != std::errc{} || res.ptr != f.data() + f.size()) {
                throw InvalidArgument(path.string() + ":" + std::to_string(line_no) + ": non-numeric field '" + f +
                                      "'");
            }
            data.columns[data.header[i]].push_back(v);
        }
    }
    return data;
}

std::string sha256_hex(const std::string& bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw Error("sha256: digest failed");
    }
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xf];
    }
    return out;
}

Json write_outputs(const std::filesystem::path& dir, const std::vector<CsvTable>& tables, const ManifestInput& input) {
    std::filesystem::create_directories(dir);
    Json files = Json::array();
    for (const auto& table : tables) {
        const std::string text = to_csv(table);
        std::ofstream out(dir / table.file, std::ios::binary);
        if (!out) throw Error("cannot write '" + (dir / table.file).string() + "'");
        out << text;
        files.push_back({{"path", table.file}, {"rows", table.rows.size()}, {"bytes", text.size()},
                         {"sha256", sha256_hex(text)}});
    }
    const std::string constants = units::constants_table();
    Json manifest = {
        {"schema", "pdiss-manifest/1"},
        {"tool", "pdiss"},
        {"version", PDISS_VERSION},
        {"experiment", input.experiment},
        {"seed", input.seed},
        {"threads", input.threads},
        {"config", input.config},
        {"constants", {{"table", constants}, {"sha256", sha256_hex(constants)}}},
        {"wall_time_s", input.wall_time_s},
        {"files", files},
        {"results", input.results},
    };
    std::ofstream out(dir / "manifest.json", std::ios::binary);
    if (!out) throw Error("cannot write manifest");
    out << manifest.dump(2) << "\n";
    return manifest;
}

const Json& manifest_schema() {
    static const Json schema = Json::parse(R"({
  "$schema": "https://json-schema.org/draft/2020-12/schema",
  "title": "pdiss run manifest",
  "type": "object",
  "required": ["schema", "tool", "version", "experiment", "seed", "threads", "config", "constants",
               "wall_time_s", "files", "results"],
  "properties": {
    "schema": {"type": "string"},
    "tool": {"type": "string"},
    "version": {"type": "string"},
    "experiment": {"type": "string"},
    "seed": {"type": "integer"},
    "threads": {"type": "integer"},
    "config": {"type": "object", "required": ["experiment", "seed", "device"]},
    "constants": {
      "type": "object",
      "required": ["table", "sha256"],
      "properties": {"table": {"type": "string"}, "sha256": {"type": "string"}}
    },
    "wall_time_s": {"type": "number"},
    "files": {
      "type": "array",
      "items": {
        "type": "object",
        "required": ["path", "rows", "bytes", "sha256"],
        "properties": {
          "path": {"type": "string"},
          "rows": {"type": "integer"},
          "bytes": {"type": "integer"},
          "sha256": {"type": "string"}
        }
      }
    },
    "results": {"type": "object"}
  }
})");
    return schema;
}

namespace {

bool has_type(const Json& value, const std::string& type) {
    if (type == "object") return value.is_object();
    if (type == "array") return value.is_array();
    if (type == "string") return value.is_string();
    if (type == "integer") return value.is_number_integer();
    if (type == "number") return value.is_number();
    if (type == "boolean") return value.is_boolean();
    return false;
}

// Enough of JSON Schema for the manifest: type, required, properties, items.
void check(const Json& value, const Json& schema, const std::string& path, std::vector<std::string>& errors) {
    if (schema.contains("type") && !has_type(value, schema["type"].get<std::string>())) {
        errors.push_back(path + ": expected " + schema["type"].get<std::string>());
        return;
    }
    if (schema.contains("required")) {
        for (const auto& key : schema["required"]) {
            if (!value.contains(key.get<std::string>())) errors.push_back(path + ": missing '" + key.get<std::string>() + "'");
        }
    }
    if (schema.contains("properties") && value.is_object()) {
        for (const auto& [key, sub] : schema["properties"].items()) {
            if (value.contains(key)) check(value[key], sub, path + "." + key, errors);
        }
    }
    if (schema.contains("items") && value.is_array()) {
        for (std::size_t i = 0; i < value.size(); ++i) {
            check(value[i], schema["items"], path + "[" + std::to_string(i) + "]", errors);
        }
    }
}

}  // namespace

std::vector<std::string> validate_manifest(const Json& manifest, const std::filesystem::path& dir) {
    std::vector<std::string> errors;
    check(manifest, manifest_schema(), "$", errors);
    if (!errors.empty()) return errors;
    for (const auto& entry : manifest["files"]) {
        const auto path = dir / entry["path"].get<std::string>();
        std::ifstream in(path, std::ios::binary);
        if (!in) {
            errors.push_back("listed file missing: " + path.string());
            continue;
        }
        std::stringstream buf;
        buf << in.rdbuf();
        if (sha256_hex(buf.str()) != entry["sha256"].get<std::string>()) {
            errors.push_back("digest mismatch: " + path.string());
        }
    }
    // Every CSV in the directory must be listed.
    for (const auto& item : std::filesystem::directory_iterator(dir)) {
        if (item.path().extension() != ".csv") continue;
        bool listed = false;
        for (const auto& entry : manifest["files"]) listed |= entry["path"].get<std::string>() == item.path().filename().string();
        if (!listed) errors.push_back("unlisted file: " + item.path().filename().string());
    }
    return errors;
}

}  // namespace pdiss::app
