#pragma once

// JSON and file helpers shared by the corpus loader and the pipeline record
// readers. Internal to the library.

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "reliance/error.hpp"

namespace reliance::detail {

using nlohmann::json;
namespace fs = std::filesystem;

inline std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("missing file", path.filename().string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Field access with file/line context for error messages.
class RecordReader {
public:
    RecordReader(const json& j, std::string file, std::size_t line)
        : j_(j), file_(std::move(file)), line_(line) {
        if (!j_.is_object()) fail("record is not a JSON object");
    }

    const json& field(const char* key) const {
        auto it = j_.find(key);
        if (it == j_.end()) fail(std::string("missing required field '") + key + "'");
        return *it;
    }
    bool has(const char* key) const {
        auto it = j_.find(key);
        return it != j_.end() && !it->is_null();
    }
    std::string str(const char* key) const {
        const auto& v = field(key);
        if (!v.is_string()) fail(std::string("field '") + key + "' must be a string");
        return v.get<std::string>();
    }
    std::int64_t integer(const char* key) const {
        const auto& v = field(key);
        if (!v.is_number_integer()) fail(std::string("field '") + key + "' must be an integer");
        return v.get<std::int64_t>();
    }
    bool boolean(const char* key) const {
        const auto& v = field(key);
        if (!v.is_boolean()) fail(std::string("field '") + key + "' must be a boolean");
        return v.get<bool>();
    }
    const json& raw() const { return j_; }
    const std::string& file() const { return file_; }
    std::size_t line() const { return line_; }
    [[noreturn]] void fail(const std::string& message) const {
        throw ValidationError(message, file_, line_);
    }

private:
    const json& j_;
    std::string file_;
    std::size_t line_;
};

template <typename Fn>
void for_each_jsonl(const fs::path& path, Fn&& fn) {
    const auto name = path.filename().string();
    std::istringstream in(read_file(path));
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw ValidationError(std::string("malformed JSON: ") + e.what(), name, lineno);
        }
        fn(RecordReader(j, name, lineno), lineno);
    }
}

inline json parse_json_file(const fs::path& path) {
    try {
        return json::parse(read_file(path));
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("malformed JSON: ") + e.what(), path.filename().string());
    }
}


/// Writes `content` to `path` through a temporary file and rename.
void write_file_atomic(const fs::path& path, const std::string& content);

}  // namespace reliance::detail
