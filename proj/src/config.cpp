#include "reliance/config.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "reliance/error.hpp"

namespace reliance {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

// Reads a double-quoted string starting at s[pos] == '"'; advances pos past it.
std::optional<std::string> read_quoted(std::string_view s, std::size_t& pos) {
    if (pos >= s.size() || s[pos] != '"') return std::nullopt;
    std::string out;
    for (++pos; pos < s.size(); ++pos) {
        char c = s[pos];
        if (c == '\\' && pos + 1 < s.size()) {
            char n = s[++pos];
            out.push_back(n == 'n' ? '\n' : n == 't' ? '\t' : n);
        } else if (c == '"') {
            ++pos;
            return out;
        } else {
            out.push_back(c);
        }
    }
    return std::nullopt;
}

// Drops a trailing "# comment" that is not inside a quoted string.
std::string_view strip_comment(std::string_view line) {
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '\\' && quoted) {
            ++i;
            continue;
        }
        if (line[i] == '"') quoted = !quoted;
        if (line[i] == '#' && !quoted) return line.substr(0, i);
    }
    return line;
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(std::string_view text, std::string_view origin) {
    KeyValueConfig cfg;
    cfg.origin_ = std::string(origin);
    std::istringstream in{std::string(text)};
    std::string raw;
    std::string section;
    std::size_t lineno = 0;
    auto fail = [&](const std::string& msg) { throw ValidationError(msg, cfg.origin_, lineno); };

    while (std::getline(in, raw)) {
        ++lineno;
        auto line = trim(strip_comment(raw));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') fail("unterminated section header");
            section = std::string(trim(line.substr(1, line.size() - 2)));
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string_view::npos) fail("expected key = value");
        auto key = std::string(trim(line.substr(0, eq)));
        auto value = trim(line.substr(eq + 1));
        if (key.empty()) fail("empty key");
        if (!section.empty()) key = section + "." + key;
        if (value.empty()) fail("empty value for '" + key + "'");

        if (value.front() == '"') {
            std::size_t pos = 0;
            auto s = read_quoted(value, pos);
            if (!s || !trim(value.substr(pos)).empty()) fail("bad string value for '" + key + "'");
            cfg.values_[key] = *s;
        } else if (value.front() == '[') {
            std::vector<std::string> items;
            std::size_t pos = 1;
            while (true) {
                while (pos < value.size() && (std::isspace(static_cast<unsigned char>(value[pos])) || value[pos] == ','))
                    ++pos;
                if (pos >= value.size()) fail("unterminated array for '" + key + "'");
                if (value[pos] == ']') break;
                auto s = read_quoted(value, pos);
                if (!s) fail("arrays hold quoted strings only ('" + key + "')");
                items.push_back(std::move(*s));
            }
            cfg.values_[key] = std::move(items);
        } else if (value == "true" || value == "false") {
            cfg.values_[key] = value == "true";
        } else {
            try {
                std::size_t used = 0;
                double d = std::stod(std::string(value), &used);
                if (used != value.size()) throw std::invalid_argument("trailing");
                cfg.values_[key] = d;
            } catch (const std::exception&) {
                fail("cannot parse value for '" + key + "'");
            }
        }
    }
    return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open config file", path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path.string());
}

std::optional<double> KeyValueConfig::number(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    if (auto* d = std::get_if<double>(&it->second)) return *d;
    throw ValidationError("'" + key + "' must be a number", origin_);
}

std::optional<bool> KeyValueConfig::boolean(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    if (auto* b = std::get_if<bool>(&it->second)) return *b;
    throw ValidationError("'" + key + "' must be true or false", origin_);
}

std::optional<std::string> KeyValueConfig::string(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    if (auto* s = std::get_if<std::string>(&it->second)) return *s;
    throw ValidationError("'" + key + "' must be a string", origin_);
}

std::optional<std::vector<std::string>> KeyValueConfig::list(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    if (auto* l = std::get_if<std::vector<std::string>>(&it->second)) return *l;
    throw ValidationError("'" + key + "' must be an array of strings", origin_);
}

}  // namespace reliance
