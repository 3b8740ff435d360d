#pragma once

#include <filesystem>
#include <string>

#include "reliance/model.hpp"

#ifndef RELIANCE_FIXTURES
#error "RELIANCE_FIXTURES must point at tests/fixtures"
#endif

namespace testing {

inline std::filesystem::path fixture(const std::string& name) { return std::filesystem::path(RELIANCE_FIXTURES) / name; }

// Fresh scratch directory under the build tree, removed first if present.
inline std::filesystem::path scratch(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("reliance_test_" + name);
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

// Builder for hand-written sessions.
struct SessionBuilder {
    reliance::SessionRecord s;
    reliance::Timestamp clock = 1000;

    explicit SessionBuilder(std::string id) { s.session_id = std::move(id); }

    SessionBuilder& student(const std::string& text, const std::string& code = "") {
        return add(reliance::Role::Student, text, code);
    }
    SessionBuilder& assistant(const std::string& text) { return add(reliance::Role::Assistant, text, ""); }
    SessionBuilder& edit(const std::string& snapshot, bool bulk = false) {
        s.edits.push_back({s.session_id, clock += 100, snapshot, bulk});
        return *this;
    }
    SessionBuilder& paste(const std::string& text, const std::string& snapshot) {
        clock += 100;
        s.copies.push_back({s.session_id, clock, text, reliance::SourceHint::Unknown});
        s.edits.push_back({s.session_id, clock, snapshot, true});
        return *this;
    }

private:
    SessionBuilder& add(reliance::Role role, const std::string& text, const std::string& code) {
        s.messages.push_back({s.session_id, s.messages.size(), clock += 100, role, text, code});
        return *this;
    }
};

}  // namespace testing
