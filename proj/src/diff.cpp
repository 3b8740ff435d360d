#include "reliance/diff.hpp"

#include <algorithm>

namespace reliance {

namespace {

bool is_continuation(char c) { return (static_cast<unsigned char>(c) & 0xC0) == 0x80; }

}  // namespace

EditDelta diff_snapshots(std::string_view prev, std::string_view next) {
    const std::size_t limit = std::min(prev.size(), next.size());
    std::size_t prefix = 0;
    while (prefix < limit && prev[prefix] == next[prefix]) ++prefix;
    // Back off so the change region starts on a code point boundary.
    while (prefix > 0 && ((prefix < prev.size() && is_continuation(prev[prefix])) ||
                          (prefix < next.size() && is_continuation(next[prefix]))))
        --prefix;

    std::size_t suffix = 0;
    const std::size_t room = limit - prefix;
    while (suffix < room && prev[prev.size() - 1 - suffix] == next[next.size() - 1 - suffix]) ++suffix;
    // The suffix must start on a code point boundary in both strings.
    while (suffix > 0 && (is_continuation(prev[prev.size() - suffix]) ||
                          is_continuation(next[next.size() - suffix])))
        --suffix;

    EditDelta delta;
    delta.offset = prefix;
    delta.deleted = std::string(prev.substr(prefix, prev.size() - prefix - suffix));
    delta.inserted = std::string(next.substr(prefix, next.size() - prefix - suffix));
    return delta;
}

std::string apply_delta(std::string_view prev, const EditDelta& delta) {
    std::string out;
    out.reserve(prev.size() - delta.deleted.size() + delta.inserted.size());
    out.append(prev.substr(0, delta.offset));
    out.append(delta.inserted);
    out.append(prev.substr(delta.offset + delta.deleted.size()));
    return out;
}

}  // namespace reliance
