#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace reliance {

/// Single-region change between two snapshots: `deleted` was removed from
/// `prev` at `offset` and `inserted` put in its place.
struct EditDelta {
    std::size_t offset = 0;
    std::string deleted;
    std::string inserted;

    bool empty() const { return deleted.empty() && inserted.empty(); }
    bool operator==(const EditDelta&) const = default;
};

/// Trims the longest common prefix, then the longest common suffix of what
/// remains. Boundaries never split a UTF-8 sequence.
EditDelta diff_snapshots(std::string_view prev, std::string_view next);

/// Inverse of diff_snapshots: apply_delta(prev, diff_snapshots(prev, next)) == next.
std::string apply_delta(std::string_view prev, const EditDelta& delta);

}  // namespace reliance
