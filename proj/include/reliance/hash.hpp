#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace reliance {

/// 64-bit FNV-1a. Stable across platforms; used for segment ids and input digests.
class Fnv1a {
public:
    void update(std::string_view bytes) {
        for (unsigned char c : bytes) {
            state_ ^= c;
            state_ *= 0x100000001b3ULL;
        }
    }
    std::uint64_t value() const { return state_; }
    std::string hex() const;

private:
    std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

inline std::uint64_t fnv1a(std::string_view bytes) {
    Fnv1a h;
    h.update(bytes);
    return h.value();
}

}  // namespace reliance
