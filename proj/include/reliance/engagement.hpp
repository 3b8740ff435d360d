#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace reliance {

/// Ordinal engagement level on one axis. The numeric values are the ordinal
/// codes used by every statistic.
enum class EngagementMode : int { Passive = 0, Active = 1, Constructive = 2 };

inline constexpr std::array<EngagementMode, 3> kModes = {EngagementMode::Passive, EngagementMode::Active,
                                                         EngagementMode::Constructive};

constexpr int ordinal(EngagementMode m) { return static_cast<int>(m); }
constexpr auto operator<=>(EngagementMode a, EngagementMode b) { return ordinal(a) <=> ordinal(b); }
constexpr EngagementMode max_mode(EngagementMode a, EngagementMode b) { return a < b ? b : a; }

std::string_view to_string(EngagementMode m);
std::string_view short_name(EngagementMode m);  // "P", "A", "C"
/// Accepts "Passive", "passive", "P" and the ordinal digits "0".."2".
std::optional<EngagementMode> parse_mode(std::string_view text);

enum class Axis { HelpSeeking, ResponseUse };
std::string_view to_string(Axis axis);
std::optional<Axis> parse_axis(std::string_view text);

/// (help-seeking, response-use) pair; nine combinations.
struct ReliancePattern {
    EngagementMode help_seeking = EngagementMode::Passive;
    EngagementMode response_use = EngagementMode::Passive;

    /// help-major index in [0, 9): Passive_Passive = 0, Passive_Active = 1, ...
    constexpr std::size_t index() const {
        return static_cast<std::size_t>(ordinal(help_seeking) * 3 + ordinal(response_use));
    }
    static constexpr ReliancePattern from_index(std::size_t i) {
        return {static_cast<EngagementMode>(i / 3), static_cast<EngagementMode>(i % 3)};
    }
    std::string name() const;        // "Passive_Active"
    std::string short_name() const;  // "P_A"
    bool operator==(const ReliancePattern&) const = default;
};

inline constexpr std::size_t kPatternCount = 9;

}  // namespace reliance
