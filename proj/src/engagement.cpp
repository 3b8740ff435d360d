#include "reliance/engagement.hpp"

#include "reliance/text.hpp"

namespace reliance {

std::string_view to_string(EngagementMode m) {
    switch (m) {
        case EngagementMode::Passive: return "Passive";
        case EngagementMode::Active: return "Active";
        case EngagementMode::Constructive: return "Constructive";
    }
    return "Passive";
}

std::string_view short_name(EngagementMode m) {
    switch (m) {
        case EngagementMode::Passive: return "P";
        case EngagementMode::Active: return "A";
        case EngagementMode::Constructive: return "C";
    }
    return "P";
}

std::optional<EngagementMode> parse_mode(std::string_view raw) {
    const auto t = text::to_lower(raw);
    if (t == "passive" || t == "p" || t == "0") return EngagementMode::Passive;
    if (t == "active" || t == "a" || t == "1") return EngagementMode::Active;
    if (t == "constructive" || t == "c" || t == "2") return EngagementMode::Constructive;
    return std::nullopt;
}

std::string_view to_string(Axis axis) { return axis == Axis::HelpSeeking ? "help_seeking" : "response_use"; }

std::optional<Axis> parse_axis(std::string_view raw) {
    const auto t = text::to_lower(raw);
    if (t == "help_seeking" || t == "help") return Axis::HelpSeeking;
    if (t == "response_use" || t == "use") return Axis::ResponseUse;
    return std::nullopt;
}

std::string ReliancePattern::name() const {
    return std::string(to_string(help_seeking)) + "_" + std::string(to_string(response_use));
}

std::string ReliancePattern::short_name() const {
    return std::string(reliance::short_name(help_seeking)) + "_" + std::string(reliance::short_name(response_use));
}

}  // namespace reliance
