#include "reliance/model.hpp"

#include <algorithm>
#include <cctype>

#include "reliance/hash.hpp"

namespace reliance {

namespace {

std::string lower(std::string_view text) {
    std::string out(text);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

}  // namespace

const SessionRecord* Corpus::find_session(std::string_view id) const {
    auto it = std::lower_bound(sessions.begin(), sessions.end(), id,
                               [](const SessionRecord& s, std::string_view key) { return s.session_id < key; });
    if (it != sessions.end() && it->session_id == id) return &*it;
    // Tolerate corpora assembled by hand in arbitrary order.
    auto linear = std::find_if(sessions.begin(), sessions.end(),
                               [&](const SessionRecord& s) { return s.session_id == id; });
    return linear == sessions.end() ? nullptr : &*linear;
}

const KnowledgeComponentDef* Corpus::find_kc(std::string_view id) const {
    auto it = std::find_if(kcs.begin(), kcs.end(), [&](const auto& kc) { return kc.kc_id == id; });
    return it == kcs.end() ? nullptr : &*it;
}

std::string_view to_string(Role role) { return role == Role::Student ? "student" : "assistant"; }

std::string_view to_string(SourceHint hint) {
    switch (hint) {
        case SourceHint::AssistantMessage: return "assistant_message";
        case SourceHint::External: return "external";
        case SourceHint::Unknown: break;
    }
    return "unknown";
}

std::string_view to_string(Significance significance) {
    return significance == Significance::Focal ? "Focal" : "Supporting";
}

std::string_view to_string(TestPhase phase) { return phase == TestPhase::Pre ? "pre" : "post"; }

std::string_view to_string(SrlScale scale) {
    switch (scale) {
        case SrlScale::SelfEfficacy: return "self_efficacy";
        case SrlScale::Intrinsic: return "intrinsic";
        case SrlScale::Extrinsic: return "extrinsic";
        case SrlScale::Metacognition: return "metacognition";
    }
    return "self_efficacy";
}

std::optional<Role> parse_role(std::string_view text) {
    auto t = lower(text);
    if (t == "student") return Role::Student;
    if (t == "assistant") return Role::Assistant;
    return std::nullopt;
}

std::optional<Significance> parse_significance(std::string_view text) {
    auto t = lower(text);
    if (t == "focal") return Significance::Focal;
    if (t == "supporting") return Significance::Supporting;
    return std::nullopt;
}

std::optional<TestPhase> parse_phase(std::string_view text) {
    auto t = lower(text);
    if (t == "pre") return TestPhase::Pre;
    if (t == "post") return TestPhase::Post;
    return std::nullopt;
}

std::optional<SrlScale> parse_srl_scale(std::string_view text) {
    auto t = lower(text);
    for (auto scale : kSrlScales)
        if (t == to_string(scale)) return scale;
    return std::nullopt;
}

std::string Fnv1a::hex() const {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out(16, '0');
    auto v = state_;
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = kDigits[v & 0xF];
        v >>= 4;
    }
    return out;
}

}  // namespace reliance
