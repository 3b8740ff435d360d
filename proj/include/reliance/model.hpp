#pragma once

// Corpus data model: chat messages, artifact edits, copy events, assessment
// and self-regulation responses, grouped per session.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace reliance {

using Timestamp = std::int64_t;  // milliseconds since epoch

enum class Role { Student, Assistant };

struct ChatMessage {
    std::string session_id;
    std::size_t index = 0;
    Timestamp ts = 0;
    Role role = Role::Student;
    std::string text;
    std::string code_snapshot;  // may be empty, in particular for assistant turns

    bool operator==(const ChatMessage&) const = default;
};

struct CodeEdit {
    std::string session_id;
    Timestamp ts = 0;
    std::string snapshot;      // full artifact text after the edit
    bool bulk_insert = false;  // one edit inserted more than two characters

    bool operator==(const CodeEdit&) const = default;
};

enum class SourceHint { Unknown, AssistantMessage, External };

struct CopyEvent {
    std::string session_id;
    Timestamp ts = 0;
    std::string pasted_text;
    SourceHint source_hint = SourceHint::Unknown;

    bool operator==(const CopyEvent&) const = default;
};

enum class Significance { Focal, Supporting };

struct KnowledgeComponentDef {
    std::string kc_id;
    std::string name;
    Significance significance = Significance::Focal;
    std::optional<std::string> pretest_question_id;
    std::vector<std::string> lexicon;

    bool operator==(const KnowledgeComponentDef&) const = default;
};

enum class TestPhase { Pre, Post };

inline constexpr int kIdkAnswer = -1;

struct AssessmentResponse {
    std::string session_id;
    std::string question_id;
    TestPhase phase = TestPhase::Pre;
    int answer = kIdkAnswer;  // option index, or kIdkAnswer for "I don't know"
    bool correct = false;

    bool operator==(const AssessmentResponse&) const = default;
};

enum class SrlScale { SelfEfficacy, Intrinsic, Extrinsic, Metacognition };
inline constexpr std::array<SrlScale, 4> kSrlScales = {
    SrlScale::SelfEfficacy, SrlScale::Intrinsic, SrlScale::Extrinsic, SrlScale::Metacognition};

struct SrlResponse {
    std::string session_id;
    SrlScale scale = SrlScale::SelfEfficacy;
    std::array<int, 3> item_scores{};  // 7-point Likert, each in [1,7]

    int sum() const { return item_scores[0] + item_scores[1] + item_scores[2]; }
    bool operator==(const SrlResponse&) const = default;
};

struct SessionRecord {
    std::string session_id;
    std::vector<ChatMessage> messages;  // ordered by index
    std::vector<CodeEdit> edits;        // ordered by ts
    std::vector<CopyEvent> copies;      // ordered by ts
    std::vector<AssessmentResponse> assessments;
    std::vector<SrlResponse> srl;
    bool excluded = false;
    std::string exclude_reason;

    bool operator==(const SessionRecord&) const = default;
};

struct Corpus {
    std::vector<SessionRecord> sessions;  // sorted by session_id
    std::vector<KnowledgeComponentDef> kcs;
    std::vector<std::string> instructions;

    const SessionRecord* find_session(std::string_view id) const;
    const KnowledgeComponentDef* find_kc(std::string_view id) const;
    bool operator==(const Corpus&) const = default;
};

// Name tables used by every file format in the project.
std::string_view to_string(Role role);
std::string_view to_string(SourceHint hint);
std::string_view to_string(Significance significance);
std::string_view to_string(TestPhase phase);
std::string_view to_string(SrlScale scale);

std::optional<Role> parse_role(std::string_view text);
std::optional<Significance> parse_significance(std::string_view text);
std::optional<TestPhase> parse_phase(std::string_view text);
std::optional<SrlScale> parse_srl_scale(std::string_view text);

}  // namespace reliance
