#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "reliance/config.hpp"
#include "reliance/engagement.hpp"
#include "reliance/model.hpp"
#include "reliance/segmenter.hpp"

namespace reliance {

/// What a piece of evidence points at inside the session.
enum class EvidenceKind { Message, Edit, Copy, Segment };

struct MessageEvidence {
    EvidenceKind kind = EvidenceKind::Message;
    std::size_t ref = 0;  // message index, edit index or copy index; unused for Segment
    Axis axis = Axis::HelpSeeking;
    EngagementMode mode = EngagementMode::Passive;
    std::string rule_id;
    std::string note;

    bool operator==(const MessageEvidence&) const = default;
};

enum class LabelSource { Rules, External, Gold, Human };
std::string_view to_string(LabelSource source);
std::optional<LabelSource> parse_label_source(std::string_view text);

struct SegmentLabel {
    std::string segment_id;
    EngagementMode help_seeking = EngagementMode::Passive;
    EngagementMode response_use = EngagementMode::Passive;
    std::vector<MessageEvidence> evidence;
    LabelSource source = LabelSource::Rules;

    ReliancePattern pattern() const { return {help_seeking, response_use}; }
};

/// Documented rule ids. Every MessageEvidence produced by the rule
/// classifiers names one of these.
struct RuleInfo {
    std::string_view id;
    Axis axis;
    EngagementMode mode;
    std::string_view description;
};
std::span<const RuleInfo> rule_catalog();
const RuleInfo* find_rule(std::string_view id);

/// Thresholds and lexicons driving the rule classifiers. Defaults match
/// assets/rules.toml; any key there overrides the default.
struct RuleConfig {
    double instruction_copy = 0.8;   // message vs instruction step similarity for Passive
    double verbatim_reuse = 0.9;     // response reuse similarity at or above which use is Passive
    double novel_content = 0.5;      // below this, inserted code counts as the learner's own
    std::size_t novel_min_chars = 20;
    double follow_up_overlap = 0.3;  // content-word overlap tying a follow-up to a response
    std::size_t affirmation_max_tokens = 3;
    std::size_t identifier_min_length = 3;

    std::vector<std::string> affirmations;
    std::vector<std::string> answer_requests;
    std::vector<std::string> form_directives;
    std::vector<std::string> hypothesis_markers;
    std::vector<std::string> interrogatives;
    std::vector<std::string> error_terms;
    std::vector<std::string> new_case_cues;
    std::vector<std::string> clarification_cues;
    std::vector<std::string> stopwords;

    static RuleConfig defaults();
    /// Defaults overridden by `thresholds.*` and `lexicons.*` keys.
    static RuleConfig from_config(const KeyValueConfig& cfg);
};

struct AxisResult {
    EngagementMode mode = EngagementMode::Passive;
    std::vector<MessageEvidence> evidence;
};

/// Help-seeking mode of one segment from its student messages. Reads message
/// text, instructions and code snapshots only, never edit or copy logs.
AxisResult classify_help_seeking_rules(const SessionRecord& session, const InteractionSegment& segment,
                                       std::span<const std::string> instructions,
                                       std::span<const KnowledgeComponentDef> kcs, const RuleConfig& cfg);

/// Response-use mode of one segment from its copy events, edits and
/// follow-up questions asked inside the segment.
AxisResult classify_response_use_rules(const SessionRecord& session, const InteractionSegment& segment,
                                       const RuleConfig& cfg);

/// Evidence the next segment contributes back to `segment`: its opening
/// student question, when it refers to `segment`'s last response.
std::vector<MessageEvidence> adjacent_evidence(const SessionRecord& session, const InteractionSegment& segment,
                                               const InteractionSegment& next, const RuleConfig& cfg);

/// Per axis, the highest mode over own plus attributed evidence. An axis with
/// no evidence gets a Passive default entry.
SegmentLabel aggregate_segment(std::string segment_id, std::vector<MessageEvidence> evidence,
                               const std::vector<MessageEvidence>& adjacent);

/// Full rule pipeline over one session's segments (in ordinal order).
std::vector<SegmentLabel> label_session_rules(const SessionRecord& session,
                                              const std::vector<InteractionSegment>& segments,
                                              std::span<const std::string> instructions,
                                              std::span<const KnowledgeComponentDef> kcs, const RuleConfig& cfg);

/// Code blocks of an assistant message: fenced ``` blocks, or the whole text
/// when there are none.
std::vector<std::string> extract_code_blocks(std::string_view message);

/// Similarity of `inserted` to the best-matching stretch of `block`:
/// 1 - (approximate-substring edit distance) / |inserted|, over normalized
/// text, floored at 0. Measures how much of an insertion is reproduced
/// from a response.
double reuse_similarity(std::string_view inserted, std::string_view block);

/// Fraction of `message`'s content words that also occur in `response`.
double lexical_overlap(std::string_view message, std::string_view response, const RuleConfig& cfg);

/// Fills CopyEvent::source_hint: AssistantMessage when the paste reproduces
/// an earlier assistant block at the verbatim threshold, otherwise Unknown.
void classify_copy_sources(SessionRecord& session, const RuleConfig& cfg);

// Knowledge contexts.

enum class Mastery { Acquired, Undeveloped };
enum class CollapsedContext { AcquiredFocal, UndevelopedFocal, Supporting };
inline constexpr std::size_t kContextCount = 3;

std::string_view to_string(Mastery m);
std::string_view to_string(CollapsedContext c);
std::optional<Mastery> parse_mastery(std::string_view text);
std::optional<CollapsedContext> parse_context(std::string_view text);

struct KnowledgeContext {
    std::optional<Mastery> mastery;  // empty only for Supporting components without a mapped question
    Significance significance = Significance::Focal;
    CollapsedContext collapsed = CollapsedContext::Supporting;

    bool operator==(const KnowledgeContext&) const = default;
};

/// Mastery from the mapped pre-test answer (correct = Acquired; wrong or IDK =
/// Undeveloped). Supporting components collapse to Supporting regardless.
/// Throws ValidationError for a Focal component without a pre-test response.
KnowledgeContext assign_knowledge_context(const KnowledgeComponentDef& kc, const SessionRecord& session);

}  // namespace reliance
