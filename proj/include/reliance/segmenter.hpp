#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "reliance/engagement.hpp"
#include "reliance/model.hpp"

namespace reliance {

enum class KcSource { Gold, Lexicon, External };
std::string_view to_string(KcSource source);
std::optional<KcSource> parse_kc_source(std::string_view text);

/// Knowledge component attached to one message; `kc_id` empty means NONE.
struct KcAssignment {
    std::string session_id;
    std::size_t message_index = 0;
    std::optional<std::string> kc_id;
    KcSource source = KcSource::Lexicon;

    bool operator==(const KcAssignment&) const = default;
};

/// Assigns a knowledge component to every message of `session`.
///
/// With `gold` (assignments for this session) the gold entries pass through
/// unchanged; assistant messages without a gold entry inherit from the
/// closest preceding student message. Without gold, each student message is
/// scored by case-insensitive whole-term lexicon hits per component; the
/// highest count wins, ties go to the component whose first hit is earliest
/// in the text (then to the earlier component in `kcs`), and zero hits is
/// NONE. Assistant messages take the component of the closest preceding
/// student message.
///
/// Throws ValidationError when gold names an unknown kc_id or leaves a student
/// message unassigned, and when lexicon mode is requested but every lexicon is
/// empty.
std::vector<KcAssignment> assign_kcs(const SessionRecord& session, std::span<const KnowledgeComponentDef> kcs,
                                     const std::vector<KcAssignment>* gold = nullptr);

/// Contiguous run of messages about one knowledge component, plus the edits
/// and copy events that fall inside its time window.
struct InteractionSegment {
    std::string segment_id;
    std::string session_id;
    std::string kc_id;
    std::size_t first_index = 0;
    std::size_t last_index = 0;
    std::vector<std::size_t> edits;   // indices into SessionRecord::edits
    std::vector<std::size_t> copies;  // indices into SessionRecord::copies
    std::size_t ordinal = 0;

    bool operator==(const InteractionSegment&) const = default;
};

/// Deterministic id: FNV-1a of "session_id:first-last".
std::string make_segment_id(std::string_view session_id, std::size_t first, std::size_t last);

/// Groups messages into segments.
///
/// NONE messages join the previous run, or the following one when they lead
/// the session; a session with no assigned message yields no segments. Edits
/// and copies are attached by timestamp to [segment start, next segment start),
/// the last segment running to the end of the session. Activity before the
/// first message is not attached to any segment.
std::vector<InteractionSegment> build_segments(const SessionRecord& session,
                                               const std::vector<KcAssignment>& assignments);

struct SequenceItem {
    std::string segment_id;
    ReliancePattern pattern;
};

/// One ordered pattern sequence per session (keyed by session_id), built from
/// segments in ordinal order. Throws ValidationError for an unlabeled segment.
std::map<std::string, std::vector<SequenceItem>> segment_sequence(
    const std::vector<InteractionSegment>& segments, const std::map<std::string, ReliancePattern>& patterns);

}  // namespace reliance
