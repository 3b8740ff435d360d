#pragma once

// On-disk records exchanged between pipeline stages. Every file is JSON
// Lines with a fixed field order, so reruns rewrite identical bytes.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "reliance/labeling.hpp"
#include "reliance/model.hpp"
#include "reliance/segmenter.hpp"

namespace reliance {

namespace pipeline_files {
inline constexpr const char* kKcAssignments = "kc_assignments.jsonl";
inline constexpr const char* kSegments = "segments.jsonl";
inline constexpr const char* kLabels = "labels.jsonl";
inline constexpr const char* kContexts = "contexts.jsonl";
}  // namespace pipeline_files

/// One line of labels.jsonl (and of the annotation journal). Modes are empty
/// only for unclassified external predictions.
struct LabelRecord {
    std::string segment_id;
    std::optional<EngagementMode> help_seeking;
    std::optional<EngagementMode> response_use;
    LabelSource source = LabelSource::Rules;
    std::vector<MessageEvidence> evidence;
    std::optional<std::string> annotator;
    std::optional<int> round;
    std::optional<std::string> kc_id;
    std::optional<Timestamp> timestamp;
    std::vector<std::string> raw;  // unparsed classifier answers

    bool classified() const { return help_seeking && response_use; }
    std::optional<ReliancePattern> pattern() const;
    static LabelRecord from(const SegmentLabel& label);
    bool operator==(const LabelRecord&) const = default;
};

std::string format_label_line(const LabelRecord& record);
/// Parses one labels.jsonl line; `file`/`line` feed error messages.
LabelRecord parse_label_line(std::string_view text, const std::string& file = "labels.jsonl", std::size_t line = 0);

void write_labels(const std::filesystem::path& path, const std::vector<LabelRecord>& labels);
std::vector<LabelRecord> read_labels(const std::filesystem::path& path);

void write_kc_assignments(const std::filesystem::path& path, const std::vector<KcAssignment>& assignments);
std::vector<KcAssignment> read_kc_assignments(const std::filesystem::path& path);

/// Segments are written with edit and copy timestamps; reading maps them back
/// to indices in the corpus sessions.
void write_segments(const std::filesystem::path& path, const std::vector<InteractionSegment>& segments,
                    const Corpus& corpus);
std::vector<InteractionSegment> read_segments(const std::filesystem::path& path, const Corpus& corpus);

struct ContextRecord {
    std::string segment_id;
    std::string session_id;
    std::string kc_id;
    KnowledgeContext context;

    bool operator==(const ContextRecord&) const = default;
};

void write_contexts(const std::filesystem::path& path, const std::vector<ContextRecord>& contexts);
std::vector<ContextRecord> read_contexts(const std::filesystem::path& path);

std::string_view to_string(EvidenceKind kind);
std::optional<EvidenceKind> parse_evidence_kind(std::string_view text);

}  // namespace reliance
