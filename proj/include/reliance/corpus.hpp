#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "reliance/model.hpp"

namespace reliance {

/// File names inside a corpus directory.
namespace corpus_files {
inline constexpr const char* kMessages = "messages.jsonl";
inline constexpr const char* kEdits = "edits.jsonl";
inline constexpr const char* kCopies = "copies.jsonl";
inline constexpr const char* kKcs = "kcs.json";
inline constexpr const char* kAssessments = "assessments.csv";
inline constexpr const char* kSrl = "srl.csv";
inline constexpr const char* kInstructions = "instructions.json";
inline constexpr const char* kSessions = "sessions.json";
}  // namespace corpus_files

/// Reads and validates a corpus directory.
///
/// Every file listed in `corpus_files` must exist (empty JSONL files are
/// fine). Parse errors carry file and line; invariant violations carry the
/// offending record id. Excluded sessions are kept and flagged.
Corpus load_corpus(const std::filesystem::path& dir);

/// Writes `corpus` in the on-disk layout read by `load_corpus`.
void write_corpus(const Corpus& corpus, const std::filesystem::path& dir);

/// Runs the cross-record invariants on an in-memory corpus. `load_corpus`
/// calls this; it is exposed for generated corpora.
void validate_corpus(const Corpus& corpus);

struct TestScores {
    int pre = 0;
    int post = 0;
};

/// One point per correct answer, no deduction for wrong or IDK answers.
/// Throws ValidationError on a duplicate (session, question, phase) triple.
std::map<std::string, TestScores> score_assessments(const Corpus& corpus);

}  // namespace reliance
