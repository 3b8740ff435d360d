#pragma once

// Seeded synthetic corpus: a to-do app activity with six knowledge
// components, generated together with the gold segmentation and labels it
// was built from.

#include <cstdint>
#include <filesystem>
#include <vector>

#include "reliance/model.hpp"
#include "reliance/records.hpp"

namespace reliance {

struct SynthOptions {
    std::uint64_t seed = 7;
    std::size_t sessions = 40;
    std::size_t excluded = 2;  // sessions flagged as using an outside source
    std::size_t silent = 3;    // sessions with no chat at all
};

struct SynthCorpus {
    Corpus corpus;
    std::vector<KcAssignment> gold_kcs;
    std::vector<LabelRecord> gold_labels;
};

SynthCorpus generate_synthetic(const SynthOptions& opts = {});

/// Optional gold files inside a corpus directory.
namespace gold_files {
inline constexpr const char* kLabels = "gold_labels.jsonl";
inline constexpr const char* kKcs = "gold_kcs.jsonl";
}  // namespace gold_files

/// Writes the corpus plus gold_labels.jsonl and gold_kcs.jsonl into `dir`.
void write_synthetic(const SynthCorpus& synth, const std::filesystem::path& dir);

}  // namespace reliance
