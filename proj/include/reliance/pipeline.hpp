#pragma once

// Stage orchestration behind the command-line tool. Stages talk to each other
// only through the files they write into the output directory, so any stage
// input can be replaced by a hand-edited file.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "reliance/external.hpp"
#include "reliance/model.hpp"

namespace reliance {

namespace output_files {
inline constexpr const char* kAnalysis = "analysis_report.json";
inline constexpr const char* kBenchmark = "benchmark_report.json";
inline constexpr const char* kReport = "report.txt";
inline constexpr const char* kExemplars = "exemplars.json";
}  // namespace output_files

enum class ClassifierMode { Rules, External, Gold };
std::string_view to_string(ClassifierMode mode);
std::optional<ClassifierMode> parse_classifier_mode(std::string_view text);

struct RunConfig {
    std::filesystem::path corpus;
    std::filesystem::path out;
    std::optional<std::uint64_t> seed;
    unsigned jobs = 1;
    ClassifierMode mode = ClassifierMode::Rules;
    std::string endpoint;                           // falls back to RELIANCESCOPE_ENDPOINT
    std::optional<std::filesystem::path> config;    // rules.toml style thresholds and lexicons
    std::optional<std::filesystem::path> gold;      // gold labels; default <corpus>/gold_labels.jsonl
    std::optional<std::filesystem::path> gold_kcs;  // gold KC assignments; default <corpus>/gold_kcs.jsonl
    bool lexicon_kcs = false;                       // ignore gold KC assignments even when present
    std::string suite = "all";
    bool drop_unclassified = false;
    PromptStrategy strategy = PromptStrategy::FewShot9Cot;
    PromptAxis axis = PromptAxis::Both;
    int retries = 3;
    std::size_t permutations = 10000;
    std::optional<double> delta;
};

/// Counts printed by `validate`.
nlohmann::ordered_json run_validate(const RunConfig& cfg);

// Each stage reads its inputs from cfg.out (running missing upstream stages
// first where noted) and writes its outputs there. Return values summarise
// what was written.
nlohmann::ordered_json run_segment(const RunConfig& cfg);
nlohmann::ordered_json run_classify(const RunConfig& cfg);   // runs segment if needed
nlohmann::ordered_json run_context(const RunConfig& cfg);    // runs segment if needed
nlohmann::ordered_json run_analyze(const RunConfig& cfg);    // runs any missing stage
nlohmann::ordered_json run_benchmark(const RunConfig& cfg);  // runs classify if needed
std::string run_report(const RunConfig& cfg);               // runs analyze if needed

/// Writes the seeded synthetic corpus (with gold files) into `dir`.
nlohmann::ordered_json write_fixture(std::uint64_t seed, const std::filesystem::path& dir);

/// Digest over the bytes of the corpus files and the stage inputs of analyze.
std::string input_digest(const std::vector<std::filesystem::path>& files);

}  // namespace reliance
