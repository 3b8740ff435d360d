#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "reliance/model.hpp"
#include "reliance/records.hpp"
#include "reliance/segmenter.hpp"

namespace reliance {

/// Suite names accepted by run_analysis, in report order.
const std::vector<std::string>& analysis_suites();

struct AnalysisParams {
    std::uint64_t seed = 0;
    std::size_t permutations = 10000;
    std::optional<double> delta;  // zero replacement; default is delta_factor x smallest share
    double delta_factor = 0.5;
    double alpha = 0.05;
    double lsa_threshold = 1.96;
    unsigned jobs = 1;
    std::set<std::string> suites;  // empty: all
};

struct AnalysisInputs {
    const Corpus* corpus = nullptr;
    const std::vector<InteractionSegment>* segments = nullptr;
    const std::vector<LabelRecord>* labels = nullptr;
    const std::vector<ContextRecord>* contexts = nullptr;
    std::string digest;
};

struct AnalysisOutput {
    nlohmann::ordered_json report;
    std::map<std::string, std::string> csv;  // file name -> contents
};

/// Runs the requested suites. Statistics that fail their preconditions are
/// reported as {"error": ...} entries instead of aborting the run.
AnalysisOutput run_analysis(const AnalysisInputs& in, const AnalysisParams& params);

/// Human-readable summary of an analysis report and, optionally, a benchmark
/// report.
std::string render_text_report(const nlohmann::ordered_json& analysis, const nlohmann::ordered_json* benchmark);

/// "p < .001" below one in a thousand, "p = 0.024" otherwise.
std::string format_p(double p);

}  // namespace reliance
