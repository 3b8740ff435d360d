#pragma once

// Adapter for an external (LLM) classifier: prompt construction, strict
// answer parsing and the two endpoint transports.

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "reliance/engagement.hpp"
#include "reliance/model.hpp"
#include "reliance/records.hpp"
#include "reliance/segmenter.hpp"

namespace reliance {

enum class PromptStrategy { ZeroShot, FewShot3, FewShot9, FewShot9Cot };
std::string_view to_string(PromptStrategy s);
std::optional<PromptStrategy> parse_strategy(std::string_view text);
std::size_t exemplar_count(PromptStrategy s);

enum class PromptAxis { HelpSeeking, ResponseUse, Both };
std::string_view to_string(PromptAxis a);
std::optional<PromptAxis> parse_prompt_axis(std::string_view text);

struct Exemplar {
    std::string segment_id;
    std::string rendering;
    EngagementMode help_seeking = EngagementMode::Passive;
    EngagementMode response_use = EngagementMode::Passive;
};

struct PromptConfig {
    PromptStrategy strategy = PromptStrategy::ZeroShot;
    PromptAxis axis = PromptAxis::Both;
    std::vector<Exemplar> exemplars;
    std::string codebook;  // empty: built-in text

    /// Throws ValidationError when the exemplar count does not match the strategy.
    void validate() const;
};

/// Built-in codebook instructions (also shipped as assets/prompts/codebook.txt).
const std::string& default_codebook();

/// Plain-text view of a segment: its messages, copy events and net edit
/// deltas, then the opening student message of the next segment if any.
std::string render_segment(const SessionRecord& session, const InteractionSegment& segment,
                           const InteractionSegment* next);

std::string build_prompt(const PromptConfig& cfg, const std::string& rendering);

struct ParsedAnswer {
    std::optional<EngagementMode> help_seeking;
    std::optional<EngagementMode> response_use;
    std::string line;
};

/// Finds the last line of the form HELP=<mode>;USE=<mode> (or the single-axis
/// form for single-axis prompts). Anything else is a parse failure.
std::optional<ParsedAnswer> parse_answer(std::string_view text, PromptAxis axis);

class Endpoint {
public:
    virtual ~Endpoint() = default;
    /// Returns the model's text. Throws EndpointError when unreachable.
    virtual std::string complete(const std::string& prompt) = 0;
};

/// "http://host:port/path" (POST {"prompt"} -> {"text"}) or "exec:<command>"
/// (prompt on stdin, answer on stdout).
std::unique_ptr<Endpoint> make_endpoint(const std::string& uri);

class FunctionEndpoint : public Endpoint {
public:
    explicit FunctionEndpoint(std::function<std::string(const std::string&)> fn) : fn_(std::move(fn)) {}
    std::string complete(const std::string& prompt) override { return fn_(prompt); }

private:
    std::function<std::string(const std::string&)> fn_;
};

struct ExternalOptions {
    int retries = 3;       // extra attempts after a parse failure
    unsigned jobs = 4;     // concurrent endpoint calls
};

/// Classifies one segment. Unparseable answers after all retries produce an
/// unclassified record that keeps the raw answers.
LabelRecord classify_external(const SessionRecord& session, const InteractionSegment& segment,
                              const InteractionSegment* next, const PromptConfig& cfg, Endpoint& endpoint,
                              const ExternalOptions& opts = {});

/// Classifies `segments` (canonical order preserved) with up to opts.jobs
/// calls in flight.
std::vector<LabelRecord> classify_external_batch(const Corpus& corpus, const std::vector<InteractionSegment>& segments,
                                                 const PromptConfig& cfg, Endpoint& endpoint,
                                                 const ExternalOptions& opts = {});

/// Picks exemplars from gold labels for a strategy: for nine, one per
/// pattern; for three, the diagonal patterns; missing patterns are filled
/// from the remaining gold segments in id order. Throws ValidationError when
/// gold has too few segments.
std::vector<Exemplar> select_exemplars(const Corpus& corpus, const std::vector<InteractionSegment>& segments,
                                       const std::vector<LabelRecord>& gold, PromptStrategy strategy);

}  // namespace reliance
