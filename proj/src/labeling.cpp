#include "reliance/labeling.hpp"

#include <algorithm>
#include <array>
#include <set>

#include "reliance/corpus.hpp"
#include "reliance/diff.hpp"
#include "reliance/error.hpp"
#include "reliance/similarity.hpp"
#include "reliance/text.hpp"

namespace reliance {

std::string_view to_string(LabelSource source) {
    switch (source) {
        case LabelSource::Rules: return "rules";
        case LabelSource::External: return "external";
        case LabelSource::Gold: return "gold";
        case LabelSource::Human: return "human";
    }
    return "rules";
}

std::optional<LabelSource> parse_label_source(std::string_view raw) {
    const auto t = text::to_lower(raw);
    if (t == "rules") return LabelSource::Rules;
    if (t == "external") return LabelSource::External;
    if (t == "gold") return LabelSource::Gold;
    if (t == "human") return LabelSource::Human;
    return std::nullopt;
}

namespace {

using enum EngagementMode;

constexpr std::array kRules = {
    RuleInfo{"no_query", Axis::HelpSeeking, Passive, "segment has no student message (edit-only)"},
    RuleInfo{"instruction_copy", Axis::HelpSeeking, Passive, "message reproduces an activity instruction step"},
    RuleInfo{"affirmation", Axis::HelpSeeking, Passive, "short affirmation following the assistant's lead"},
    RuleInfo{"answer_request", Axis::HelpSeeking, Passive, "asks for the code or answer outright"},
    RuleInfo{"default_passive", Axis::HelpSeeking, Passive, "no rule matched; generic request"},
    RuleInfo{"specific_identifier", Axis::HelpSeeking, Active, "question naming an identifier from the learner's code"},
    RuleInfo{"specific_error", Axis::HelpSeeking, Active, "describes a concrete error or malfunction"},
    RuleInfo{"specific_knowledge", Axis::HelpSeeking, Active, "question naming a knowledge component term"},
    RuleInfo{"form_directive", Axis::HelpSeeking, Constructive, "shapes the form of help (hint, example, no answer)"},
    RuleInfo{"hypothesis_confirmation", Axis::HelpSeeking, Constructive, "asks to confirm the learner's own hypothesis"},
    RuleInfo{"no_response", Axis::ResponseUse, Passive, "no assistant response in the segment"},
    RuleInfo{"read_and_move_on", Axis::ResponseUse, Passive, "response read, no edits or pastes followed"},
    RuleInfo{"no_net_change", Axis::ResponseUse, Passive, "edits followed but left the artifact unchanged"},
    RuleInfo{"copy_response", Axis::ResponseUse, Passive, "pasted response content verbatim"},
    RuleInfo{"write_over", Axis::ResponseUse, Passive, "typed response content verbatim"},
    RuleInfo{"unrelated_edit", Axis::ResponseUse, Passive, "small edit unrelated to the response"},
    RuleInfo{"correct_artifact", Axis::ResponseUse, Active, "small localized fix drawn from the response"},
    RuleInfo{"customize_response", Axis::ResponseUse, Active, "response content adapted (renames, data changes)"},
    RuleInfo{"clarification_question", Axis::ResponseUse, Active, "question about the response content"},
    RuleInfo{"follow_up_clarification", Axis::ResponseUse, Active,
             "next segment opens with a question about this segment's response"},
    RuleInfo{"create_own", Axis::ResponseUse, Constructive, "substantial new content unlike any response block"},
    RuleInfo{"constructive_question", Axis::ResponseUse, Constructive, "applies the response to a new case"},
    RuleInfo{"follow_up_new_case", Axis::ResponseUse, Constructive,
             "next segment opens by applying this segment's response to a new case"},
    RuleInfo{"default_axis", Axis::HelpSeeking, Passive, "no evidence on this axis; Passive injected"},
    RuleInfo{"external_response", Axis::HelpSeeking, Passive, "answer line of the external classifier; mode as parsed"},
};

MessageEvidence make_evidence(EvidenceKind kind, std::size_t ref, std::string_view rule, std::string note = {}) {
    const auto* info = find_rule(rule);
    MessageEvidence ev;
    ev.kind = kind;
    ev.ref = ref;
    ev.axis = info->axis;
    ev.mode = info->mode;
    ev.rule_id = std::string(rule);
    ev.note = std::move(note);
    return ev;
}

bool contains_any(std::string_view lowered, const std::vector<std::string>& terms) {
    return std::any_of(terms.begin(), terms.end(), [&](const std::string& t) {
        return text::find_term(lowered, text::to_lower(t)) != std::string_view::npos;
    });
}

const std::string* first_match(std::string_view lowered, const std::vector<std::string>& terms) {
    for (const auto& t : terms)
        if (text::find_term(lowered, text::to_lower(t)) != std::string_view::npos) return &t;
    return nullptr;
}

bool is_question(std::string_view message, const RuleConfig& cfg) {
    if (message.find('?') != std::string_view::npos) return true;
    auto w = text::words(message);
    return !w.empty() && std::find(cfg.interrogatives.begin(), cfg.interrogatives.end(), w.front()) !=
                             cfg.interrogatives.end();
}

std::string format_similarity(double s) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", s);
    return buf;
}

// Artifact text the learner was looking at when sending `m`.
const std::string& snapshot_at(const SessionRecord& session, const ChatMessage& m) {
    if (!m.code_snapshot.empty()) return m.code_snapshot;
    const CodeEdit* latest = nullptr;
    for (const auto& e : session.edits)
        if (e.ts <= m.ts) latest = &e;
    static const std::string kEmpty;
    return latest ? latest->snapshot : kEmpty;
}

}  // namespace

std::span<const RuleInfo> rule_catalog() { return kRules; }

const RuleInfo* find_rule(std::string_view id) {
    for (const auto& r : kRules)
        if (r.id == id) return &r;
    return nullptr;
}

RuleConfig RuleConfig::defaults() {
    RuleConfig c;
    c.affirmations = {"yes", "yeah", "yep", "y", "ok", "okay", "sure", "thanks", "thank", "you", "thx",
                      "go", "ahead", "next", "continue", "please", "alright", "great", "got", "it",
                      "cool", "fine", "done", "nice", "good"};
    c.answer_requests = {"give me the code", "give me code", "give me the answer", "give me the full code",
                         "give me the solution", "show me the code", "show me the answer", "show me the solution",
                         "write the code", "write code for", "write it for me", "do it for me", "just the answer",
                         "just give me", "complete the code", "fix it for me", "fix the code for me", "solve it",
                         "the whole code", "the entire code", "full code", "answer code"};
    c.form_directives = {"hint", "hints", "example", "examples", "skeleton", "template", "don't give",
                         "do not give", "don't write", "do not write", "don't tell", "do not tell",
                         "without giving", "without the answer", "without telling", "guide me", "approach",
                         "insight", "walk me through", "let me try", "i want to try"};
    c.hypothesis_markers = {"right?", "correct?", "isn't it?", "is that right", "is that correct", "is this correct",
                            "is this right", "am i right", "am i correct", "am i on the right track",
                            "would that work", "will that work", "does this work"};
    c.interrogatives = {"how", "what", "why", "where", "when", "which", "who", "whats", "can", "could",
                        "does", "do", "is", "are", "should", "would", "will", "did"};
    c.error_terms = {"error", "errors", "exception", "undefined", "unexpected", "warning", "not defined",
                     "is not a function", "not working", "doesn't work", "does not work", "isn't working",
                     "bug", "fails", "failed", "crash", "crashes", "typeerror", "syntaxerror", "referenceerror"};
    c.new_case_cues = {"what if", "what about", "instead of", "instead", "can i also", "could i also",
                       "would it also", "is it possible to", "another way", "other way", "in general",
                       "also work", "what happens if", "does it work for", "could i use", "can i use"};
    c.clarification_cues = {"what does", "what is", "what's", "what are", "mean", "means", "meaning", "why",
                            "explain", "how does", "how do", "difference", "confused", "don't understand",
                            "do not understand", "refer", "refers"};
    c.stopwords = {"a",     "an",    "the",   "is",    "are",   "was",   "were",  "be",    "to",    "of",
                   "in",    "on",    "at",    "for",   "and",   "or",    "but",   "if",    "it",    "this",
                   "that",  "these", "those", "i",     "you",   "we",    "my",    "me",    "your",  "do",
                   "does",  "did",   "how",   "what",  "why",   "when",  "where", "which", "who",   "can",
                   "could", "should", "would", "will", "with",  "as",    "by",    "from",  "about", "into",
                   "not",   "no",    "yes",   "so",    "then",  "there", "here",  "have",  "has",   "had",
                   "just",  "also",  "get",   "got",   "use",   "using", "make",  "like",  "want",  "need",
                   "please", "thanks", "its", "it's",  "im",    "i'm",   "don't", "dont",  "some",  "any",
                   "all",   "more",  "them",  "they",  "their", "one",   "now",   "well",  "really", "way",
                   "same",  "help",  "sure",  "okay",  "ok",    "add",   "new",   "set"};
    return c;
}

RuleConfig RuleConfig::from_config(const KeyValueConfig& kv) {
    auto c = defaults();
    auto num = [&](const char* key, double& slot) {
        if (auto v = kv.number(std::string("thresholds.") + key)) slot = *v;
    };
    auto count = [&](const char* key, std::size_t& slot) {
        if (auto v = kv.number(std::string("thresholds.") + key)) {
            if (*v < 0) throw ValidationError(std::string("thresholds.") + key + " must be non-negative");
            slot = static_cast<std::size_t>(*v);
        }
    };
    auto lex = [&](const char* key, std::vector<std::string>& slot) {
        if (auto v = kv.list(std::string("lexicons.") + key)) slot = *v;
    };
    num("instruction_copy", c.instruction_copy);
    num("verbatim_reuse", c.verbatim_reuse);
    num("novel_content", c.novel_content);
    count("novel_min_chars", c.novel_min_chars);
    num("follow_up_overlap", c.follow_up_overlap);
    count("affirmation_max_tokens", c.affirmation_max_tokens);
    count("identifier_min_length", c.identifier_min_length);
    lex("affirmations", c.affirmations);
    lex("answer_requests", c.answer_requests);
    lex("form_directives", c.form_directives);
    lex("hypothesis_markers", c.hypothesis_markers);
    lex("interrogatives", c.interrogatives);
    lex("error_terms", c.error_terms);
    lex("new_case_cues", c.new_case_cues);
    lex("clarification_cues", c.clarification_cues);
    lex("stopwords", c.stopwords);
    if (c.novel_content > c.verbatim_reuse)
        throw ValidationError("thresholds.novel_content must not exceed thresholds.verbatim_reuse");
    return c;
}

std::vector<std::string> extract_code_blocks(std::string_view message) {
    std::vector<std::string> blocks;
    std::size_t pos = 0;
    while (true) {
        auto open = message.find("```", pos);
        if (open == std::string_view::npos) break;
        auto body = message.find('\n', open);
        if (body == std::string_view::npos) break;
        auto close = message.find("```", body + 1);
        if (close == std::string_view::npos) break;
        auto block = message.substr(body + 1, close - body - 1);
        if (!block.empty() && block.back() == '\n') block.remove_suffix(1);
        blocks.emplace_back(block);
        pos = close + 3;
    }
    if (blocks.empty()) blocks.emplace_back(message);
    return blocks;
}

double reuse_similarity(std::string_view inserted, std::string_view block) {
    const auto a = text::decode_utf8(text::normalize(inserted));
    const auto b = text::decode_utf8(text::normalize(block));
    if (a.empty()) return 0.0;
    // Approximate substring matching: free start and end in `block`.
    std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t cost = a[i - 1] == b[j - 1] ? 0 : 1;
            cur[j] = std::min({prev[j - 1] + cost, prev[j] + 1, cur[j - 1] + 1});
        }
        std::swap(prev, cur);
    }
    const auto best = *std::min_element(prev.begin(), prev.end());
    return std::max(0.0, 1.0 - static_cast<double>(best) / static_cast<double>(a.size()));
}

double lexical_overlap(std::string_view message, std::string_view response, const RuleConfig& cfg) {
    std::set<std::string> stop(cfg.stopwords.begin(), cfg.stopwords.end());
    std::set<std::string> content;
    for (auto& w : text::words(message))
        if (w.size() >= 3 && !stop.count(w)) content.insert(std::move(w));
    if (content.empty()) return 0.0;
    const auto in_response = text::words(response);
    std::set<std::string> resp(in_response.begin(), in_response.end());
    std::size_t shared = 0;
    for (const auto& w : content) shared += resp.count(w);
    return static_cast<double>(shared) / static_cast<double>(content.size());
}

AxisResult classify_help_seeking_rules(const SessionRecord& session, const InteractionSegment& segment,
                                       std::span<const std::string> instructions,
                                       std::span<const KnowledgeComponentDef> kcs, const RuleConfig& cfg) {
    AxisResult result;
    std::set<std::string> stop(cfg.stopwords.begin(), cfg.stopwords.end());
    std::vector<std::string> kc_terms;
    for (const auto& kc : kcs)
        for (const auto& t : kc.lexicon)
            if (!t.empty()) kc_terms.push_back(text::to_lower(t));

    for (std::size_t i = segment.first_index; i <= segment.last_index && i < session.messages.size(); ++i) {
        const auto& m = session.messages[i];
        if (m.role != Role::Student) continue;
        const auto lowered = text::to_lower(m.text);

        double best_instruction = 0.0;
        for (const auto& step : instructions) best_instruction = std::max(best_instruction, text_similarity(m.text, step));
        if (!instructions.empty() && best_instruction >= cfg.instruction_copy) {
            result.evidence.push_back(make_evidence(EvidenceKind::Message, i, "instruction_copy",
                                                    "similarity " + format_similarity(best_instruction)));
            continue;
        }
        if (const auto* t = first_match(lowered, cfg.form_directives)) {
            result.evidence.push_back(make_evidence(EvidenceKind::Message, i, "form_directive", "'" + *t + "'"));
            continue;
        }
        if (const auto* t = first_match(lowered, cfg.hypothesis_markers)) {
            result.evidence.push_back(
                make_evidence(EvidenceKind::Message, i, "hypothesis_confirmation", "'" + *t + "'"));
            continue;
        }
        if (const auto* t = first_match(lowered, cfg.answer_requests)) {
            result.evidence.push_back(make_evidence(EvidenceKind::Message, i, "answer_request", "'" + *t + "'"));
            continue;
        }
        const auto tokens = text::words(m.text);
        if (!tokens.empty() && tokens.size() <= cfg.affirmation_max_tokens &&
            std::all_of(tokens.begin(), tokens.end(), [&](const std::string& w) {
                return std::find(cfg.affirmations.begin(), cfg.affirmations.end(), w) != cfg.affirmations.end();
            })) {
            result.evidence.push_back(make_evidence(EvidenceKind::Message, i, "affirmation"));
            continue;
        }
        if (const auto* t = first_match(lowered, cfg.error_terms)) {
            result.evidence.push_back(make_evidence(EvidenceKind::Message, i, "specific_error", "'" + *t + "'"));
            continue;
        }
        if (is_question(m.text, cfg)) {
            const auto code_ids = text::identifiers(snapshot_at(session, m));
            const std::set<std::string> code_set(code_ids.begin(), code_ids.end());
            std::string hit;
            for (const auto& id : text::identifiers(m.text)) {
                if (id.size() < cfg.identifier_min_length || stop.count(text::to_lower(id))) continue;
                if (code_set.count(id)) {
                    hit = id;
                    break;
                }
            }
            if (!hit.empty()) {
                result.evidence.push_back(make_evidence(EvidenceKind::Message, i, "specific_identifier", "'" + hit + "'"));
                continue;
            }
            if (const auto* t = first_match(lowered, kc_terms)) {
                result.evidence.push_back(make_evidence(EvidenceKind::Message, i, "specific_knowledge", "'" + *t + "'"));
                continue;
            }
        }
        result.evidence.push_back(make_evidence(EvidenceKind::Message, i, "default_passive"));
    }

    if (result.evidence.empty())
        result.evidence.push_back(make_evidence(EvidenceKind::Segment, 0, "no_query"));
    for (const auto& ev : result.evidence) result.mode = max_mode(result.mode, ev.mode);
    return result;
}

AxisResult classify_response_use_rules(const SessionRecord& session, const InteractionSegment& segment,
                                       const RuleConfig& cfg) {
    AxisResult result;
    std::vector<std::size_t> assistant;
    for (std::size_t i = segment.first_index; i <= segment.last_index && i < session.messages.size(); ++i)
        if (session.messages[i].role == Role::Assistant) assistant.push_back(i);
    if (assistant.empty()) {
        result.evidence.push_back(make_evidence(EvidenceKind::Segment, 0, "no_response"));
        return result;
    }
    const Timestamp responded_at = session.messages[assistant.front()].ts;

    std::vector<std::string> blocks;
    for (auto i : assistant)
        for (auto& b : extract_code_blocks(session.messages[i].text)) blocks.push_back(std::move(b));
    auto best_reuse = [&](std::string_view s) {
        double best = 0.0;
        for (const auto& b : blocks) best = std::max(best, reuse_similarity(s, b));
        return best;
    };

    bool pasted = false;
    for (auto c : segment.copies) {
        const auto& copy = session.copies[c];
        if (copy.ts < responded_at || text::utf8_length(copy.pasted_text) <= 2) continue;
        const double s = best_reuse(copy.pasted_text);
        if (s >= cfg.verbatim_reuse) {
            pasted = true;
            result.evidence.push_back(make_evidence(EvidenceKind::Copy, c, "copy_response", "similarity " + format_similarity(s)));
        }
    }

    std::vector<std::size_t> edits;
    for (auto e : segment.edits)
        if (session.edits[e].ts >= responded_at) edits.push_back(e);

    if (edits.empty()) {
        if (!pasted) result.evidence.push_back(make_evidence(EvidenceKind::Segment, 0, "read_and_move_on"));
    } else {
        const auto first = edits.front();
        std::string base;
        if (first > 0) {
            base = session.edits[first - 1].snapshot;
        } else {
            for (const auto& m : session.messages)
                if (m.ts <= session.edits[first].ts && !m.code_snapshot.empty()) base = m.code_snapshot;
        }
        const auto& final_snapshot = session.edits[edits.back()].snapshot;
        const auto delta = diff_snapshots(base, final_snapshot);
        const auto where = edits.back();
        const bool bulk = std::any_of(edits.begin(), edits.end(), [&](auto e) { return session.edits[e].bulk_insert; });

        if (delta.empty()) {
            result.evidence.push_back(make_evidence(EvidenceKind::Edit, where, "no_net_change"));
        } else if (text::normalize(delta.inserted).empty()) {
            result.evidence.push_back(make_evidence(EvidenceKind::Edit, where, "correct_artifact",
                                                    "removed " + std::to_string(text::utf8_length(delta.deleted)) + " chars"));
        } else {
            const double s = best_reuse(delta.inserted);
            const auto length = text::utf8_length(text::normalize(delta.inserted));
            const auto note = "similarity " + format_similarity(s) + ", " + std::to_string(length) + " chars";
            if (s >= cfg.verbatim_reuse) {
                result.evidence.push_back(
                    make_evidence(EvidenceKind::Edit, where, pasted || bulk ? "copy_response" : "write_over", note));
            } else if (length < cfg.novel_min_chars) {
                result.evidence.push_back(make_evidence(
                    EvidenceKind::Edit, where, s >= cfg.novel_content ? "correct_artifact" : "unrelated_edit", note));
            } else if (s >= cfg.novel_content) {
                result.evidence.push_back(make_evidence(EvidenceKind::Edit, where, "customize_response", note));
            } else {
                result.evidence.push_back(make_evidence(EvidenceKind::Edit, where, "create_own", note));
            }
        }
    }

    // Questions asked after a response, inside this segment.
    for (std::size_t i = assistant.front() + 1; i <= segment.last_index && i < session.messages.size(); ++i) {
        const auto& m = session.messages[i];
        if (m.role != Role::Student || !is_question(m.text, cfg)) continue;
        std::size_t prev = i;
        while (prev > segment.first_index && session.messages[prev].role != Role::Assistant) --prev;
        const auto lowered = text::to_lower(m.text);
        if (const auto* t = first_match(lowered, cfg.new_case_cues)) {
            result.evidence.push_back(make_evidence(EvidenceKind::Message, i, "constructive_question", "'" + *t + "'"));
            continue;
        }
        const double overlap = lexical_overlap(m.text, session.messages[prev].text, cfg);
        if (overlap >= cfg.follow_up_overlap || contains_any(lowered, cfg.clarification_cues))
            result.evidence.push_back(make_evidence(EvidenceKind::Message, i, "clarification_question",
                                                    "overlap " + format_similarity(overlap)));
    }

    for (const auto& ev : result.evidence) result.mode = max_mode(result.mode, ev.mode);
    return result;
}

std::vector<MessageEvidence> adjacent_evidence(const SessionRecord& session, const InteractionSegment& segment,
                                               const InteractionSegment& next, const RuleConfig& cfg) {
    std::vector<MessageEvidence> out;
    if (next.kc_id == segment.kc_id) return out;

    const ChatMessage* response = nullptr;
    for (std::size_t i = segment.first_index; i <= segment.last_index && i < session.messages.size(); ++i)
        if (session.messages[i].role == Role::Assistant) response = &session.messages[i];
    if (!response) return out;

    for (std::size_t i = next.first_index; i <= next.last_index && i < session.messages.size(); ++i) {
        const auto& m = session.messages[i];
        if (m.role != Role::Student) continue;
        if (is_question(m.text, cfg)) {
            const double overlap = lexical_overlap(m.text, response->text, cfg);
            if (overlap >= cfg.follow_up_overlap) {
                const auto lowered = text::to_lower(m.text);
                const bool new_case = first_match(lowered, cfg.new_case_cues) != nullptr;
                out.push_back(make_evidence(EvidenceKind::Message, i,
                                            new_case ? "follow_up_new_case" : "follow_up_clarification",
                                            "overlap " + format_similarity(overlap)));
            }
        }
        break;  // only the opening student message counts
    }
    return out;
}

SegmentLabel aggregate_segment(std::string segment_id, std::vector<MessageEvidence> evidence,
                               const std::vector<MessageEvidence>& adjacent) {
    SegmentLabel label;
    label.segment_id = std::move(segment_id);
    label.source = LabelSource::Rules;
    evidence.insert(evidence.end(), adjacent.begin(), adjacent.end());

    bool seen_help = false, seen_use = false;
    for (const auto& ev : evidence) {
        if (ev.axis == Axis::HelpSeeking) {
            seen_help = true;
            label.help_seeking = max_mode(label.help_seeking, ev.mode);
        } else {
            seen_use = true;
            label.response_use = max_mode(label.response_use, ev.mode);
        }
    }
    for (auto [seen, axis] : {std::pair{seen_help, Axis::HelpSeeking}, std::pair{seen_use, Axis::ResponseUse}}) {
        if (seen) continue;
        MessageEvidence ev;
        ev.kind = EvidenceKind::Segment;
        ev.axis = axis;
        ev.mode = EngagementMode::Passive;
        ev.rule_id = "default_axis";
        evidence.push_back(std::move(ev));
    }
    label.evidence = std::move(evidence);
    return label;
}

std::vector<SegmentLabel> label_session_rules(const SessionRecord& session,
                                              const std::vector<InteractionSegment>& segments,
                                              std::span<const std::string> instructions,
                                              std::span<const KnowledgeComponentDef> kcs, const RuleConfig& cfg) {
    std::vector<SegmentLabel> labels;
    labels.reserve(segments.size());
    for (std::size_t k = 0; k < segments.size(); ++k) {
        auto help = classify_help_seeking_rules(session, segments[k], instructions, kcs, cfg);
        auto use = classify_response_use_rules(session, segments[k], cfg);
        std::vector<MessageEvidence> adjacent;
        if (k + 1 < segments.size()) adjacent = adjacent_evidence(session, segments[k], segments[k + 1], cfg);
        auto evidence = std::move(help.evidence);
        evidence.insert(evidence.end(), use.evidence.begin(), use.evidence.end());
        labels.push_back(aggregate_segment(segments[k].segment_id, std::move(evidence), adjacent));
    }
    return labels;
}

void classify_copy_sources(SessionRecord& session, const RuleConfig& cfg) {
    for (auto& copy : session.copies) {
        copy.source_hint = SourceHint::Unknown;
        for (const auto& m : session.messages) {
            if (m.role != Role::Assistant || m.ts > copy.ts) continue;
            for (const auto& b : extract_code_blocks(m.text))
                if (reuse_similarity(copy.pasted_text, b) >= cfg.verbatim_reuse)
                    copy.source_hint = SourceHint::AssistantMessage;
        }
    }
}

std::string_view to_string(Mastery m) { return m == Mastery::Acquired ? "Acquired" : "Undeveloped"; }

std::string_view to_string(CollapsedContext c) {
    switch (c) {
        case CollapsedContext::AcquiredFocal: return "Acquired_Focal";
        case CollapsedContext::UndevelopedFocal: return "Undeveloped_Focal";
        case CollapsedContext::Supporting: return "Supporting";
    }
    return "Supporting";
}

std::optional<Mastery> parse_mastery(std::string_view raw) {
    const auto t = text::to_lower(raw);
    if (t == "acquired") return Mastery::Acquired;
    if (t == "undeveloped") return Mastery::Undeveloped;
    return std::nullopt;
}

std::optional<CollapsedContext> parse_context(std::string_view raw) {
    const auto t = text::to_lower(raw);
    if (t == "acquired_focal") return CollapsedContext::AcquiredFocal;
    if (t == "undeveloped_focal") return CollapsedContext::UndevelopedFocal;
    if (t == "supporting") return CollapsedContext::Supporting;
    return std::nullopt;
}

KnowledgeContext assign_knowledge_context(const KnowledgeComponentDef& kc, const SessionRecord& session) {
    KnowledgeContext ctx;
    ctx.significance = kc.significance;

    const AssessmentResponse* response = nullptr;
    if (kc.pretest_question_id) {
        for (const auto& a : session.assessments)
            if (a.phase == TestPhase::Pre && a.question_id == *kc.pretest_question_id) response = &a;
    }
    if (response) ctx.mastery = response->correct ? Mastery::Acquired : Mastery::Undeveloped;

    if (kc.significance == Significance::Supporting) {
        ctx.collapsed = CollapsedContext::Supporting;
        return ctx;
    }
    if (!response)
        throw ValidationError("focal knowledge component has no pre-test response", corpus_files::kAssessments, 0,
                              session.session_id + "/" + kc.kc_id);
    ctx.collapsed = *ctx.mastery == Mastery::Acquired ? CollapsedContext::AcquiredFocal
                                                      : CollapsedContext::UndevelopedFocal;
    return ctx;
}

}  // namespace reliance
