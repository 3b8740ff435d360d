#include "reliance/segmenter.hpp"

#include <algorithm>
#include <limits>
#include <set>

#include "reliance/error.hpp"
#include "reliance/hash.hpp"
#include "reliance/text.hpp"

namespace reliance {

std::string_view to_string(KcSource source) {
    switch (source) {
        case KcSource::Gold: return "gold";
        case KcSource::Lexicon: return "lexicon";
        case KcSource::External: return "external";
    }
    return "lexicon";
}

std::optional<KcSource> parse_kc_source(std::string_view raw) {
    const auto t = text::to_lower(raw);
    if (t == "gold") return KcSource::Gold;
    if (t == "lexicon") return KcSource::Lexicon;
    if (t == "external") return KcSource::External;
    return std::nullopt;
}

namespace {

struct LexiconScore {
    std::size_t hits = 0;
    std::size_t first = std::numeric_limits<std::size_t>::max();
};

LexiconScore score_message(std::string_view lowered, const KnowledgeComponentDef& kc) {
    LexiconScore score;
    for (const auto& term : kc.lexicon) {
        const auto needle = text::to_lower(term);
        if (needle.empty()) continue;
        auto pos = text::find_term(lowered, needle);
        while (pos != std::string_view::npos) {
            ++score.hits;
            score.first = std::min(score.first, pos);
            pos = text::find_term(lowered, needle, pos + needle.size());
        }
    }
    return score;
}

}  // namespace

std::vector<KcAssignment> assign_kcs(const SessionRecord& session, std::span<const KnowledgeComponentDef> kcs,
                                     const std::vector<KcAssignment>* gold) {
    std::vector<KcAssignment> out;
    out.reserve(session.messages.size());

    if (gold) {
        std::map<std::size_t, const KcAssignment*> by_index;
        for (const auto& g : *gold) {
            if (g.session_id != session.session_id) continue;
            if (g.kc_id && std::none_of(kcs.begin(), kcs.end(), [&](const auto& kc) { return kc.kc_id == *g.kc_id; }))
                throw ValidationError("gold assignment references unknown kc_id '" + *g.kc_id + "'", "", 0,
                                      session.session_id + "#" + std::to_string(g.message_index));
            by_index[g.message_index] = &g;
        }
        std::optional<std::string> last_student;
        for (const auto& m : session.messages) {
            auto it = by_index.find(m.index);
            if (it != by_index.end()) {
                out.push_back(*it->second);
                if (m.role == Role::Student) last_student = it->second->kc_id;
                continue;
            }
            if (m.role == Role::Student)
                throw ValidationError("gold assignments do not cover student message", "", 0,
                                      session.session_id + "#" + std::to_string(m.index));
            out.push_back({session.session_id, m.index, last_student, KcSource::Gold});
        }
        return out;
    }

    const bool any_terms = std::any_of(kcs.begin(), kcs.end(), [](const auto& kc) {
        return std::any_of(kc.lexicon.begin(), kc.lexicon.end(), [](const auto& t) { return !t.empty(); });
    });
    if (!any_terms) throw ValidationError("lexicon assignment needs at least one non-empty lexicon");

    std::optional<std::string> last_student;
    for (const auto& m : session.messages) {
        KcAssignment a{session.session_id, m.index, std::nullopt, KcSource::Lexicon};
        if (m.role == Role::Student) {
            const auto lowered = text::to_lower(m.text);
            LexiconScore best;
            const KnowledgeComponentDef* winner = nullptr;
            for (const auto& kc : kcs) {
                auto s = score_message(lowered, kc);
                if (s.hits == 0) continue;
                if (!winner || s.hits > best.hits || (s.hits == best.hits && s.first < best.first)) {
                    best = s;
                    winner = &kc;
                }
            }
            if (winner) a.kc_id = winner->kc_id;
            last_student = a.kc_id;
        } else {
            a.kc_id = last_student;
        }
        out.push_back(std::move(a));
    }
    return out;
}

std::string make_segment_id(std::string_view session_id, std::size_t first, std::size_t last) {
    Fnv1a h;
    h.update(session_id);
    h.update(":");
    h.update(std::to_string(first));
    h.update("-");
    h.update(std::to_string(last));
    return "seg-" + h.hex();
}

std::vector<InteractionSegment> build_segments(const SessionRecord& session,
                                               const std::vector<KcAssignment>& assignments) {
    const auto n = session.messages.size();
    std::vector<std::optional<std::string>> kc(n);
    std::vector<bool> covered(n, false);
    for (const auto& a : assignments) {
        if (a.session_id != session.session_id) continue;
        if (a.message_index >= n)
            throw ValidationError("assignment for a message that does not exist", "", 0,
                                  session.session_id + "#" + std::to_string(a.message_index));
        kc[a.message_index] = a.kc_id;
        covered[a.message_index] = true;
    }
    for (std::size_t i = 0; i < n; ++i)
        if (!covered[i])
            throw ValidationError("message has no knowledge component assignment", "", 0,
                                  session.session_id + "#" + std::to_string(i));

    // NONE merges backwards first; leading NONEs merge forwards.
    std::optional<std::string> carry;
    for (std::size_t i = 0; i < n; ++i) {
        if (kc[i]) carry = kc[i];
        else kc[i] = carry;
    }
    carry.reset();
    for (std::size_t i = n; i-- > 0;) {
        if (kc[i]) carry = kc[i];
        else kc[i] = carry;
    }

    std::vector<InteractionSegment> segments;
    for (std::size_t i = 0; i < n;) {
        if (!kc[i]) break;  // whole session unassigned
        std::size_t j = i;
        while (j + 1 < n && kc[j + 1] == kc[i]) ++j;
        InteractionSegment seg;
        seg.session_id = session.session_id;
        seg.kc_id = *kc[i];
        seg.first_index = i;
        seg.last_index = j;
        seg.segment_id = make_segment_id(session.session_id, i, j);
        seg.ordinal = segments.size();
        segments.push_back(std::move(seg));
        i = j + 1;
    }

    for (std::size_t k = 0; k < segments.size(); ++k) {
        const Timestamp start = session.messages[segments[k].first_index].ts;
        const Timestamp end = k + 1 < segments.size() ? session.messages[segments[k + 1].first_index].ts
                                                      : std::numeric_limits<Timestamp>::max();
        auto in_window = [&](Timestamp ts) {
            return ts >= start && (k + 1 == segments.size() ? true : ts < end);
        };
        for (std::size_t e = 0; e < session.edits.size(); ++e)
            if (in_window(session.edits[e].ts)) segments[k].edits.push_back(e);
        for (std::size_t c = 0; c < session.copies.size(); ++c)
            if (in_window(session.copies[c].ts)) segments[k].copies.push_back(c);
    }
    return segments;
}

std::map<std::string, std::vector<SequenceItem>> segment_sequence(
    const std::vector<InteractionSegment>& segments, const std::map<std::string, ReliancePattern>& patterns) {
    std::map<std::string, std::vector<const InteractionSegment*>> by_session;
    for (const auto& s : segments) by_session[s.session_id].push_back(&s);

    std::map<std::string, std::vector<SequenceItem>> out;
    for (auto& [session, list] : by_session) {
        std::stable_sort(list.begin(), list.end(),
                         [](const auto* a, const auto* b) { return a->ordinal < b->ordinal; });
        auto& seq = out[session];
        for (const auto* s : list) {
            auto it = patterns.find(s->segment_id);
            if (it == patterns.end()) throw ValidationError("segment has no label", "", 0, s->segment_id);
            seq.push_back({s->segment_id, it->second});
        }
    }
    return out;
}

}  // namespace reliance
