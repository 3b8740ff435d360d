#include "reliance/records.hpp"

#include <map>

#include "json_io.hpp"
#include "reliance/error.hpp"

namespace reliance {

using namespace detail;
using ojson = nlohmann::ordered_json;

std::string_view to_string(EvidenceKind kind) {
    switch (kind) {
        case EvidenceKind::Message: return "message";
        case EvidenceKind::Edit: return "edit";
        case EvidenceKind::Copy: return "copy";
        case EvidenceKind::Segment: return "segment";
    }
    return "segment";
}

std::optional<EvidenceKind> parse_evidence_kind(std::string_view text) {
    if (text == "message") return EvidenceKind::Message;
    if (text == "edit") return EvidenceKind::Edit;
    if (text == "copy") return EvidenceKind::Copy;
    if (text == "segment") return EvidenceKind::Segment;
    return std::nullopt;
}

std::optional<ReliancePattern> LabelRecord::pattern() const {
    if (!classified()) return std::nullopt;
    return ReliancePattern{*help_seeking, *response_use};
}

LabelRecord LabelRecord::from(const SegmentLabel& label) {
    LabelRecord r;
    r.segment_id = label.segment_id;
    r.help_seeking = label.help_seeking;
    r.response_use = label.response_use;
    r.source = label.source;
    r.evidence = label.evidence;
    return r;
}

namespace {

std::string join_lines(const std::vector<std::string>& lines) {
    std::string out;
    for (const auto& l : lines) {
        out += l;
        out += '\n';
    }
    return out;
}

ojson mode_json(const std::optional<EngagementMode>& m) {
    return m ? ojson(std::string(to_string(*m))) : ojson(nullptr);
}

std::optional<EngagementMode> mode_field(const RecordReader& r, const char* key) {
    const auto& v = r.field(key);
    if (v.is_null()) return std::nullopt;
    if (!v.is_string()) r.fail(std::string("field '") + key + "' must be a mode name or null");
    auto m = parse_mode(v.get<std::string>());
    if (!m) r.fail(std::string("invalid mode in '") + key + "': " + v.get<std::string>());
    return m;
}

MessageEvidence evidence_from(const json& j, const RecordReader& owner) {
    if (!j.is_object()) owner.fail("evidence entries must be objects");
    RecordReader r(j, owner.file(), owner.line());
    MessageEvidence ev;
    auto kind = parse_evidence_kind(r.str("kind"));
    if (!kind) r.fail("unknown evidence kind");
    ev.kind = *kind;
    ev.ref = static_cast<std::size_t>(r.integer("ref"));
    auto axis = parse_axis(r.str("axis"));
    if (!axis) r.fail("unknown evidence axis");
    ev.axis = *axis;
    auto mode = parse_mode(r.str("mode"));
    if (!mode) r.fail("unknown evidence mode");
    ev.mode = *mode;
    ev.rule_id = r.str("rule");
    if (r.has("note")) ev.note = r.str("note");
    return ev;
}

}  // namespace

std::string format_label_line(const LabelRecord& rec) {
    ojson j;
    j["segment_id"] = rec.segment_id;
    j["help_seeking"] = mode_json(rec.help_seeking);
    j["response_use"] = mode_json(rec.response_use);
    j["source"] = std::string(to_string(rec.source));
    ojson ev = ojson::array();
    for (const auto& e : rec.evidence) {
        ojson x;
        x["kind"] = std::string(to_string(e.kind));
        x["ref"] = e.ref;
        x["axis"] = std::string(to_string(e.axis));
        x["mode"] = std::string(to_string(e.mode));
        x["rule"] = e.rule_id;
        x["note"] = e.note;
        ev.push_back(std::move(x));
    }
    j["evidence"] = std::move(ev);
    if (rec.annotator) j["annotator"] = *rec.annotator;
    if (rec.round) j["round"] = *rec.round;
    if (rec.kc_id) j["kc_id"] = *rec.kc_id;
    if (rec.timestamp) j["timestamp"] = *rec.timestamp;
    if (!rec.raw.empty()) j["raw"] = rec.raw;
    return j.dump();
}

LabelRecord parse_label_line(std::string_view text, const std::string& file, std::size_t line) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("malformed JSON: ") + e.what(), file, line);
    }
    RecordReader r(j, file, line);
    LabelRecord rec;
    rec.segment_id = r.str("segment_id");
    rec.help_seeking = mode_field(r, "help_seeking");
    rec.response_use = mode_field(r, "response_use");
    auto source = parse_label_source(r.str("source"));
    if (!source) r.fail("unknown label source");
    rec.source = *source;
    if (r.has("evidence")) {
        const auto& ev = r.field("evidence");
        if (!ev.is_array()) r.fail("field 'evidence' must be an array");
        for (const auto& e : ev) rec.evidence.push_back(evidence_from(e, r));
    }
    if (r.has("annotator")) rec.annotator = r.str("annotator");
    if (r.has("round")) rec.round = static_cast<int>(r.integer("round"));
    if (r.has("kc_id")) rec.kc_id = r.str("kc_id");
    if (r.has("timestamp")) rec.timestamp = r.integer("timestamp");
    if (r.has("raw")) {
        const auto& raw = r.field("raw");
        if (!raw.is_array()) r.fail("field 'raw' must be an array");
        for (const auto& x : raw) {
            if (!x.is_string()) r.fail("field 'raw' must hold strings");
            rec.raw.push_back(x.get<std::string>());
        }
    }
    return rec;
}

void write_labels(const fs::path& path, const std::vector<LabelRecord>& labels) {
    std::vector<std::string> lines;
    for (const auto& l : labels) lines.push_back(format_label_line(l));
    write_file_atomic(path, join_lines(lines));
}

std::vector<LabelRecord> read_labels(const fs::path& path) {
    std::vector<LabelRecord> out;
    const auto name = path.filename().string();
    std::istringstream in(read_file(path));
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        out.push_back(parse_label_line(line, name, lineno));
    }
    return out;
}

void write_kc_assignments(const fs::path& path, const std::vector<KcAssignment>& assignments) {
    std::vector<std::string> lines;
    for (const auto& a : assignments) {
        ojson j;
        j["session_id"] = a.session_id;
        j["message_index"] = a.message_index;
        j["kc_id"] = a.kc_id ? ojson(*a.kc_id) : ojson(nullptr);
        j["source"] = std::string(to_string(a.source));
        lines.push_back(j.dump());
    }
    write_file_atomic(path, join_lines(lines));
}

std::vector<KcAssignment> read_kc_assignments(const fs::path& path) {
    std::vector<KcAssignment> out;
    for_each_jsonl(path, [&](const RecordReader& r, std::size_t) {
        KcAssignment a;
        a.session_id = r.str("session_id");
        const auto idx = r.integer("message_index");
        if (idx < 0) r.fail("message_index must be non-negative");
        a.message_index = static_cast<std::size_t>(idx);
        if (r.has("kc_id")) a.kc_id = r.str("kc_id");
        if (r.has("source")) {
            auto s = parse_kc_source(r.str("source"));
            if (!s) r.fail("unknown kc source");
            a.source = *s;
        } else {
            a.source = KcSource::Gold;
        }
        out.push_back(std::move(a));
    });
    return out;
}

void write_segments(const fs::path& path, const std::vector<InteractionSegment>& segments, const Corpus& corpus) {
    std::vector<std::string> lines;
    for (const auto& s : segments) {
        const auto* session = corpus.find_session(s.session_id);
        if (!session) throw ValidationError("segment refers to an unknown session", {}, 0, s.segment_id);
        ojson j;
        j["segment_id"] = s.segment_id;
        j["session_id"] = s.session_id;
        j["kc_id"] = s.kc_id;
        j["first_index"] = s.first_index;
        j["last_index"] = s.last_index;
        ojson edits = ojson::array(), copies = ojson::array();
        for (auto e : s.edits) edits.push_back(session->edits.at(e).ts);
        for (auto c : s.copies) copies.push_back(session->copies.at(c).ts);
        j["edit_ts"] = std::move(edits);
        j["copy_ts"] = std::move(copies);
        lines.push_back(j.dump());
    }
    write_file_atomic(path, join_lines(lines));
}

std::vector<InteractionSegment> read_segments(const fs::path& path, const Corpus& corpus) {
    std::vector<InteractionSegment> out;
    // Next unclaimed edit/copy index per session, so repeated timestamps map in order.
    std::map<std::string, std::size_t> next_edit, next_copy, ordinal;
    for_each_jsonl(path, [&](const RecordReader& r, std::size_t) {
        InteractionSegment s;
        s.segment_id = r.str("segment_id");
        s.session_id = r.str("session_id");
        s.kc_id = r.str("kc_id");
        const auto first = r.integer("first_index"), last = r.integer("last_index");
        if (first < 0 || last < first) r.fail("invalid message span");
        s.first_index = static_cast<std::size_t>(first);
        s.last_index = static_cast<std::size_t>(last);
        const auto* session = corpus.find_session(s.session_id);
        if (!session) r.fail("unknown session '" + s.session_id + "'");
        if (s.last_index >= session->messages.size()) r.fail("message span exceeds the session");
        auto resolve = [&](const char* key, auto& items, std::size_t& cursor, std::vector<std::size_t>& into) {
            const auto& arr = r.field(key);
            if (!arr.is_array()) r.fail(std::string("field '") + key + "' must be an array");
            for (const auto& t : arr) {
                if (!t.is_number_integer()) r.fail(std::string("field '") + key + "' must hold integers");
                const auto ts = t.get<Timestamp>();
                while (cursor < items.size() && items[cursor].ts != ts) ++cursor;
                if (cursor == items.size()) r.fail(std::string("timestamp in '") + key + "' not found in corpus");
                into.push_back(cursor++);
            }
        };
        resolve("edit_ts", session->edits, next_edit[s.session_id], s.edits);
        resolve("copy_ts", session->copies, next_copy[s.session_id], s.copies);
        s.ordinal = ordinal[s.session_id]++;
        out.push_back(std::move(s));
    });
    return out;
}

void write_contexts(const fs::path& path, const std::vector<ContextRecord>& contexts) {
    std::vector<std::string> lines;
    for (const auto& c : contexts) {
        ojson j;
        j["segment_id"] = c.segment_id;
        j["session_id"] = c.session_id;
        j["kc_id"] = c.kc_id;
        j["mastery"] = c.context.mastery ? ojson(std::string(to_string(*c.context.mastery))) : ojson(nullptr);
        j["significance"] = std::string(to_string(c.context.significance));
        j["context"] = std::string(to_string(c.context.collapsed));
        lines.push_back(j.dump());
    }
    write_file_atomic(path, join_lines(lines));
}

std::vector<ContextRecord> read_contexts(const fs::path& path) {
    std::vector<ContextRecord> out;
    for_each_jsonl(path, [&](const RecordReader& r, std::size_t) {
        ContextRecord c;
        c.segment_id = r.str("segment_id");
        c.session_id = r.str("session_id");
        c.kc_id = r.str("kc_id");
        if (r.has("mastery")) {
            auto m = parse_mastery(r.str("mastery"));
            if (!m) r.fail("unknown mastery");
            c.context.mastery = m;
        }
        auto sig = parse_significance(r.str("significance"));
        if (!sig) r.fail("unknown significance");
        c.context.significance = *sig;
        auto ctx = parse_context(r.str("context"));
        if (!ctx) r.fail("unknown context");
        c.context.collapsed = *ctx;
        out.push_back(std::move(c));
    });
    return out;
}

}  // namespace reliance
