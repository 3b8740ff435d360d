#include "reliance/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "json_io.hpp"

#include "reliance/diff.hpp"
#include "reliance/error.hpp"
#include "reliance/text.hpp"

namespace reliance {

using nlohmann::json;
namespace fs = std::filesystem;

using namespace detail;

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur.push_back('"');
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(std::move(cur));
    return out;
}

template <typename Fn>
void for_each_csv(const fs::path& path, const std::vector<std::string>& header, Fn&& fn) {
    const auto name = path.filename().string();
    std::istringstream in(read_file(path));
    std::string line;
    std::size_t lineno = 0;
    bool seen_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto cells = split_csv_line(line);
        if (!seen_header) {
            if (cells != header) throw ValidationError("unexpected CSV header", name, lineno);
            seen_header = true;
            continue;
        }
        if (cells.size() != header.size())
            throw ValidationError("expected " + std::to_string(header.size()) + " columns", name, lineno);
        fn(cells, name, lineno);
    }
    if (!seen_header) throw ValidationError("missing CSV header", name);
}

int parse_int(const std::string& s, const std::string& file, std::size_t line) {
    try {
        std::size_t used = 0;
        int v = std::stoi(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ValidationError("not an integer: '" + s + "'", file, line);
    }
}

bool parse_bool_cell(const std::string& s, const std::string& file, std::size_t line) {
    auto t = text::to_lower(s);
    if (t == "true" || t == "1") return true;
    if (t == "false" || t == "0") return false;
    throw ValidationError("not a boolean: '" + s + "'", file, line);
}

struct Raw {
    std::vector<std::pair<std::string, std::pair<bool, std::string>>> sessions;
    std::vector<ChatMessage> messages;
    std::vector<CodeEdit> edits;
    std::vector<CopyEvent> copies;
    std::vector<AssessmentResponse> assessments;
    std::vector<SrlResponse> srl;
};

}  // namespace

void validate_corpus(const Corpus& corpus) {
    std::set<std::string> kc_ids;
    for (const auto& kc : corpus.kcs) {
        if (!kc_ids.insert(kc.kc_id).second) throw ValidationError("duplicate kc_id", corpus_files::kKcs, 0, kc.kc_id);
        if (kc.significance == Significance::Focal && !kc.pretest_question_id)
            throw ValidationError("focal knowledge component needs a pretest_question_id", corpus_files::kKcs, 0,
                                  kc.kc_id);
    }

    std::set<std::string> questions;
    for (const auto& s : corpus.sessions)
        for (const auto& a : s.assessments) questions.insert(a.question_id);
    for (const auto& kc : corpus.kcs)
        if (kc.pretest_question_id && !questions.count(*kc.pretest_question_id))
            throw ValidationError("pretest_question_id '" + *kc.pretest_question_id + "' not found in assessments",
                                  corpus_files::kKcs, 0, kc.kc_id);

    std::set<std::string> seen;
    for (const auto& s : corpus.sessions) {
        if (!seen.insert(s.session_id).second)
            throw ValidationError("duplicate session_id", corpus_files::kSessions, 0, s.session_id);

        for (std::size_t i = 0; i < s.messages.size(); ++i) {
            const auto& m = s.messages[i];
            const auto id = s.session_id + "#" + std::to_string(m.index);
            if (m.session_id != s.session_id)
                throw ValidationError("message filed under the wrong session", corpus_files::kMessages, 0, id);
            if (m.index != i) throw ValidationError("message indices must be contiguous from 0", corpus_files::kMessages, 0, id);
            if (i > 0 && m.ts < s.messages[i - 1].ts)
                throw ValidationError("message timestamps must be non-decreasing", corpus_files::kMessages, 0, id);
        }

        std::string prev_snapshot;
        for (std::size_t i = 0; i < s.edits.size(); ++i) {
            const auto& e = s.edits[i];
            const auto id = s.session_id + "@" + std::to_string(e.ts);
            if (i > 0 && e.ts < s.edits[i - 1].ts)
                throw ValidationError("edit timestamps must be non-decreasing", corpus_files::kEdits, 0, id);
            if (e.bulk_insert) {
                const auto delta = diff_snapshots(prev_snapshot, e.snapshot);
                if (text::utf8_length(delta.inserted) <= 2)
                    throw ValidationError("bulk_insert edit inserts two characters or fewer", corpus_files::kEdits, 0, id);
            }
            prev_snapshot = e.snapshot;
        }

        for (std::size_t i = 0; i < s.copies.size(); ++i) {
            const auto& c = s.copies[i];
            const auto id = s.session_id + "@" + std::to_string(c.ts);
            if (c.pasted_text.empty()) throw ValidationError("empty pasted_text", corpus_files::kCopies, 0, id);
            if (i > 0 && c.ts < s.copies[i - 1].ts)
                throw ValidationError("copy timestamps must be non-decreasing", corpus_files::kCopies, 0, id);
        }

        for (const auto& a : s.assessments)
            if (a.answer == kIdkAnswer && a.correct)
                throw ValidationError("IDK answer marked correct", corpus_files::kAssessments, 0,
                                      s.session_id + "/" + a.question_id);

        std::set<SrlScale> scales;
        for (const auto& r : s.srl) {
            if (!scales.insert(r.scale).second)
                throw ValidationError("duplicate SRL scale", corpus_files::kSrl, 0,
                                      s.session_id + "/" + std::string(to_string(r.scale)));
            for (int v : r.item_scores)
                if (v < 1 || v > 7)
                    throw ValidationError("SRL item outside [1,7]", corpus_files::kSrl, 0,
                                          s.session_id + "/" + std::string(to_string(r.scale)));
        }
    }
}

Corpus load_corpus(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw ValidationError("corpus directory not found", dir.string());

    Raw raw;
    std::map<std::string, std::size_t> session_pos;

    {
        const auto name = corpus_files::kSessions;
        auto j = parse_json_file(dir / name);
        if (!j.is_array()) throw ValidationError("expected a JSON array", name);
        std::size_t k = 0;
        for (const auto& item : j) {
            ++k;
            RecordReader r(item, name, 0);
            auto id = r.str("session_id");
            bool excluded = r.boolean("excluded");
            std::string reason = r.has("exclude_reason") ? r.str("exclude_reason") : std::string{};
            if (!session_pos.emplace(id, raw.sessions.size()).second)
                throw ValidationError("duplicate session_id", name, 0, id);
            raw.sessions.push_back({id, {excluded, reason}});
        }
    }

    auto require_session = [&](const std::string& id, const char* file, std::size_t line) {
        if (!session_pos.count(id)) throw ValidationError("unknown session_id '" + id + "'", file, line);
    };

    for_each_jsonl(dir / corpus_files::kMessages, [&](const RecordReader& r, std::size_t line) {
        ChatMessage m;
        m.session_id = r.str("session_id");
        require_session(m.session_id, corpus_files::kMessages, line);
        auto idx = r.integer("index");
        if (idx < 0) r.fail("index must be non-negative");
        m.index = static_cast<std::size_t>(idx);
        m.ts = r.integer("ts");
        auto role = parse_role(r.str("role"));
        if (!role) r.fail("role must be 'student' or 'assistant'");
        m.role = *role;
        m.text = r.str("text");
        m.code_snapshot = r.has("code_snapshot") ? r.str("code_snapshot") : std::string{};
        if (!r.has("code_snapshot")) r.field("code_snapshot");  // present but null is allowed
        raw.messages.push_back(std::move(m));
    });

    for_each_jsonl(dir / corpus_files::kEdits, [&](const RecordReader& r, std::size_t line) {
        CodeEdit e;
        e.session_id = r.str("session_id");
        require_session(e.session_id, corpus_files::kEdits, line);
        e.ts = r.integer("ts");
        e.snapshot = r.str("snapshot");
        e.bulk_insert = r.boolean("bulk_insert");
        raw.edits.push_back(std::move(e));
    });

    // Timestamp order is checked here, in file order, so the error can name the line.
    {
        std::map<std::string, Timestamp> last;
        std::size_t line = 0;
        for (const auto& e : raw.edits) {
            ++line;
            auto it = last.find(e.session_id);
            if (it != last.end() && e.ts < it->second)
                throw ValidationError("edit timestamps out of order", corpus_files::kEdits, 0,
                                      e.session_id + "@" + std::to_string(e.ts) + " (record " +
                                          std::to_string(line) + ")");
            last[e.session_id] = e.ts;
        }
    }

    for_each_jsonl(dir / corpus_files::kCopies, [&](const RecordReader& r, std::size_t line) {
        CopyEvent c;
        c.session_id = r.str("session_id");
        require_session(c.session_id, corpus_files::kCopies, line);
        c.ts = r.integer("ts");
        c.pasted_text = r.str("pasted_text");
        if (c.pasted_text.empty()) r.fail("pasted_text must be non-empty");
        if (r.has("source_hint")) {
            auto h = text::to_lower(r.str("source_hint"));
            if (h == "assistant_message") c.source_hint = SourceHint::AssistantMessage;
            else if (h == "external") c.source_hint = SourceHint::External;
            else if (h == "unknown") c.source_hint = SourceHint::Unknown;
            else r.fail("unknown source_hint '" + h + "'");
        }
        raw.copies.push_back(std::move(c));
    });

    Corpus corpus;

    {
        const auto name = corpus_files::kKcs;
        auto j = parse_json_file(dir / name);
        if (!j.is_array()) throw ValidationError("expected a JSON array", name);
        for (const auto& item : j) {
            RecordReader r(item, name, 0);
            KnowledgeComponentDef kc;
            kc.kc_id = r.str("kc_id");
            kc.name = r.str("name");
            auto sig = parse_significance(r.str("significance"));
            if (!sig) throw ValidationError("significance must be Focal or Supporting", name, 0, kc.kc_id);
            kc.significance = *sig;
            if (r.has("pretest_question_id")) kc.pretest_question_id = r.str("pretest_question_id");
            if (r.has("lexicon")) {
                const auto& lex = r.field("lexicon");
                if (!lex.is_array()) throw ValidationError("lexicon must be an array", name, 0, kc.kc_id);
                for (const auto& w : lex) {
                    if (!w.is_string()) throw ValidationError("lexicon entries must be strings", name, 0, kc.kc_id);
                    kc.lexicon.push_back(w.get<std::string>());
                }
            }
            corpus.kcs.push_back(std::move(kc));
        }
    }

    for_each_csv(dir / corpus_files::kAssessments, {"session_id", "question_id", "phase", "answer", "correct"},
                 [&](const std::vector<std::string>& c, const std::string& file, std::size_t line) {
                     AssessmentResponse a;
                     a.session_id = c[0];
                     require_session(a.session_id, corpus_files::kAssessments, line);
                     a.question_id = c[1];
                     auto phase = parse_phase(c[2]);
                     if (!phase) throw ValidationError("phase must be pre or post", file, line);
                     a.phase = *phase;
                     a.answer = text::to_lower(c[3]) == "idk" ? kIdkAnswer : parse_int(c[3], file, line);
                     if (a.answer < kIdkAnswer) throw ValidationError("answer must be an option index or -1", file, line);
                     a.correct = parse_bool_cell(c[4], file, line);
                     if (a.answer == kIdkAnswer && a.correct)
                         throw ValidationError("IDK answer marked correct", file, line, a.session_id + "/" + a.question_id);
                     raw.assessments.push_back(std::move(a));
                 });

    for_each_csv(dir / corpus_files::kSrl, {"session_id", "scale", "item1", "item2", "item3"},
                 [&](const std::vector<std::string>& c, const std::string& file, std::size_t line) {
                     SrlResponse r;
                     r.session_id = c[0];
                     require_session(r.session_id, corpus_files::kSrl, line);
                     auto scale = parse_srl_scale(c[1]);
                     if (!scale) throw ValidationError("unknown SRL scale '" + c[1] + "'", file, line);
                     r.scale = *scale;
                     for (int k = 0; k < 3; ++k) {
                         r.item_scores[static_cast<std::size_t>(k)] = parse_int(c[static_cast<std::size_t>(k) + 2], file, line);
                         if (r.item_scores[static_cast<std::size_t>(k)] < 1 || r.item_scores[static_cast<std::size_t>(k)] > 7)
                             throw ValidationError("SRL item outside [1,7]", file, line);
                     }
                     raw.srl.push_back(r);
                 });

    {
        const auto name = corpus_files::kInstructions;
        auto j = parse_json_file(dir / name);
        if (!j.is_array()) throw ValidationError("expected a JSON array", name);
        for (const auto& item : j) {
            if (!item.is_string()) throw ValidationError("instructions must be strings", name);
            corpus.instructions.push_back(item.get<std::string>());
        }
    }

    // Assemble sessions in session_id order; children keep file order.
    corpus.sessions.resize(raw.sessions.size());
    for (std::size_t i = 0; i < raw.sessions.size(); ++i) {
        auto& s = corpus.sessions[i];
        s.session_id = raw.sessions[i].first;
        s.excluded = raw.sessions[i].second.first;
        s.exclude_reason = raw.sessions[i].second.second;
    }
    auto at = [&](const std::string& id) -> SessionRecord& { return corpus.sessions[session_pos.at(id)]; };
    for (auto& m : raw.messages) at(m.session_id).messages.push_back(std::move(m));
    for (auto& e : raw.edits) at(e.session_id).edits.push_back(std::move(e));
    for (auto& c : raw.copies) at(c.session_id).copies.push_back(std::move(c));
    for (auto& a : raw.assessments) at(a.session_id).assessments.push_back(std::move(a));
    for (auto& r : raw.srl) at(r.session_id).srl.push_back(r);

    for (auto& s : corpus.sessions) {
        std::stable_sort(s.messages.begin(), s.messages.end(),
                         [](const ChatMessage& a, const ChatMessage& b) { return a.index < b.index; });
        for (std::size_t i = 1; i < s.messages.size(); ++i)
            if (s.messages[i].index == s.messages[i - 1].index)
                throw ValidationError("duplicate message index", corpus_files::kMessages, 0,
                                      s.session_id + "#" + std::to_string(s.messages[i].index));
    }
    std::sort(corpus.sessions.begin(), corpus.sessions.end(),
              [](const SessionRecord& a, const SessionRecord& b) { return a.session_id < b.session_id; });

    validate_corpus(corpus);
    return corpus;
}

void write_corpus(const Corpus& corpus, const fs::path& dir) {
    fs::create_directories(dir);
    auto open = [&](const char* name) {
        std::ofstream out(dir / name, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + (dir / name).string());
        return out;
    };

    {
        auto out = open(corpus_files::kSessions);
        json arr = json::array();
        for (const auto& s : corpus.sessions)
            arr.push_back({{"session_id", s.session_id}, {"excluded", s.excluded}, {"exclude_reason", s.exclude_reason}});
        out << arr.dump(2) << '\n';
    }
    {
        auto out = open(corpus_files::kMessages);
        for (const auto& s : corpus.sessions)
            for (const auto& m : s.messages)
                out << json{{"session_id", m.session_id}, {"index", m.index}, {"ts", m.ts},
                            {"role", std::string(to_string(m.role))}, {"text", m.text},
                            {"code_snapshot", m.code_snapshot}}
                           .dump()
                    << '\n';
    }
    {
        auto out = open(corpus_files::kEdits);
        for (const auto& s : corpus.sessions)
            for (const auto& e : s.edits)
                out << json{{"session_id", e.session_id}, {"ts", e.ts}, {"snapshot", e.snapshot},
                            {"bulk_insert", e.bulk_insert}}
                           .dump()
                    << '\n';
    }
    {
        auto out = open(corpus_files::kCopies);
        for (const auto& s : corpus.sessions)
            for (const auto& c : s.copies)
                out << json{{"session_id", c.session_id}, {"ts", c.ts}, {"pasted_text", c.pasted_text}}.dump() << '\n';
    }
    {
        auto out = open(corpus_files::kKcs);
        json arr = json::array();
        for (const auto& kc : corpus.kcs) {
            json j{{"kc_id", kc.kc_id},
                   {"name", kc.name},
                   {"significance", std::string(to_string(kc.significance))},
                   {"lexicon", kc.lexicon}};
            j["pretest_question_id"] = kc.pretest_question_id ? json(*kc.pretest_question_id) : json(nullptr);
            arr.push_back(std::move(j));
        }
        out << arr.dump(2) << '\n';
    }
    {
        auto out = open(corpus_files::kAssessments);
        out << "session_id,question_id,phase,answer,correct\n";
        for (const auto& s : corpus.sessions)
            for (const auto& a : s.assessments)
                out << a.session_id << ',' << a.question_id << ',' << to_string(a.phase) << ',' << a.answer << ','
                    << (a.correct ? "true" : "false") << '\n';
    }
    {
        auto out = open(corpus_files::kSrl);
        out << "session_id,scale,item1,item2,item3\n";
        for (const auto& s : corpus.sessions)
            for (const auto& r : s.srl)
                out << r.session_id << ',' << to_string(r.scale) << ',' << r.item_scores[0] << ',' << r.item_scores[1]
                    << ',' << r.item_scores[2] << '\n';
    }
    {
        auto out = open(corpus_files::kInstructions);
        out << json(corpus.instructions).dump(2) << '\n';
    }
}

std::map<std::string, TestScores> score_assessments(const Corpus& corpus) {
    std::map<std::string, TestScores> scores;
    for (const auto& s : corpus.sessions) {
        std::set<std::pair<std::string, TestPhase>> seen;
        auto& sc = scores[s.session_id];
        for (const auto& a : s.assessments) {
            if (!seen.insert({a.question_id, a.phase}).second)
                throw ValidationError("duplicate assessment response", corpus_files::kAssessments, 0,
                                      s.session_id + "/" + a.question_id + "/" + std::string(to_string(a.phase)));
            if (!a.correct) continue;
            (a.phase == TestPhase::Pre ? sc.pre : sc.post) += 1;
        }
    }
    return scores;
}

}  // namespace reliance
