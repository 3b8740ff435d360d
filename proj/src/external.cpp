#include "reliance/external.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <csignal>
#include <exception>
#include <map>
#include <mutex>
#include <regex>
#include <set>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "reliance/diff.hpp"
#include "reliance/error.hpp"
#include "reliance/text.hpp"

namespace reliance {

std::string_view to_string(PromptStrategy s) {
    switch (s) {
        case PromptStrategy::ZeroShot: return "zero_shot";
        case PromptStrategy::FewShot3: return "few_shot_3";
        case PromptStrategy::FewShot9: return "few_shot_9";
        case PromptStrategy::FewShot9Cot: return "few_shot_9_cot";
    }
    return "zero_shot";
}

std::optional<PromptStrategy> parse_strategy(std::string_view raw) {
    const auto t = text::to_lower(raw);
    if (t == "zero_shot") return PromptStrategy::ZeroShot;
    if (t == "few_shot_3") return PromptStrategy::FewShot3;
    if (t == "few_shot_9") return PromptStrategy::FewShot9;
    if (t == "few_shot_9_cot") return PromptStrategy::FewShot9Cot;
    return std::nullopt;
}

std::size_t exemplar_count(PromptStrategy s) {
    switch (s) {
        case PromptStrategy::ZeroShot: return 0;
        case PromptStrategy::FewShot3: return 3;
        case PromptStrategy::FewShot9:
        case PromptStrategy::FewShot9Cot: return 9;
    }
    return 0;
}

std::string_view to_string(PromptAxis a) {
    switch (a) {
        case PromptAxis::HelpSeeking: return "help_seeking";
        case PromptAxis::ResponseUse: return "response_use";
        case PromptAxis::Both: return "both";
    }
    return "both";
}

std::optional<PromptAxis> parse_prompt_axis(std::string_view raw) {
    const auto t = text::to_lower(raw);
    if (t == "both") return PromptAxis::Both;
    if (auto a = parse_axis(t)) return *a == Axis::HelpSeeking ? PromptAxis::HelpSeeking : PromptAxis::ResponseUse;
    return std::nullopt;
}

void PromptConfig::validate() const {
    if (exemplars.size() != exemplar_count(strategy))
        throw ValidationError(std::string(to_string(strategy)) + " needs " + std::to_string(exemplar_count(strategy)) +
                              " exemplars, got " + std::to_string(exemplars.size()));
}

const std::string& default_codebook() {
    static const std::string text =
#include "codebook.inc"
        ;
    return text;
}

std::string render_segment(const SessionRecord& session, const InteractionSegment& segment,
                           const InteractionSegment* next) {
    std::string out = "Knowledge component: " + segment.kc_id + "\n";
    // Interleave messages, copies and edits by time.
    struct Item {
        Timestamp ts;
        int order;
        std::string text;
    };
    std::vector<Item> items;
    for (std::size_t i = segment.first_index; i <= segment.last_index && i < session.messages.size(); ++i) {
        const auto& m = session.messages[i];
        items.push_back({m.ts, 0,
                         std::string(m.role == Role::Student ? "STUDENT" : "CHATBOT") + ": " + m.text});
    }
    for (auto c : segment.copies) {
        const auto& copy = session.copies[c];
        items.push_back({copy.ts, 1, "[paste into code]\n" + copy.pasted_text});
    }
    for (auto e : segment.edits) {
        const auto& prev = e > 0 ? session.edits[e - 1].snapshot : std::string();
        const auto delta = diff_snapshots(prev, session.edits[e].snapshot);
        std::string line = "[code edit]";
        if (!delta.deleted.empty()) line += "\n- removed: " + delta.deleted;
        if (!delta.inserted.empty()) line += "\n+ added: " + delta.inserted;
        if (delta.empty()) line += " (no change)";
        items.push_back({session.edits[e].ts, 2, std::move(line)});
    }
    std::stable_sort(items.begin(), items.end(),
                     [](const Item& a, const Item& b) { return a.ts != b.ts ? a.ts < b.ts : a.order < b.order; });
    for (const auto& it : items) out += it.text + "\n";
    if (next) {
        for (std::size_t i = next->first_index; i <= next->last_index && i < session.messages.size(); ++i) {
            if (session.messages[i].role != Role::Student) continue;
            out += "Next segment (" + next->kc_id + ") opens with:\nSTUDENT: " + session.messages[i].text + "\n";
            break;
        }
    }
    return out;
}

std::string build_prompt(const PromptConfig& cfg, const std::string& rendering) {
    cfg.validate();
    std::string answer_form;
    switch (cfg.axis) {
        case PromptAxis::Both: answer_form = "HELP=<mode>;USE=<mode>"; break;
        case PromptAxis::HelpSeeking: answer_form = "HELP=<mode>"; break;
        case PromptAxis::ResponseUse: answer_form = "USE=<mode>"; break;
    }
    auto answer_line = [&](EngagementMode h, EngagementMode u) {
        switch (cfg.axis) {
            case PromptAxis::Both: return "HELP=" + std::string(to_string(h)) + ";USE=" + std::string(to_string(u));
            case PromptAxis::HelpSeeking: return "HELP=" + std::string(to_string(h));
            case PromptAxis::ResponseUse: return "USE=" + std::string(to_string(u));
        }
        return std::string();
    };

    std::string p = cfg.codebook.empty() ? default_codebook() : cfg.codebook;
    if (!p.empty() && p.back() != '\n') p += '\n';
    p += "\nEnd your reply with one line of the form " + answer_form +
         " where <mode> is Passive, Active or Constructive.\n";
    for (std::size_t i = 0; i < cfg.exemplars.size(); ++i) {
        const auto& ex = cfg.exemplars[i];
        p += "\n### Example " + std::to_string(i + 1) + "\n" + ex.rendering + "Answer:\n" +
             answer_line(ex.help_seeking, ex.response_use) + "\n";
    }
    p += "\n### Segment to label\n" + rendering;
    if (cfg.strategy == PromptStrategy::FewShot9Cot)
        p += "\nExplain your reasoning step by step before answering, then give the answer line last.\n";
    else
        p += "\nAnswer:\n";
    return p;
}

std::optional<ParsedAnswer> parse_answer(std::string_view answer, PromptAxis axis) {
    static const std::regex both(R"(^\s*HELP\s*=\s*([A-Za-z]+)\s*;\s*USE\s*=\s*([A-Za-z]+)\s*$)");
    static const std::regex help(R"(^\s*HELP\s*=\s*([A-Za-z]+)\s*$)");
    static const std::regex use(R"(^\s*USE\s*=\s*([A-Za-z]+)\s*$)");
    const auto lines = [&] {
        std::vector<std::string> out;
        std::size_t start = 0;
        while (start <= answer.size()) {
            auto end = answer.find('\n', start);
            if (end == std::string_view::npos) end = answer.size();
            std::string line(answer.substr(start, end - start));
            if (!line.empty() && line.back() == '\r') line.pop_back();
            out.push_back(std::move(line));
            start = end + 1;
        }
        return out;
    }();
    auto full_mode = [](const std::string& s) -> std::optional<EngagementMode> {
        const auto t = text::to_lower(s);
        if (t == "passive") return EngagementMode::Passive;
        if (t == "active") return EngagementMode::Active;
        if (t == "constructive") return EngagementMode::Constructive;
        return std::nullopt;
    };
    const auto& re = axis == PromptAxis::Both ? both : axis == PromptAxis::HelpSeeking ? help : use;
    for (auto it = lines.rbegin(); it != lines.rend(); ++it) {
        std::smatch m;
        if (!std::regex_match(*it, m, re)) continue;
        ParsedAnswer a;
        a.line = *it;
        if (axis == PromptAxis::Both) {
            a.help_seeking = full_mode(m[1]);
            a.response_use = full_mode(m[2]);
            if (!a.help_seeking || !a.response_use) return std::nullopt;
        } else if (axis == PromptAxis::HelpSeeking) {
            a.help_seeking = full_mode(m[1]);
            if (!a.help_seeking) return std::nullopt;
        } else {
            a.response_use = full_mode(m[1]);
            if (!a.response_use) return std::nullopt;
        }
        return a;
    }
    return std::nullopt;
}

namespace {

class HttpEndpoint : public Endpoint {
public:
    explicit HttpEndpoint(const std::string& uri) {
        static const std::regex re(R"(^http://([^/:]+)(?::(\d+))?(/.*)?$)");
        std::smatch m;
        if (!std::regex_match(uri, m, re)) throw EndpointError("unsupported endpoint URI: " + uri);
        host_ = m[1];
        port_ = m[2].matched ? std::stoi(m[2]) : 80;
        path_ = m[3].matched ? std::string(m[3]) : "/";
    }

    std::string complete(const std::string& prompt) override {
        httplib::Client client(host_, port_);
        client.set_connection_timeout(10);
        client.set_read_timeout(300);
        const nlohmann::json body = {{"prompt", prompt}};
        auto res = client.Post(path_, body.dump(), "application/json");
        if (!res)
            throw EndpointError("endpoint unreachable: " + host_ + ":" + std::to_string(port_) + " (" +
                                httplib::to_string(res.error()) + ")");
        if (res->status != 200) throw EndpointError("endpoint returned HTTP " + std::to_string(res->status));
        try {
            auto j = nlohmann::json::parse(res->body);
            if (!j.contains("text") || !j["text"].is_string()) throw EndpointError("endpoint reply lacks a 'text' string");
            return j["text"].get<std::string>();
        } catch (const nlohmann::json::exception&) {
            throw EndpointError("endpoint reply is not JSON");
        }
    }

private:
    std::string host_;
    int port_ = 80;
    std::string path_;
};

class CommandEndpoint : public Endpoint {
public:
    explicit CommandEndpoint(std::string command) : command_(std::move(command)) {
        if (command_.empty()) throw EndpointError("exec endpoint has no command");
    }

    std::string complete(const std::string& prompt) override {
        int in_pipe[2], out_pipe[2];
        if (::pipe(in_pipe) != 0) throw EndpointError("pipe failed");
        if (::pipe(out_pipe) != 0) {
            ::close(in_pipe[0]);
            ::close(in_pipe[1]);
            throw EndpointError("pipe failed");
        }
        const pid_t pid = ::fork();
        if (pid < 0) throw EndpointError("fork failed");
        if (pid == 0) {
            ::dup2(in_pipe[0], STDIN_FILENO);
            ::dup2(out_pipe[1], STDOUT_FILENO);
            ::close(in_pipe[0]);
            ::close(in_pipe[1]);
            ::close(out_pipe[0]);
            ::close(out_pipe[1]);
            ::execl("/bin/sh", "sh", "-c", command_.c_str(), static_cast<char*>(nullptr));
            ::_exit(127);
        }
        ::close(in_pipe[0]);
        ::close(out_pipe[1]);

        std::thread writer([fd = in_pipe[1], &prompt] {
            std::size_t done = 0;
            while (done < prompt.size()) {
                const auto n = ::write(fd, prompt.data() + done, prompt.size() - done);
                if (n <= 0) break;
                done += static_cast<std::size_t>(n);
            }
            ::close(fd);
        });
        std::string out;
        char buf[4096];
        while (true) {
            const auto n = ::read(out_pipe[0], buf, sizeof buf);
            if (n > 0) out.append(buf, static_cast<std::size_t>(n));
            else if (n == 0 || errno != EINTR) break;
        }
        ::close(out_pipe[0]);
        writer.join();
        int status = 0;
        ::waitpid(pid, &status, 0);
        if (!WIFEXITED(status) || WEXITSTATUS(status) != 0)
            throw EndpointError("endpoint command failed (" + command_ + ")");
        return out;
    }

private:
    std::string command_;
};

}  // namespace

std::unique_ptr<Endpoint> make_endpoint(const std::string& uri) {
    if (uri.rfind("exec:", 0) == 0) {
        // A child killed mid-write must not take the process down.
        std::signal(SIGPIPE, SIG_IGN);
        return std::make_unique<CommandEndpoint>(uri.substr(5));
    }
    if (uri.rfind("http://", 0) == 0) return std::make_unique<HttpEndpoint>(uri);
    throw EndpointError("unsupported endpoint URI (use http://... or exec:...): " + uri);
}

LabelRecord classify_external(const SessionRecord& session, const InteractionSegment& segment,
                              const InteractionSegment* next, const PromptConfig& cfg, Endpoint& endpoint,
                              const ExternalOptions& opts) {
    const auto prompt = build_prompt(cfg, render_segment(session, segment, next));
    LabelRecord rec;
    rec.segment_id = segment.segment_id;
    rec.source = LabelSource::External;
    for (int attempt = 0; attempt <= std::max(0, opts.retries); ++attempt) {
        auto answer = endpoint.complete(prompt);
        auto parsed = parse_answer(answer, cfg.axis);
        if (!parsed) {
            rec.raw.push_back(std::move(answer));
            continue;
        }
        rec.raw.clear();
        rec.help_seeking = parsed->help_seeking;
        rec.response_use = parsed->response_use;
        auto add = [&](Axis axis, EngagementMode mode) {
            MessageEvidence ev;
            ev.kind = EvidenceKind::Segment;
            ev.axis = axis;
            ev.mode = mode;
            ev.rule_id = "external_response";
            ev.note = parsed->line;
            rec.evidence.push_back(std::move(ev));
        };
        if (rec.help_seeking) add(Axis::HelpSeeking, *rec.help_seeking);
        if (rec.response_use) add(Axis::ResponseUse, *rec.response_use);
        return rec;
    }
    return rec;
}

std::vector<LabelRecord> classify_external_batch(const Corpus& corpus, const std::vector<InteractionSegment>& segments,
                                                 const PromptConfig& cfg, Endpoint& endpoint,
                                                 const ExternalOptions& opts) {
    cfg.validate();
    std::vector<LabelRecord> out(segments.size());
    std::atomic<std::size_t> cursor{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
        while (true) {
            const auto i = cursor.fetch_add(1);
            if (i >= segments.size()) return;
            {
                std::lock_guard lock(failure_mutex);
                if (failure) return;
            }
            try {
                const auto& seg = segments[i];
                const auto* session = corpus.find_session(seg.session_id);
                if (!session) throw ValidationError("segment refers to an unknown session", {}, 0, seg.segment_id);
                const InteractionSegment* next = nullptr;
                if (i + 1 < segments.size() && segments[i + 1].session_id == seg.session_id) next = &segments[i + 1];
                out[i] = classify_external(*session, seg, next, cfg, endpoint, opts);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                return;
            }
        }
    };
    const unsigned workers = std::max(1u, std::min<unsigned>(opts.jobs, static_cast<unsigned>(segments.size())));
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
    return out;
}

std::vector<Exemplar> select_exemplars(const Corpus& corpus, const std::vector<InteractionSegment>& segments,
                                       const std::vector<LabelRecord>& gold, PromptStrategy strategy) {
    const auto want = exemplar_count(strategy);
    if (want == 0) return {};
    std::map<std::string, const LabelRecord*> by_id;
    for (const auto& g : gold)
        if (g.classified()) by_id[g.segment_id] = &g;

    std::vector<std::size_t> targets;
    if (want == 3) targets = {0, 4, 8};
    else
        for (std::size_t p = 0; p < kPatternCount; ++p) targets.push_back(p);

    std::set<std::string> chosen;
    std::vector<std::pair<std::size_t, std::size_t>> picks;  // (slot, segment position)
    for (std::size_t t = 0; t < targets.size(); ++t)
        for (std::size_t s = 0; s < segments.size(); ++s) {
            auto it = by_id.find(segments[s].segment_id);
            if (it == by_id.end() || chosen.count(segments[s].segment_id)) continue;
            if (it->second->pattern()->index() != targets[t]) continue;
            chosen.insert(segments[s].segment_id);
            picks.emplace_back(t, s);
            break;
        }
    std::vector<std::size_t> filler;
    for (std::size_t s = 0; s < segments.size() && picks.size() + filler.size() < want; ++s)
        if (by_id.count(segments[s].segment_id) && !chosen.count(segments[s].segment_id)) filler.push_back(s);
    for (auto s : filler) picks.emplace_back(targets.size(), s);
    if (picks.size() < want)
        throw ValidationError(std::string(to_string(strategy)) + " needs " + std::to_string(want) +
                              " gold-labeled segments for exemplars");
    std::stable_sort(picks.begin(), picks.end());

    std::vector<Exemplar> out;
    for (auto [slot, s] : picks) {
        const auto& seg = segments[s];
        const auto* session = corpus.find_session(seg.session_id);
        if (!session) throw ValidationError("segment refers to an unknown session", {}, 0, seg.segment_id);
        const InteractionSegment* next =
            s + 1 < segments.size() && segments[s + 1].session_id == seg.session_id ? &segments[s + 1] : nullptr;
        const auto& g = *by_id.at(seg.segment_id);
        out.push_back({seg.segment_id, render_segment(*session, seg, next), *g.help_seeking, *g.response_use});
    }
    return out;
}

}  // namespace reliance
