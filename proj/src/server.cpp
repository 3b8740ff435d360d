#include "reliance/server.hpp"

#include <chrono>
#include <set>

#include <httplib.h>
#include <json.hpp>

#include "json_io.hpp"
#include "reliance/benchmark.hpp"
#include "reliance/corpus.hpp"
#include "reliance/diff.hpp"
#include "reliance/labeling.hpp"

namespace reliance {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

ApiResponse json_response(int status, const ojson& body) { return {status, body.dump(), "application/json"}; }

ApiResponse error_response(int status, const std::string& message) {
    return json_response(status, {{"error", message}, {"status", status}});
}

ojson record_json(const LabelRecord& r) { return ojson::parse(format_label_line(r)); }

std::int64_t now_ms() {
    using namespace std::chrono;
    return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
}

std::optional<EngagementMode> strict_mode(const ojson& v) {
    if (!v.is_string()) return std::nullopt;
    const auto s = v.get<std::string>();
    for (auto m : kModes)
        if (s == to_string(m)) return m;
    return std::nullopt;
}

ojson agreement_json(const CategoricalAgreement& a) {
    return {{"agreement", a.agreement},
            {"kappa", a.kappa ? ojson(*a.kappa) : ojson(nullptr)},
            {"weighted_kappa", a.weighted_kappa ? ojson(*a.weighted_kappa) : ojson(nullptr)},
            {"n", a.n},
            {"disagreements", a.disagreements}};
}

ojson report_json(const std::string& a, const std::string& b, const AgreementReport& r) {
    ojson j;
    j["annotators"] = {a, b};
    j["agreement"] = r.joint_agreement;
    j["overlap"] = r.overlap;
    j["help_seeking"] = agreement_json(r.help_seeking);
    j["response_use"] = agreement_json(r.response_use);
    j["kc"] = r.kc ? agreement_json(*r.kc) : ojson(nullptr);
    j["disagreements"] = r.disagreements;
    return j;
}

// Labels of one round keyed by annotator then segment.
std::map<std::string, std::map<std::string, RaterLabel>> by_annotator(const std::vector<LabelRecord>& records,
                                                                      int round) {
    std::map<std::string, std::map<std::string, RaterLabel>> out;
    for (const auto& r : records) {
        if (r.round.value_or(1) != round || !r.annotator || !r.classified()) continue;
        out[*r.annotator][r.segment_id] = {*r.help_seeking, *r.response_use, r.kc_id};
    }
    return out;
}

std::set<std::string> disagreements_in(const std::vector<LabelRecord>& records, int round) {
    std::map<std::string, std::set<std::pair<int, int>>> seen;
    for (const auto& r : records)
        if (r.round.value_or(1) == round && r.classified())
            seen[r.segment_id].insert({ordinal(*r.help_seeking), ordinal(*r.response_use)});
    std::set<std::string> out;
    for (const auto& [id, pairs] : seen)
        if (pairs.size() > 1) out.insert(id);
    return out;
}

}  // namespace

AnnotationService::AnnotationService(Corpus corpus, std::vector<InteractionSegment> segments, fs::path journal)
    : corpus_(std::move(corpus)), segments_(std::move(segments)), journal_(std::move(journal)) {
    for (std::size_t i = 0; i < segments_.size(); ++i) index_[segments_[i].segment_id] = i;
    const auto rules = RuleConfig::defaults();
    for (auto session : corpus_.sessions) {
        classify_copy_sources(session, rules);
        auto& flags = pasted_from_response_[session.session_id];
        for (const auto& c : session.copies) flags.push_back(c.source_hint == SourceHint::AssistantMessage);
    }
    auto records = std::make_shared<std::vector<LabelRecord>>();
    if (fs::exists(journal_)) {
        journal_text_ = detail::read_file(journal_);
        *records = read_labels(journal_);
        std::set<std::tuple<std::string, std::string, int>> keys;
        for (const auto& r : *records) {
            if (!r.annotator) throw ValidationError("journal record without annotator", kAnnotationJournal, 0, r.segment_id);
            if (!keys.insert({r.segment_id, *r.annotator, r.round.value_or(1)}).second)
                throw ValidationError("duplicate journal record", kAnnotationJournal, 0, r.segment_id);
        }
    }
    records_ = std::move(records);
}

std::shared_ptr<const std::vector<LabelRecord>> AnnotationService::snapshot() const {
    std::lock_guard lock(snapshot_mu_);
    return records_;
}

const InteractionSegment* AnnotationService::find(const std::string& id) const {
    auto it = index_.find(id);
    return it == index_.end() ? nullptr : &segments_[it->second];
}

ApiResponse AnnotationService::list_segments(std::optional<int> round, std::optional<std::string> annotator) const {
    const int r = round.value_or(1);
    if (r < 1) return error_response(400, "round must be a positive integer");
    const auto records = snapshot();
    std::set<std::string> flagged;
    if (r > 1) flagged = disagreements_in(*records, r - 1);
    std::set<std::string> done;
    std::map<std::string, int> counts;
    for (const auto& rec : *records) {
        if (rec.round.value_or(1) != r) continue;
        ++counts[rec.segment_id];
        if (annotator && rec.annotator == annotator) done.insert(rec.segment_id);
    }
    ojson items = ojson::array();
    auto emit = [&](const InteractionSegment& s) {
        items.push_back({{"segment_id", s.segment_id},
                         {"session_id", s.session_id},
                         {"kc_id", s.kc_id},
                         {"ordinal", s.ordinal},
                         {"disagreement", flagged.count(s.segment_id) > 0},
                         {"labeled", done.count(s.segment_id) > 0},
                         {"labels_in_round", counts[s.segment_id]}});
    };
    // Disagreements from the previous round first, then canonical order.
    for (const auto& s : segments_)
        if (flagged.count(s.segment_id)) emit(s);
    for (const auto& s : segments_)
        if (!flagged.count(s.segment_id)) emit(s);
    ojson body;
    body["round"] = r;
    body["annotator"] = annotator ? ojson(*annotator) : ojson(nullptr);
    body["disagreements"] = flagged;
    body["segments"] = std::move(items);
    return json_response(200, body);
}

ApiResponse AnnotationService::get_segment(const std::string& id, std::optional<std::string> annotator,
                                           bool adjudication) const {
    const auto* seg = find(id);
    if (!seg) return error_response(404, "unknown segment '" + id + "'");
    const auto* session = corpus_.find_session(seg->session_id);
    const auto* kc = corpus_.find_kc(seg->kc_id);

    ojson body;
    body["segment_id"] = seg->segment_id;
    body["session_id"] = seg->session_id;
    body["kc_id"] = seg->kc_id;
    body["kc_name"] = kc ? ojson(kc->name) : ojson(nullptr);
    body["significance"] = kc ? ojson(std::string(to_string(kc->significance))) : ojson(nullptr);
    body["ordinal"] = seg->ordinal;
    body["first_index"] = seg->first_index;
    body["last_index"] = seg->last_index;

    ojson messages = ojson::array();
    for (const auto& m : session->messages)
        if (m.index >= seg->first_index && m.index <= seg->last_index)
            messages.push_back({{"index", m.index}, {"ts", m.ts}, {"role", std::string(to_string(m.role))}, {"text", m.text}});
    body["messages"] = std::move(messages);

    ojson edits = ojson::array();
    for (auto e : seg->edits) {
        const auto& edit = session->edits[e];
        const std::string prev = e == 0 ? std::string() : session->edits[e - 1].snapshot;
        const auto d = diff_snapshots(prev, edit.snapshot);
        edits.push_back({{"ts", edit.ts},
                         {"bulk_insert", edit.bulk_insert},
                         {"snapshot", edit.snapshot},
                         {"delta", {{"offset", d.offset}, {"deleted", d.deleted}, {"inserted", d.inserted}}}});
    }
    body["edits"] = std::move(edits);

    ojson copies = ojson::array();
    const auto& flags = pasted_from_response_.at(session->session_id);
    for (auto c : seg->copies)
        copies.push_back({{"ts", session->copies[c].ts},
                          {"pasted_text", session->copies[c].pasted_text},
                          {"from_response", flags[c]}});
    body["copies"] = std::move(copies);

    // Blind labeling: outside adjudication only the caller's own labels are shown.
    ojson labels = ojson::array();
    for (const auto& r : *snapshot()) {
        if (r.segment_id != id) continue;
        if (!adjudication && (!annotator || r.annotator != annotator)) continue;
        labels.push_back(record_json(r));
    }
    body["adjudication"] = adjudication;
    body["labels"] = std::move(labels);
    return json_response(200, body);
}

ApiResponse AnnotationService::post_label(const std::string& id, std::optional<std::string> annotator,
                                          const std::string& text) {
    if (!find(id)) return error_response(404, "unknown segment '" + id + "'");
    ojson body;
    try {
        body = ojson::parse(text);
    } catch (const ojson::parse_error&) {
        return error_response(400, "body is not valid JSON");
    }
    if (!body.is_object()) return error_response(400, "body must be a JSON object");
    if (body.contains("segment_id") && body["segment_id"] != id)
        return error_response(400, "segment_id in body does not match the URL");
    if (!annotator && body.contains("annotator") && body["annotator"].is_string())
        annotator = body["annotator"].get<std::string>();
    if (!annotator || annotator->empty()) return error_response(400, "missing X-Annotator header");
    if (body.contains("annotator") && body["annotator"] != *annotator)
        return error_response(400, "annotator in body does not match X-Annotator");

    LabelRecord rec;
    rec.segment_id = id;
    rec.source = LabelSource::Human;
    rec.annotator = annotator;
    rec.help_seeking = strict_mode(body.value("help_seeking", ojson()));
    rec.response_use = strict_mode(body.value("response_use", ojson()));
    if (!rec.help_seeking || !rec.response_use)
        return error_response(400, "help_seeking and response_use must be one of Passive, Active, Constructive");
    int round = 1;
    if (body.contains("round")) {
        if (!body["round"].is_number_integer() || body["round"].get<std::int64_t>() < 1)
            return error_response(400, "round must be a positive integer");
        round = body["round"].get<int>();
    }
    rec.round = round;
    if (body.contains("kc_id") && !body["kc_id"].is_null()) {
        if (!body["kc_id"].is_string() || !corpus_.find_kc(body["kc_id"].get<std::string>()))
            return error_response(400, "kc_id is not a known knowledge component");
        rec.kc_id = body["kc_id"].get<std::string>();
    }
    if (body.contains("timestamp") && !body["timestamp"].is_null()) {
        if (!body["timestamp"].is_number_integer()) return error_response(400, "timestamp must be an integer");
        rec.timestamp = body["timestamp"].get<std::int64_t>();
    } else {
        rec.timestamp = now_ms();
    }

    std::lock_guard lock(writer_mu_);
    auto current = snapshot();
    for (const auto& r : *current)
        if (r.segment_id == id && r.annotator == rec.annotator && r.round.value_or(1) == round)
            return error_response(409, "label already recorded for this segment, annotator and round");
    const auto line = format_label_line(rec);
    auto next_text = journal_text_ + line + "\n";
    // The journal is rewritten whole through a temporary file and rename, so a
    // crash leaves either the old or the new journal on disk.
    detail::write_file_atomic(journal_, next_text);
    journal_text_ = std::move(next_text);
    auto next = std::make_shared<std::vector<LabelRecord>>(*current);
    next->push_back(rec);
    {
        std::lock_guard swap(snapshot_mu_);
        records_ = std::move(next);
    }
    return json_response(201, record_json(rec));
}

ApiResponse AnnotationService::agreement(std::optional<int> round) const {
    const int r = round.value_or(1);
    if (r < 1) return error_response(400, "round must be a positive integer");
    const auto raters = by_annotator(*snapshot(), r);
    ojson body;
    body["round"] = r;
    std::vector<std::string> names;
    for (const auto& [name, _] : raters) names.push_back(name);
    body["annotators"] = names;
    if (names.size() < 2) {
        body["agreement"] = nullptr;
        body["note"] = "fewer than two annotators in this round";
        return json_response(200, body);
    }
    ojson pairs = ojson::array();
    for (std::size_t i = 0; i < names.size(); ++i)
        for (std::size_t k = i + 1; k < names.size(); ++k) {
            try {
                pairs.push_back(report_json(names[i], names[k], reliance::agreement(raters.at(names[i]), raters.at(names[k]))));
            } catch (const ValidationError&) {
                pairs.push_back({{"annotators", {names[i], names[k]}}, {"agreement", nullptr}, {"overlap", 0}});
            }
        }
    // The first pair is reported at top level; with exactly two annotators it is the whole story.
    for (auto& [key, value] : pairs[0].items())
        if (key != "annotators") body[key] = value;
    body["pairs"] = std::move(pairs);
    return json_response(200, body);
}

ApiResponse AnnotationService::export_labels(std::optional<int> round) const {
    std::string out;
    for (const auto& r : *snapshot())
        if (!round || r.round.value_or(1) == *round) out += format_label_line(r) + "\n";
    return {200, out, "application/x-ndjson"};
}

std::unique_ptr<AnnotationService> open_annotation_service(const fs::path& corpus_dir, const fs::path& state) {
    auto corpus = load_corpus(corpus_dir);
    const auto seg_path = state / pipeline_files::kSegments;
    if (!fs::exists(seg_path)) throw ValidationError("state directory has no segments; run the segment stage first", seg_path.string());
    auto segments = read_segments(seg_path, corpus);
    return std::make_unique<AnnotationService>(std::move(corpus), std::move(segments), state / kAnnotationJournal);
}

AnnotationServer::AnnotationServer(AnnotationService& service, ServerOptions options)
    : service_(service), options_(std::move(options)), http_(std::make_unique<httplib::Server>()) {
    auto send = [](httplib::Response& res, const ApiResponse& api) {
        res.status = api.status;
        res.set_content(api.body, api.content_type);
    };
    auto round_of = [](const httplib::Request& req) -> std::optional<int> {
        if (!req.has_param("round")) return std::nullopt;
        try {
            std::size_t used = 0;
            const auto v = std::stoi(req.get_param_value("round"), &used);
            if (used != req.get_param_value("round").size()) return 0;
            return v;
        } catch (...) {
            return 0;  // rejected as invalid by the service
        }
    };
    auto annotator_of = [](const httplib::Request& req) -> std::optional<std::string> {
        if (req.has_header("X-Annotator")) return req.get_header_value("X-Annotator");
        if (req.has_param("annotator")) return req.get_param_value("annotator");
        return std::nullopt;
    };

    http_->Get("/api/segments", [=, this](const httplib::Request& req, httplib::Response& res) {
        send(res, service_.list_segments(round_of(req), annotator_of(req)));
    });
    http_->Get(R"(/api/segments/([^/]+))", [=, this](const httplib::Request& req, httplib::Response& res) {
        const bool adjudication = req.has_param("adjudication") && req.get_param_value("adjudication") == "true";
        send(res, service_.get_segment(req.matches[1], annotator_of(req), adjudication));
    });
    http_->Post(R"(/api/segments/([^/]+)/labels)", [=, this](const httplib::Request& req, httplib::Response& res) {
        std::optional<std::string> annotator;
        if (req.has_header("X-Annotator")) annotator = req.get_header_value("X-Annotator");
        send(res, service_.post_label(req.matches[1], annotator, req.body));
    });
    http_->Get("/api/agreement", [=, this](const httplib::Request& req, httplib::Response& res) {
        send(res, service_.agreement(round_of(req)));
    });
    http_->Get("/api/export", [=, this](const httplib::Request& req, httplib::Response& res) {
        send(res, service_.export_labels(round_of(req)));
    });
    http_->set_exception_handler([send](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
        std::string what = "internal error";
        try {
            std::rethrow_exception(ep);
        } catch (const std::exception& e) {
            what = e.what();
        } catch (...) {
        }
        send(res, error_response(500, what));
    });
    if (options_.static_dir && fs::is_directory(*options_.static_dir))
        http_->set_mount_point("/", options_.static_dir->string());
}

AnnotationServer::~AnnotationServer() { stop(); }

int AnnotationServer::bind() {
    if (options_.port == 0) {
        const int port = http_->bind_to_any_port(options_.host);
        if (port <= 0) throw Error("could not bind " + options_.host);
        options_.port = port;
        return port;
    }
    if (!http_->bind_to_port(options_.host, options_.port))
        throw Error("could not bind " + options_.host + ":" + std::to_string(options_.port));
    return options_.port;
}

void AnnotationServer::run() { http_->listen_after_bind(); }

void AnnotationServer::stop() {
    if (http_) http_->stop();
}

}  // namespace reliance
