#include "reliance/pipeline.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "json_io.hpp"
#include "reliance/analysis.hpp"
#include "reliance/benchmark.hpp"
#include "reliance/config.hpp"
#include "reliance/corpus.hpp"
#include "reliance/hash.hpp"
#include "reliance/labeling.hpp"
#include "reliance/records.hpp"
#include "reliance/segmenter.hpp"
#include "reliance/synth.hpp"
#include "reliance/text.hpp"

namespace reliance {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;
using detail::write_file_atomic;

std::string_view to_string(ClassifierMode mode) {
    switch (mode) {
        case ClassifierMode::Rules: return "rules";
        case ClassifierMode::External: return "external";
        case ClassifierMode::Gold: return "gold";
    }
    return "rules";
}

std::optional<ClassifierMode> parse_classifier_mode(std::string_view raw) {
    const auto t = text::to_lower(raw);
    if (t == "rules") return ClassifierMode::Rules;
    if (t == "external") return ClassifierMode::External;
    if (t == "gold") return ClassifierMode::Gold;
    return std::nullopt;
}

namespace {

// Runs fn(i) for i in [0, n) on up to `jobs` threads. Callers store results by
// index so output order never depends on scheduling.
template <typename Fn>
void parallel_for(std::size_t n, unsigned jobs, Fn&& fn) {
    const unsigned workers = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(n)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex mu;
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i; (i = next.fetch_add(1)) < n;) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(mu);
                    if (!error) error = std::current_exception();
                    next = n;
                }
            }
        });
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

fs::path out_file(const RunConfig& cfg, const char* name) { return cfg.out / name; }

void ensure_out(const RunConfig& cfg) {
    if (cfg.out.empty()) throw ValidationError("--out is required");
    fs::create_directories(cfg.out);
}

Corpus load(const RunConfig& cfg) {
    if (cfg.corpus.empty()) throw ValidationError("--corpus is required");
    return load_corpus(cfg.corpus);
}

RuleConfig rule_config(const RunConfig& cfg) {
    if (!cfg.config) return RuleConfig::defaults();
    return RuleConfig::from_config(KeyValueConfig::load(*cfg.config));
}

std::optional<fs::path> gold_labels_path(const RunConfig& cfg) {
    if (cfg.gold) return cfg.gold;
    const auto p = cfg.corpus / gold_files::kLabels;
    if (fs::exists(p)) return p;
    return std::nullopt;
}

std::optional<fs::path> gold_kcs_path(const RunConfig& cfg) {
    if (cfg.lexicon_kcs) return std::nullopt;
    if (cfg.gold_kcs) return cfg.gold_kcs;
    const auto p = cfg.corpus / gold_files::kKcs;
    if (fs::exists(p)) return p;
    return std::nullopt;
}

std::vector<InteractionSegment> segments_of(const std::vector<InteractionSegment>& all, const std::string& session) {
    std::vector<InteractionSegment> out;
    for (const auto& s : all)
        if (s.session_id == session) out.push_back(s);
    return out;
}

std::vector<InteractionSegment> load_segments(const RunConfig& cfg, const Corpus& corpus) {
    if (!fs::exists(out_file(cfg, pipeline_files::kSegments))) run_segment(cfg);
    return read_segments(out_file(cfg, pipeline_files::kSegments), corpus);
}

ojson confusion_json(const ConfusionMatrix& m) {
    ojson j;
    ojson counts = ojson::array();
    for (const auto& row : m.counts) counts.push_back(row);
    j["counts"] = std::move(counts);
    j["unclassified"] = m.unclassified;
    ojson per = ojson::array();
    for (auto mode : kModes) {
        const auto& c = m.per_class[static_cast<std::size_t>(ordinal(mode))];
        per.push_back({{"mode", std::string(to_string(mode))}, {"precision", c.precision}, {"recall", c.recall},
                       {"f1", c.f1}, {"support", c.support}});
    }
    j["per_class"] = std::move(per);
    j["f1_passive"] = m.per_class[0].f1;
    j["f1_micro"] = m.f1_micro;
    j["accuracy"] = m.accuracy;
    j["scored"] = m.scored;
    j["dropped"] = m.dropped;
    std::int64_t unc = 0;
    for (auto u : m.unclassified) unc += u;
    j["unclassified_total"] = unc;
    return j;
}

std::string confusion_csv(const ConfusionMatrix& m) {
    std::string out = "gold,Passive,Active,Constructive,Unclassified\n";
    for (auto g : kModes) {
        const auto i = static_cast<std::size_t>(ordinal(g));
        out += std::string(to_string(g));
        for (auto c : m.counts[i]) out += "," + std::to_string(c);
        out += "," + std::to_string(m.unclassified[i]) + "\n";
    }
    return out;
}

std::string dump(const ojson& j) { return j.dump(2) + "\n"; }

}  // namespace

std::string input_digest(const std::vector<fs::path>& files) {
    Fnv1a h;
    for (const auto& f : files) {
        if (!fs::exists(f)) continue;
        h.update(f.filename().string());
        h.update(std::string(1, '\0'));
        h.update(detail::read_file(f));
    }
    return h.hex();
}

ojson run_validate(const RunConfig& cfg) {
    const auto corpus = load(cfg);
    std::size_t messages = 0, edits = 0, copies = 0, excluded = 0, assessments = 0, srl = 0;
    for (const auto& s : corpus.sessions) {
        messages += s.messages.size();
        edits += s.edits.size();
        copies += s.copies.size();
        assessments += s.assessments.size();
        srl += s.srl.size();
        if (s.excluded) ++excluded;
    }
    ojson j;
    j["sessions"] = corpus.sessions.size();
    j["excluded_sessions"] = excluded;
    j["messages"] = messages;
    j["edits"] = edits;
    j["copies"] = copies;
    j["knowledge_components"] = corpus.kcs.size();
    j["instructions"] = corpus.instructions.size();
    j["assessment_responses"] = assessments;
    j["srl_responses"] = srl;
    return j;
}

ojson run_segment(const RunConfig& cfg) {
    ensure_out(cfg);
    const auto corpus = load(cfg);
    std::optional<std::vector<KcAssignment>> gold;
    if (auto p = gold_kcs_path(cfg)) gold = read_kc_assignments(*p);

    const auto n = corpus.sessions.size();
    std::vector<std::vector<KcAssignment>> assignments(n);
    std::vector<std::vector<InteractionSegment>> segments(n);
    parallel_for(n, cfg.jobs, [&](std::size_t i) {
        const auto& s = corpus.sessions[i];
        if (s.excluded) return;
        assignments[i] = assign_kcs(s, corpus.kcs, gold ? &*gold : nullptr);
        segments[i] = build_segments(s, assignments[i]);
    });
    std::vector<KcAssignment> all_assignments;
    std::vector<InteractionSegment> all_segments;
    for (std::size_t i = 0; i < n; ++i) {
        all_assignments.insert(all_assignments.end(), assignments[i].begin(), assignments[i].end());
        all_segments.insert(all_segments.end(), segments[i].begin(), segments[i].end());
    }
    write_kc_assignments(out_file(cfg, pipeline_files::kKcAssignments), all_assignments);
    write_segments(out_file(cfg, pipeline_files::kSegments), all_segments, corpus);
    return {{"segments", all_segments.size()},
            {"kc_source", gold ? "gold" : "lexicon"},
            {"files", {pipeline_files::kKcAssignments, pipeline_files::kSegments}}};
}

ojson run_classify(const RunConfig& cfg) {
    ensure_out(cfg);
    const auto corpus = load(cfg);
    const auto segments = load_segments(cfg, corpus);
    std::vector<LabelRecord> labels;
    ojson summary;
    summary["mode"] = std::string(to_string(cfg.mode));

    // Exemplar ids are only meaningful for the run that chose them.
    if (cfg.mode != ClassifierMode::External) fs::remove(out_file(cfg, output_files::kExemplars));

    if (cfg.mode == ClassifierMode::Rules) {
        const auto rules = rule_config(cfg);
        const auto n = corpus.sessions.size();
        std::vector<std::vector<SegmentLabel>> per(n);
        parallel_for(n, cfg.jobs, [&](std::size_t i) {
            const auto& s = corpus.sessions[i];
            per[i] = label_session_rules(s, segments_of(segments, s.session_id), corpus.instructions, corpus.kcs, rules);
        });
        for (const auto& v : per)
            for (const auto& l : v) labels.push_back(LabelRecord::from(l));
    } else if (cfg.mode == ClassifierMode::Gold) {
        const auto path = gold_labels_path(cfg);
        if (!path) throw ValidationError("gold mode needs gold labels (--gold or gold_labels.jsonl in the corpus)");
        std::map<std::string, LabelRecord> gold;
        for (auto& l : read_labels(*path)) gold[l.segment_id] = std::move(l);
        for (const auto& s : segments) {
            auto it = gold.find(s.segment_id);
            if (it == gold.end())
                throw ValidationError("no gold label for segment", path->filename().string(), 0, s.segment_id);
            auto rec = it->second;
            rec.source = LabelSource::Gold;
            labels.push_back(std::move(rec));
        }
    } else {
        std::string uri = cfg.endpoint;
        if (uri.empty())
            if (const char* env = std::getenv("RELIANCESCOPE_ENDPOINT")) uri = env;
        if (uri.empty()) throw ValidationError("external mode needs --endpoint or RELIANCESCOPE_ENDPOINT");
        PromptConfig prompt;
        prompt.strategy = cfg.strategy;
        prompt.axis = cfg.axis;
        ojson exemplar_ids = ojson::array();
        if (exemplar_count(cfg.strategy) > 0) {
            const auto path = gold_labels_path(cfg);
            if (!path) throw ValidationError("few-shot prompts need gold labels for exemplars");
            prompt.exemplars = select_exemplars(corpus, segments, read_labels(*path), cfg.strategy);
            for (const auto& e : prompt.exemplars) exemplar_ids.push_back(e.segment_id);
        }
        prompt.validate();
        write_file_atomic(out_file(cfg, output_files::kExemplars), dump(exemplar_ids));
        auto endpoint = make_endpoint(uri);
        ExternalOptions opts;
        opts.retries = cfg.retries;
        opts.jobs = std::max(1u, cfg.jobs);
        labels = classify_external_batch(corpus, segments, prompt, *endpoint, opts);
        summary["strategy"] = std::string(to_string(cfg.strategy));
        summary["exemplars"] = exemplar_ids;
    }

    std::size_t unclassified = 0;
    for (const auto& l : labels)
        if (!l.classified()) ++unclassified;
    write_labels(out_file(cfg, pipeline_files::kLabels), labels);
    summary["labels"] = labels.size();
    summary["unclassified"] = unclassified;
    return summary;
}

ojson run_context(const RunConfig& cfg) {
    ensure_out(cfg);
    const auto corpus = load(cfg);
    const auto segments = load_segments(cfg, corpus);
    std::vector<ContextRecord> out;
    out.reserve(segments.size());
    std::array<std::size_t, kContextCount> counts{};
    for (const auto& s : segments) {
        const auto* kc = corpus.find_kc(s.kc_id);
        const auto* session = corpus.find_session(s.session_id);
        if (!kc || !session) throw ValidationError("segment refers to unknown kc or session", {}, 0, s.segment_id);
        auto ctx = assign_knowledge_context(*kc, *session);
        ++counts[static_cast<std::size_t>(ctx.collapsed)];
        out.push_back({s.segment_id, s.session_id, s.kc_id, ctx});
    }
    write_contexts(out_file(cfg, pipeline_files::kContexts), out);
    ojson c;
    for (std::size_t i = 0; i < kContextCount; ++i)
        c[std::string(to_string(static_cast<CollapsedContext>(i)))] = counts[i];
    return {{"segments", out.size()}, {"contexts", c}};
}

ojson run_analyze(const RunConfig& cfg) {
    ensure_out(cfg);
    AnalysisParams params;
    if (cfg.suite != "all") {
        std::stringstream ss(cfg.suite);
        for (std::string name; std::getline(ss, name, ',');)
            if (!name.empty()) params.suites.insert(name);
    }
    const bool permutations = params.suites.empty() || params.suites.count("somers");
    if (permutations && !cfg.seed) throw ValidationError("--seed is required when permutation tests run");
    params.seed = cfg.seed.value_or(0);
    params.permutations = cfg.permutations;
    params.delta = cfg.delta;
    params.jobs = std::max(1u, cfg.jobs);

    const auto corpus = load(cfg);
    if (!fs::exists(out_file(cfg, pipeline_files::kSegments))) run_segment(cfg);
    if (!fs::exists(out_file(cfg, pipeline_files::kLabels))) run_classify(cfg);
    if (!fs::exists(out_file(cfg, pipeline_files::kContexts))) run_context(cfg);
    const auto segments = read_segments(out_file(cfg, pipeline_files::kSegments), corpus);
    const auto labels = read_labels(out_file(cfg, pipeline_files::kLabels));
    const auto contexts = read_contexts(out_file(cfg, pipeline_files::kContexts));

    std::vector<fs::path> files;
    for (const char* f : {corpus_files::kMessages, corpus_files::kEdits, corpus_files::kCopies, corpus_files::kKcs,
                          corpus_files::kAssessments, corpus_files::kSrl, corpus_files::kInstructions,
                          corpus_files::kSessions})
        files.push_back(cfg.corpus / f);
    for (const char* f : {pipeline_files::kSegments, pipeline_files::kLabels, pipeline_files::kContexts})
        files.push_back(out_file(cfg, f));

    AnalysisInputs in{&corpus, &segments, &labels, &contexts, input_digest(files)};
    auto result = run_analysis(in, params);
    write_file_atomic(out_file(cfg, output_files::kAnalysis), dump(result.report));
    ojson written = ojson::array({output_files::kAnalysis});
    for (const auto& [name, content] : result.csv) {
        write_file_atomic(out_file(cfg, name.c_str()), content);
        written.push_back(name);
    }
    const auto text = render_text_report(result.report, nullptr);
    write_file_atomic(out_file(cfg, output_files::kReport), text);
    written.push_back(output_files::kReport);
    return {{"digest", in.digest}, {"files", written}};
}

ojson run_benchmark(const RunConfig& cfg) {
    ensure_out(cfg);
    if (!fs::exists(out_file(cfg, pipeline_files::kLabels))) run_classify(cfg);
    const auto gold_path = gold_labels_path(cfg);
    if (!gold_path) throw ValidationError("benchmark needs gold labels (--gold or gold_labels.jsonl in the corpus)");

    std::set<std::string> exemplars;
    if (fs::exists(out_file(cfg, output_files::kExemplars)))
        for (const auto& id : detail::parse_json_file(out_file(cfg, output_files::kExemplars)))
            exemplars.insert(id.get<std::string>());

    AxisLabels gold_h, gold_u, pred_h, pred_u;
    for (const auto& l : read_labels(*gold_path)) {
        if (exemplars.count(l.segment_id)) continue;
        gold_h[l.segment_id] = l.help_seeking;
        gold_u[l.segment_id] = l.response_use;
    }
    for (const auto& l : read_labels(out_file(cfg, pipeline_files::kLabels))) {
        if (exemplars.count(l.segment_id)) continue;
        pred_h[l.segment_id] = l.help_seeking;
        pred_u[l.segment_id] = l.response_use;
    }
    const auto help = score_predictions(gold_h, pred_h, Axis::HelpSeeking, cfg.drop_unclassified);
    const auto use = score_predictions(gold_u, pred_u, Axis::ResponseUse, cfg.drop_unclassified);

    ojson disagreements = ojson::array();
    for (const auto& [id, g] : gold_h)
        if (pred_h[id] != g || pred_u[id] != gold_u[id]) disagreements.push_back(id);

    ojson report;
    report["gold"] = gold_path->filename().string();
    report["predictions"] = pipeline_files::kLabels;
    report["segments"] = gold_h.size();
    report["drop_unclassified"] = cfg.drop_unclassified;
    report["excluded_exemplars"] = exemplars;
    report["help_seeking"] = confusion_json(help);
    report["response_use"] = confusion_json(use);
    report["disagreements"] = std::move(disagreements);
    write_file_atomic(out_file(cfg, output_files::kBenchmark), dump(report));
    write_file_atomic(out_file(cfg, "confusion_help_seeking.csv"), confusion_csv(help));
    write_file_atomic(out_file(cfg, "confusion_response_use.csv"), confusion_csv(use));
    return {{"help_seeking", {{"f1_passive", help.per_class[0].f1}, {"f1_micro", help.f1_micro}}},
            {"response_use", {{"f1_passive", use.per_class[0].f1}, {"f1_micro", use.f1_micro}}}};
}

std::string run_report(const RunConfig& cfg) {
    ensure_out(cfg);
    if (!fs::exists(out_file(cfg, output_files::kAnalysis))) run_analyze(cfg);
    const auto analysis = ojson::parse(detail::read_file(out_file(cfg, output_files::kAnalysis)));
    std::optional<ojson> bench;
    if (fs::exists(out_file(cfg, output_files::kBenchmark)))
        bench = ojson::parse(detail::read_file(out_file(cfg, output_files::kBenchmark)));
    const auto text = render_text_report(analysis, bench ? &*bench : nullptr);
    write_file_atomic(out_file(cfg, output_files::kReport), text);
    return text;
}

ojson write_fixture(std::uint64_t seed, const fs::path& dir) {
    SynthOptions opts;
    opts.seed = seed;
    const auto synth = generate_synthetic(opts);
    fs::create_directories(dir);
    write_synthetic(synth, dir);
    return {{"corpus", dir.string()},
            {"sessions", synth.corpus.sessions.size()},
            {"gold_labels", synth.gold_labels.size()}};
}

}  // namespace reliance
