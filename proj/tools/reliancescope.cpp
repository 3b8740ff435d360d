// reliancescope: command-line entry point for the reliance analysis pipeline.

#include <csignal>
#include <cstdio>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "reliance/error.hpp"
#include "reliance/pipeline.hpp"
#include "reliance/server.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

reliance::AnnotationServer* g_server = nullptr;

void on_signal(int) {
    if (g_server) g_server->stop();
}

int fail(int code, const char* kind, const std::string& message, const reliance::ValidationError* v = nullptr) {
    ordered_json j;
    j["error"] = kind;
    j["message"] = v ? v->detail() : message;
    if (v) {
        if (!v->file().empty()) j["file"] = v->file();
        if (v->line() > 0) j["line"] = v->line();
        if (!v->record().empty()) j["record"] = v->record();
    }
    std::cerr << j.dump() << "\n";
    return code;
}

void print(const ordered_json& j) { std::cout << j.dump(2) << "\n"; }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Segment, label and analyse student-chatbot reliance logs"};
    app.require_subcommand(1);

    reliance::RunConfig cfg;
    std::string mode = "rules", strategy = "few_shot_9_cot", axis = "both", fixture;
    std::uint64_t seed = 0;
    std::string gold, gold_kcs, config;
    int port = reliance::kDefaultPort;
    std::string host = "127.0.0.1", static_dir;

    auto common = [&](CLI::App* sub, bool needs_out = true) {
        sub->add_option("--corpus", cfg.corpus, "Corpus directory");
        if (needs_out) sub->add_option("--out", cfg.out, "Output directory")->required();
        sub->add_option("--fixture", fixture, "Generate a seeded synthetic corpus into <out>/corpus and use it")
            ->check(CLI::IsMember({"synth"}));
        sub->add_option("--jobs", cfg.jobs, "Worker threads")->check(CLI::Range(1u, 256u));
        sub->add_option("--config", config, "Rules config file (thresholds and lexicons)");
        sub->add_option("--gold-kcs", gold_kcs, "Gold KC assignments (default: gold_kcs.jsonl in the corpus)");
        sub->add_flag("--lexicon-kcs", cfg.lexicon_kcs, "Assign KCs by lexicon even if gold assignments exist");
    };
    auto classify_opts = [&](CLI::App* sub) {
        sub->add_option("--mode", mode, "Classifier")->check(CLI::IsMember({"rules", "external", "gold"}));
        sub->add_option("--endpoint", cfg.endpoint, "http://host:port/path or exec:COMMAND");
        sub->add_option("--gold", gold, "Gold labels (default: gold_labels.jsonl in the corpus)");
        sub->add_option("--strategy", strategy, "Prompt strategy")
            ->check(CLI::IsMember({"zero_shot", "few_shot_3", "few_shot_9", "few_shot_9_cot"}));
        sub->add_option("--axis", axis, "Axes asked in one prompt")
            ->check(CLI::IsMember({"help_seeking", "response_use", "both"}));
        sub->add_option("--retries", cfg.retries, "Extra attempts after an unparseable answer")->check(CLI::Range(0, 20));
    };
    auto analyze_opts = [&](CLI::App* sub) {
        sub->add_option("--seed", seed, "Seed for permutation tests");
        sub->add_option("--suite", cfg.suite, "all, or a comma-separated list of suites");
        sub->add_option("--permutations", cfg.permutations, "Permutations for Somers' D")->check(CLI::Range(1, 10000000));
        sub->add_option("--delta", cfg.delta, "Zero replacement value for compositions")->check(CLI::Range(1e-12, 1.0));
    };

    auto* validate = app.add_subcommand("validate", "Load and validate a corpus");
    common(validate, false);
    validate->add_option("--out", cfg.out, "Output directory (only used with --fixture)");
    auto* segment = app.add_subcommand("segment", "Assign KCs and build interaction segments");
    common(segment);
    auto* classify = app.add_subcommand("classify", "Label segments");
    common(classify);
    classify_opts(classify);
    auto* context = app.add_subcommand("context", "Assign knowledge contexts to segments");
    common(context);
    auto* analyze = app.add_subcommand("analyze", "Run the statistics suites");
    common(analyze);
    classify_opts(analyze);
    analyze_opts(analyze);
    auto* benchmark = app.add_subcommand("benchmark", "Score labels against gold");
    common(benchmark);
    classify_opts(benchmark);
    benchmark->add_flag("--drop-unclassified", cfg.drop_unclassified, "Leave unclassified predictions out of scoring");
    auto* report = app.add_subcommand("report", "Render a text summary of the analysis");
    common(report);
    classify_opts(report);
    analyze_opts(report);
    auto* serve = app.add_subcommand("serve", "Run the annotation server");
    common(serve);
    serve->add_option("--port", port, "Port")->check(CLI::Range(0, 65535));
    serve->add_option("--host", host, "Bind address");
    serve->add_option("--static", static_dir, "Directory of annotation UI assets served at /");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail(1, "usage", e.what());
    }

    try {
        auto* sub = app.get_subcommands().front();
        if (auto* o = sub->get_option_no_throw("--seed"); o && o->count()) cfg.seed = seed;
        cfg.mode = *reliance::parse_classifier_mode(mode);
        cfg.strategy = *reliance::parse_strategy(strategy);
        cfg.axis = *reliance::parse_prompt_axis(axis);
        if (!gold.empty()) cfg.gold = gold;
        if (!gold_kcs.empty()) cfg.gold_kcs = gold_kcs;
        if (!config.empty()) cfg.config = config;
        if (!fixture.empty()) {
            if (cfg.out.empty()) throw reliance::ValidationError("--fixture needs --out");
            cfg.corpus = cfg.out / "corpus";
            reliance::write_fixture(7, cfg.corpus);
        }

        const std::string name = sub->get_name();
        if (name == "validate") print(reliance::run_validate(cfg));
        else if (name == "segment") print(reliance::run_segment(cfg));
        else if (name == "classify") print(reliance::run_classify(cfg));
        else if (name == "context") print(reliance::run_context(cfg));
        else if (name == "analyze") print(reliance::run_analyze(cfg));
        else if (name == "benchmark") print(reliance::run_benchmark(cfg));
        else if (name == "report") std::cout << reliance::run_report(cfg);
        else if (name == "serve") {
            if (!fs::exists(cfg.out / "segments.jsonl")) reliance::run_segment(cfg);
            auto service = reliance::open_annotation_service(cfg.corpus, cfg.out);
            reliance::ServerOptions opts;
            opts.host = host;
            opts.port = port;
            if (!static_dir.empty()) opts.static_dir = static_dir;
            reliance::AnnotationServer server(*service, opts);
            const int bound = server.bind();
            g_server = &server;
            std::signal(SIGINT, on_signal);
            std::signal(SIGTERM, on_signal);
            std::cout << ordered_json{{"listening", host + ":" + std::to_string(bound)},
                                      {"journal", service->journal().string()}}.dump()
                      << std::endl;
            server.run();
            g_server = nullptr;
        }
    } catch (const reliance::ValidationError& e) {
        return fail(1, "validation", e.what(), &e);
    } catch (const reliance::DomainError& e) {
        return fail(2, "domain", e.what());
    } catch (const reliance::EndpointError& e) {
        return fail(2, "endpoint", e.what());
    } catch (const std::exception& e) {
        return fail(2, "runtime", e.what());
    }
    return 0;
}
