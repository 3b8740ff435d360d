#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include <json.hpp>

#include "helpers.hpp"
#include "reliance/corpus.hpp"
#include "reliance/error.hpp"
#include "reliance/pipeline.hpp"
#include "reliance/records.hpp"
#include "reliance/segmenter.hpp"

using namespace reliance;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_cli(const std::string& args, std::string* err = nullptr) {
    const auto errfile = fs::temp_directory_path() / "reliance_cli_stderr.txt";
    const auto cmd = std::string(RELIANCESCOPE_BIN) + " " + args + " >/dev/null 2>" + errfile.string();
    const int status = std::system(cmd.c_str());
    if (err) *err = slurp(errfile);
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// Two sessions whose gold patterns only use P_P and C_C.
fs::path two_pattern_corpus() {
    const auto dir = testing::scratch("two_pattern");
    Corpus c;
    c.kcs = {{"a", "Loops", Significance::Supporting, std::nullopt, {"loop"}},
             {"b", "Methods", Significance::Supporting, std::nullopt, {"method"}}};
    c.instructions = {"Build the list."};
    const std::vector<std::vector<const char*>> patterns = {
        {"PP", "PP", "CC", "CC", "CC", "PP", "PP"}, {"PP", "PP", "PP", "CC"}};
    std::vector<LabelRecord> gold;
    for (std::size_t si = 0; si < patterns.size(); ++si) {
        testing::SessionBuilder b("T" + std::to_string(si + 1));
        for (std::size_t k = 0; k < patterns[si].size(); ++k) {
            b.student(k % 2 ? "How does the method work?" : "How does the loop work?").assistant("Like this.");
            LabelRecord r;
            r.segment_id = make_segment_id(b.s.session_id, 2 * k, 2 * k + 1);
            const auto m = patterns[si][k][0] == 'P' ? EngagementMode::Passive : EngagementMode::Constructive;
            r.help_seeking = m;
            r.response_use = m;
            r.source = LabelSource::Gold;
            gold.push_back(r);
        }
        c.sessions.push_back(b.s);
    }
    write_corpus(c, dir / "corpus");
    write_labels(dir / "corpus" / "gold_labels.jsonl", gold);
    return dir;
}

}  // namespace

TEST_CASE("lsa suite on a two-pattern corpus matches the hand computation") {
    const auto dir = two_pattern_corpus();
    RunConfig cfg;
    cfg.corpus = dir / "corpus";
    cfg.out = dir / "out";
    cfg.mode = ClassifierMode::Gold;
    cfg.suite = "lsa";
    run_analyze(cfg);
    // O = [[4, 2], [1, 2]] over (P_P, C_C); rows 6, 3; columns 5, 4; N = 9.
    const double e = 6.0 * 5.0 / 9.0;
    const double z = (4.0 - e) / std::sqrt(e * (1.0 - 6.0 / 9.0) * (1.0 - 5.0 / 9.0));
    const auto csv = slurp(cfg.out / "transitions.csv");
    char expected[128];
    std::snprintf(expected, sizeof expected, "P_P,P_P,4,%.6f,%.6f,ns\n", e, z);
    CHECK(csv.find(expected) != std::string::npos);
    std::snprintf(expected, sizeof expected, "C_C,P_P,1,%.6f,%.6f,ns\n", 3.0 * 5.0 / 9.0,
                  (1.0 - 15.0 / 9.0) / std::sqrt(15.0 / 9.0 * (1.0 - 3.0 / 9.0) * (1.0 - 5.0 / 9.0)));
    CHECK(csv.find(expected) != std::string::npos);
    const auto report = nlohmann::json::parse(slurp(cfg.out / "analysis_report.json"));
    CHECK(report["results"]["lsa"]["transitions"] == 9);
}

TEST_CASE("analyze is byte-identical across reruns and worker counts") {
    const auto base = testing::scratch("determinism");
    write_fixture(7, base / "corpus");
    std::vector<fs::path> outs = {base / "a", base / "b", base / "c"};
    for (std::size_t i = 0; i < outs.size(); ++i) {
        RunConfig cfg;
        cfg.corpus = base / "corpus";
        cfg.out = outs[i];
        cfg.seed = 99;
        cfg.permutations = 500;
        cfg.jobs = i == 2 ? 4 : 1;
        run_analyze(cfg);
    }
    std::size_t compared = 0;
    for (const auto& entry : fs::directory_iterator(outs[0])) {
        if (!entry.is_regular_file()) continue;
        const auto name = entry.path().filename();
        CHECK_MESSAGE(slurp(entry.path()) == slurp(outs[1] / name), name.string());
        CHECK_MESSAGE(slurp(entry.path()) == slurp(outs[2] / name), name.string());
        ++compared;
    }
    CHECK(compared >= 8);
}

TEST_CASE("rules reproduce the synthetic gold labels and benchmark reports them") {
    const auto base = testing::scratch("bench");
    write_fixture(7, base / "corpus");
    RunConfig cfg;
    cfg.corpus = base / "corpus";
    cfg.out = base / "out";
    const auto r = run_benchmark(cfg);
    CHECK(r["help_seeking"]["f1_micro"].get<double>() > 0.9);
    CHECK(r["response_use"]["f1_micro"].get<double>() > 0.9);
    CHECK(fs::exists(cfg.out / "confusion_help_seeking.csv"));
    cfg.mode = ClassifierMode::Gold;
    run_classify(cfg);
    const auto g = run_benchmark(cfg);
    CHECK(g["help_seeking"]["f1_micro"] == 1.0);
}

TEST_CASE("permutation tests need a seed") {
    const auto base = testing::scratch("noseed");
    RunConfig cfg;
    cfg.corpus = testing::fixture("two_topic");
    cfg.out = base;
    CHECK_THROWS_AS(run_analyze(cfg), ValidationError);
}

TEST_CASE("command-line exit codes") {
    std::string err;
    CHECK(run_cli("validate --corpus " + testing::fixture("minimal").string()) == 0);
    CHECK(run_cli("validate --corpus " + testing::fixture("bad_edit_order").string(), &err) == 1);
    const auto j = nlohmann::json::parse(err);
    CHECK(j["error"] == "validation");
    CHECK(j["file"] == "edits.jsonl");
    CHECK(run_cli("frobnicate") == 1);
    const auto out = testing::scratch("cli_external");
    // Unreachable endpoint: runtime failure.
    CHECK(run_cli("classify --corpus " + testing::fixture("two_topic").string() + " --out " + out.string() +
                  " --mode external --strategy zero_shot --endpoint http://127.0.0.1:1/x", &err) == 2);
    CHECK(nlohmann::json::parse(err)["error"] == "endpoint");
}

TEST_CASE("endpoint falls back to the environment") {
    const auto out = testing::scratch("cli_env");
    ::setenv("RELIANCESCOPE_ENDPOINT", "exec:cat >/dev/null; printf 'HELP=Active;USE=Active\\n'", 1);
    const int code = run_cli("classify --corpus " + testing::fixture("two_topic").string() + " --out " + out.string() +
                             " --mode external --strategy zero_shot");
    ::unsetenv("RELIANCESCOPE_ENDPOINT");
    CHECK(code == 0);
    const auto labels = read_labels(out / "labels.jsonl");
    REQUIRE(labels.size() == 2);
    CHECK(labels[0].pattern() == ReliancePattern{EngagementMode::Active, EngagementMode::Active});
}
