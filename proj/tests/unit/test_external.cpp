#include <doctest.h>

#include <set>

#include <atomic>

#include "helpers.hpp"
#include "reliance/benchmark.hpp"
#include "reliance/error.hpp"
#include "reliance/external.hpp"
#include "reliance/records.hpp"
#include "reliance/synth.hpp"

using namespace reliance;

TEST_CASE("strict answer parsing") {
    auto a = parse_answer("HELP=Passive;USE=Passive", PromptAxis::Both);
    REQUIRE(a);
    CHECK(a->help_seeking == EngagementMode::Passive);
    CHECK(a->response_use == EngagementMode::Passive);

    a = parse_answer("Reasoning first.\nHELP=Active; USE=Constructive\n", PromptAxis::Both);
    REQUIRE(a);
    CHECK(a->response_use == EngagementMode::Constructive);

    CHECK_FALSE(parse_answer("HELP=Active", PromptAxis::Both));
    CHECK_FALSE(parse_answer("HELP=Act;USE=Passive", PromptAxis::Both));
    CHECK_FALSE(parse_answer("I think it is Passive.", PromptAxis::Both));
    CHECK(parse_answer("USE=Active", PromptAxis::ResponseUse));
}

TEST_CASE("prompt strategies carry the right number of exemplars") {
    PromptConfig cfg;
    cfg.strategy = PromptStrategy::FewShot3;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    cfg.exemplars.resize(3);
    CHECK_NOTHROW(cfg.validate());
    CHECK(exemplar_count(PromptStrategy::FewShot9Cot) == 9);
    cfg.strategy = PromptStrategy::ZeroShot;
    cfg.exemplars.clear();
    CHECK(build_prompt(cfg, "SEGMENT").find("SEGMENT") != std::string::npos);
}

TEST_CASE("unparseable answers stay unclassified after the retries") {
    testing::SessionBuilder b("S");
    b.student("How does the loop work?").assistant("It repeats.");
    InteractionSegment seg{"seg", "S", "k", 0, 1, {}, {}, 0};
    std::atomic<int> calls{0};
    FunctionEndpoint bad([&](const std::string&) {
        ++calls;
        return std::string("Passive, probably");
    });
    const auto rec = classify_external(b.s, seg, nullptr, PromptConfig{}, bad);
    CHECK_FALSE(rec.classified());
    CHECK(calls == 4);
    CHECK(rec.raw.size() == 4);
    CHECK(rec.source == LabelSource::External);

    FunctionEndpoint good([](const std::string&) { return std::string("HELP=Passive;USE=Passive"); });
    const auto ok = classify_external(b.s, seg, nullptr, PromptConfig{}, good);
    CHECK(ok.pattern() == ReliancePattern{});
}

TEST_CASE("a gold-matching stub endpoint scores F1 = 1") {
    const auto synth = generate_synthetic({.seed = 5, .sessions = 10, .excluded = 1, .silent = 1});
    std::vector<InteractionSegment> segments;
    for (const auto& s : synth.corpus.sessions) {
        if (s.excluded) continue;
        auto segs = build_segments(s, assign_kcs(s, synth.corpus.kcs, &synth.gold_kcs));
        segments.insert(segments.end(), segs.begin(), segs.end());
    }
    // Map each rendering back to its gold label.
    std::map<std::string, std::string> answers;
    std::map<std::string, const LabelRecord*> gold;
    for (const auto& g : synth.gold_labels) gold[g.segment_id] = &g;
    for (std::size_t i = 0; i < segments.size(); ++i) {
        const auto* session = synth.corpus.find_session(segments[i].session_id);
        const auto* next = i + 1 < segments.size() && segments[i + 1].session_id == segments[i].session_id ? &segments[i + 1] : nullptr;
        const auto* g = gold.at(segments[i].segment_id);
        answers[render_segment(*session, segments[i], next)] =
            "HELP=" + std::string(to_string(*g->help_seeking)) + ";USE=" + std::string(to_string(*g->response_use));
    }
    FunctionEndpoint stub([&](const std::string& prompt) {
        for (const auto& [rendering, answer] : answers)
            if (prompt.find(rendering) != std::string::npos) return answer;
        return std::string("no idea");
    });
    const auto labels = classify_external_batch(synth.corpus, segments, PromptConfig{}, stub, {.retries = 0, .jobs = 3});
    AxisLabels gh, gu, ph, pu;
    for (const auto& g : synth.gold_labels) {
        gh[g.segment_id] = g.help_seeking;
        gu[g.segment_id] = g.response_use;
    }
    for (const auto& l : labels) {
        ph[l.segment_id] = l.help_seeking;
        pu[l.segment_id] = l.response_use;
    }
    CHECK(score_predictions(gh, ph, Axis::HelpSeeking).f1_micro == 1.0);
    CHECK(score_predictions(gu, pu, Axis::ResponseUse).f1_micro == 1.0);
    CHECK(score_predictions(gh, ph, Axis::HelpSeeking).per_class[0].f1 == 1.0);
}

TEST_CASE("subprocess endpoint") {
    auto ep = make_endpoint("exec:cat >/dev/null; printf 'HELP=Active;USE=Passive\\n'");
    CHECK(ep->complete("anything") == "HELP=Active;USE=Passive\n");
    auto echo = make_endpoint("exec:cat");
    CHECK(echo->complete("round trip") == "round trip");
    CHECK_THROWS_AS(make_endpoint("ftp://nowhere"), EndpointError);
}

TEST_CASE("exemplars cover distinct patterns") {
    const auto synth = generate_synthetic({.seed = 5, .sessions = 20, .excluded = 1, .silent = 1});
    std::vector<InteractionSegment> segments;
    for (const auto& s : synth.corpus.sessions) {
        if (s.excluded) continue;
        auto segs = build_segments(s, assign_kcs(s, synth.corpus.kcs, &synth.gold_kcs));
        segments.insert(segments.end(), segs.begin(), segs.end());
    }
    const auto ex = select_exemplars(synth.corpus, segments, synth.gold_labels, PromptStrategy::FewShot9);
    CHECK(ex.size() == 9);
    std::set<std::string> ids;
    for (const auto& e : ex) ids.insert(e.segment_id);
    CHECK(ids.size() == 9);
}
