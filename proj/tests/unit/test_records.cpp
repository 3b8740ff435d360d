#include <doctest.h>

#include "helpers.hpp"
#include "reliance/corpus.hpp"
#include "reliance/error.hpp"
#include "reliance/records.hpp"
#include "reliance/synth.hpp"

using namespace reliance;

TEST_CASE("label lines round-trip") {
    LabelRecord r;
    r.segment_id = "seg-1";
    r.help_seeking = EngagementMode::Active;
    r.response_use = EngagementMode::Constructive;
    r.source = LabelSource::Human;
    r.annotator = "ann";
    r.round = 2;
    r.kc_id = "methods";
    r.timestamp = 1234;
    r.evidence.push_back({EvidenceKind::Edit, 3, Axis::ResponseUse, EngagementMode::Constructive, "create_own", "n"});
    const auto line = format_label_line(r);
    CHECK(parse_label_line(line) == r);
    CHECK(line.rfind("{\"segment_id\":\"seg-1\",\"help_seeking\":\"Active\"", 0) == 0);

    LabelRecord u;
    u.segment_id = "seg-2";
    u.source = LabelSource::External;
    u.raw = {"no answer"};
    CHECK_FALSE(parse_label_line(format_label_line(u)).classified());
    CHECK(parse_label_line(format_label_line(u)) == u);
}

TEST_CASE("invalid label lines") {
    CHECK_THROWS_AS(parse_label_line("{\"segment_id\":\"a\",\"help_seeking\":\"Meh\",\"response_use\":\"Active\"}"),
                    ValidationError);
    CHECK_THROWS_AS(parse_label_line("[]"), ValidationError);
}

TEST_CASE("segments and contexts round-trip through their files") {
    const auto synth = generate_synthetic({.seed = 2, .sessions = 6, .excluded = 0, .silent = 1});
    std::vector<InteractionSegment> segs;
    std::vector<ContextRecord> ctx;
    for (const auto& s : synth.corpus.sessions) {
        auto v = build_segments(s, assign_kcs(s, synth.corpus.kcs, &synth.gold_kcs));
        for (const auto& seg : v)
            ctx.push_back({seg.segment_id, seg.session_id, seg.kc_id,
                           assign_knowledge_context(*synth.corpus.find_kc(seg.kc_id), s)});
        segs.insert(segs.end(), v.begin(), v.end());
    }
    const auto dir = testing::scratch("records");
    write_segments(dir / "segments.jsonl", segs, synth.corpus);
    CHECK(read_segments(dir / "segments.jsonl", synth.corpus) == segs);
    write_contexts(dir / "contexts.jsonl", ctx);
    CHECK(read_contexts(dir / "contexts.jsonl") == ctx);
    write_kc_assignments(dir / "kcs.jsonl", synth.gold_kcs);
    CHECK(read_kc_assignments(dir / "kcs.jsonl") == synth.gold_kcs);
}
