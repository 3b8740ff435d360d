#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "reliance/corpus.hpp"
#include "reliance/error.hpp"
#include "reliance/labeling.hpp"
#include "reliance/segmenter.hpp"

using namespace reliance;

namespace {

const std::vector<KnowledgeComponentDef> kKcs = {
    {"methods", "Methods", Significance::Focal, "q1", {"method", "function"}},
    {"js", "JavaScript", Significance::Supporting, std::nullopt, {"javascript", "array"}}};

struct Labeled {
    SegmentLabel label;
    std::vector<InteractionSegment> segments;
};

Labeled label_first(const SessionRecord& s, const std::vector<std::string>& instructions = {}) {
    std::vector<KcAssignment> gold;
    for (const auto& m : s.messages) gold.push_back({s.session_id, m.index, "methods", KcSource::Gold});
    auto segs = build_segments(s, assign_kcs(s, kKcs, &gold));
    auto labels = label_session_rules(s, segs, instructions, kKcs, RuleConfig::defaults());
    return {labels.at(0), segs};
}

bool has_rule(const SegmentLabel& l, const std::string& rule) {
    for (const auto& e : l.evidence)
        if (e.rule_id == rule) return true;
    return false;
}

const std::string kBlock =
    "function addTodo() {\n  this.todos.push({ text: this.newTodo, done: false });\n  this.newTodo = '';\n}";

}  // namespace

TEST_CASE("help-seeking: copying an instruction step is Passive") {
    testing::SessionBuilder b("S");
    b.student("Complete function foo().").assistant("Here you go.");
    const auto r = label_first(b.s, {"Complete function foo()."});
    CHECK(r.label.help_seeking == EngagementMode::Passive);
    CHECK(has_rule(r.label, "instruction_copy"));
}

TEST_CASE("help-seeking: a specific error is Active") {
    testing::SessionBuilder b("S");
    b.student("How do I resolve unexpected identifier error in line 3?").assistant("Check the comma.");
    const auto r = label_first(b.s);
    CHECK(r.label.help_seeking == EngagementMode::Active);
}

TEST_CASE("help-seeking: asking for an example instead of code is Constructive") {
    testing::SessionBuilder b("S");
    b.student("Do not write the entire code. Show me examples.").assistant("Consider a list of numbers.");
    const auto r = label_first(b.s);
    CHECK(r.label.help_seeking == EngagementMode::Constructive);
    CHECK(has_rule(r.label, "form_directive"));
}

TEST_CASE("help-seeking: affirmations and answer requests are Passive") {
    testing::SessionBuilder b("S");
    b.student("Give me the code for the function.").assistant("```js\nfunction f() {}\n```");
    b.student("ok thanks").assistant("You're welcome.");
    const auto r = label_first(b.s);
    CHECK(r.label.help_seeking == EngagementMode::Passive);
    CHECK(has_rule(r.label, "answer_request"));
    CHECK(has_rule(r.label, "affirmation"));
}

TEST_CASE("response-use: pasting the response verbatim is Passive") {
    testing::SessionBuilder b("S");
    b.edit("");
    b.student("Give me the code for the function.").assistant("```js\n" + kBlock + "\n```");
    b.paste(kBlock, kBlock);
    const auto r = label_first(b.s);
    CHECK(r.label.response_use == EngagementMode::Passive);
    CHECK(has_rule(r.label, "copy_response"));
}

TEST_CASE("response-use: renaming variables in pasted code is Active") {
    testing::SessionBuilder b("S");
    b.edit("");
    b.student("Give me the code for the function.").assistant("```js\n" + kBlock + "\n```");
    b.paste(kBlock, kBlock);
    b.edit("function addItem() {\n  this.items.push({ text: this.entry, done: false });\n  this.entry = '';\n}");
    const auto r = label_first(b.s);
    CHECK(r.label.response_use == EngagementMode::Active);
    CHECK(has_rule(r.label, "customize_response"));
}

TEST_CASE("response-use: typing an own implementation after subgoals is Constructive") {
    testing::SessionBuilder b("S");
    b.edit("");
    b.student("Give me hints for the function, do not write the code.")
        .assistant("First read the input, then add it to the list, then clear the input.");
    b.edit("function save() {\n  const value = input.trim();\n");
    b.edit("function save() {\n  const value = input.trim();\n  if (value) list.unshift(value);\n  input = '';\n}");
    const auto r = label_first(b.s);
    CHECK(r.label.response_use == EngagementMode::Constructive);
    CHECK(has_rule(r.label, "create_own"));
}

TEST_CASE("response-use: no assistant message means no_response") {
    testing::SessionBuilder b("S");
    b.student("Give me the code for the function.");
    const auto r = label_first(b.s);
    CHECK(r.label.response_use == EngagementMode::Passive);
    CHECK(has_rule(r.label, "no_response"));
}

TEST_CASE("aggregation takes the maximum and never lowers a mode") {
    auto ev = [](Axis axis, EngagementMode m) { return MessageEvidence{EvidenceKind::Message, 0, axis, m, "x", ""}; };
    const auto l = aggregate_segment("s", {ev(Axis::HelpSeeking, EngagementMode::Passive), ev(Axis::HelpSeeking, EngagementMode::Active)}, {});
    CHECK(l.help_seeking == EngagementMode::Active);
    CHECK(l.response_use == EngagementMode::Passive);  // default injected
    const auto single = aggregate_segment("s", {ev(Axis::HelpSeeking, EngagementMode::Passive)}, {});
    CHECK(single.help_seeking == EngagementMode::Passive);

    std::mt19937_64 rng(8);
    for (int rep = 0; rep < 500; ++rep) {
        std::vector<MessageEvidence> evidence;
        for (int i = static_cast<int>(rng() % 6); i > 0; --i)
            evidence.push_back(ev(rng() % 2 ? Axis::HelpSeeking : Axis::ResponseUse, static_cast<EngagementMode>(rng() % 3)));
        const auto before = aggregate_segment("s", evidence, {});
        evidence.push_back(ev(rng() % 2 ? Axis::HelpSeeking : Axis::ResponseUse, static_cast<EngagementMode>(rng() % 3)));
        const auto after = aggregate_segment("s", evidence, {});
        CHECK(after.help_seeking >= before.help_seeking);
        CHECK(after.response_use >= before.response_use);
        for (const auto& e : evidence) {
            const auto& got = e.axis == Axis::HelpSeeking ? after.help_seeking : after.response_use;
            CHECK(ordinal(e.mode) <= ordinal(got));
        }
    }
}

TEST_CASE("two-topic worked example: Active/Active then Active/Passive") {
    const auto c = load_corpus(testing::fixture("two_topic"));
    const auto& s = c.sessions[0];
    const auto segs = build_segments(s, assign_kcs(s, c.kcs));
    const auto labels = label_session_rules(s, segs, c.instructions, c.kcs, RuleConfig::defaults());
    REQUIRE(labels.size() == 2);
    CHECK(labels[0].help_seeking == EngagementMode::Active);
    CHECK(labels[0].response_use == EngagementMode::Active);
    CHECK(has_rule(labels[0], "follow_up_clarification"));
    CHECK(labels[1].help_seeking == EngagementMode::Active);
    CHECK(labels[1].response_use == EngagementMode::Passive);
    for (const auto& l : labels)
        for (const auto& e : l.evidence) CHECK(find_rule(e.rule_id) != nullptr);
}

TEST_CASE("axis independence: edit logs never change help-seeking evidence") {
    auto c = load_corpus(testing::fixture("two_topic"));
    auto& s = c.sessions[0];
    const auto segs = build_segments(s, assign_kcs(s, c.kcs));
    const auto before = label_session_rules(s, segs, c.instructions, c.kcs, RuleConfig::defaults());
    s.edits[0].snapshot += "\n// a completely different ending of the file";
    const auto after = label_session_rules(s, segs, c.instructions, c.kcs, RuleConfig::defaults());
    for (std::size_t k = 0; k < before.size(); ++k) {
        CHECK(before[k].help_seeking == after[k].help_seeking);
        std::vector<MessageEvidence> hb, ha;
        for (const auto& e : before[k].evidence)
            if (e.axis == Axis::HelpSeeking) hb.push_back(e);
        for (const auto& e : after[k].evidence)
            if (e.axis == Axis::HelpSeeking) ha.push_back(e);
        CHECK(hb == ha);
    }
}

TEST_CASE("reuse similarity") {
    CHECK(reuse_similarity("abc", "abc") == 1.0);
    CHECK(reuse_similarity("x.push(1)", "const a = [];\nx.push(1);\n") == 1.0);
    CHECK(reuse_similarity("", "abc") == 0.0);
    CHECK(reuse_similarity("zzzz", "abc") < 0.5);
}

TEST_CASE("knowledge contexts") {
    SessionRecord s;
    s.session_id = "S";
    s.assessments = {{"S", "q1", TestPhase::Pre, 2, true}, {"S", "q2", TestPhase::Pre, kIdkAnswer, false}};
    KnowledgeComponentDef a{"a", "A", Significance::Focal, "q1", {}};
    KnowledgeComponentDef b{"b", "B", Significance::Focal, "q2", {}};
    KnowledgeComponentDef sup{"c", "C", Significance::Supporting, std::nullopt, {}};
    KnowledgeComponentDef missing{"d", "D", Significance::Focal, "q9", {}};
    CHECK(assign_knowledge_context(a, s).collapsed == CollapsedContext::AcquiredFocal);
    CHECK(assign_knowledge_context(b, s).collapsed == CollapsedContext::UndevelopedFocal);
    const auto ctx = assign_knowledge_context(sup, s);
    CHECK(ctx.collapsed == CollapsedContext::Supporting);
    CHECK_FALSE(ctx.mastery.has_value());
    CHECK_THROWS_AS(assign_knowledge_context(missing, s), ValidationError);
}

TEST_CASE("rule thresholds come from config") {
    const auto cfg = RuleConfig::from_config(KeyValueConfig::parse(
        "[thresholds]\ninstruction_copy = 0.95\n[lexicons]\naffirmations = [\"yo\"]\n"));
    CHECK(cfg.instruction_copy == 0.95);
    CHECK(cfg.affirmations == std::vector<std::string>{"yo"});
    CHECK(cfg.verbatim_reuse == 0.9);
    CHECK_THROWS_AS(RuleConfig::from_config(KeyValueConfig::parse("[thresholds]\nnovel_content = 0.95\n")),
                    ValidationError);
}

TEST_CASE("shipped rules file matches the built-in defaults") {
    const auto path = std::filesystem::path(RELIANCE_FIXTURES) / ".." / ".." / "assets" / "rules.toml";
    const auto loaded = RuleConfig::from_config(KeyValueConfig::load(path));
    const auto d = RuleConfig::defaults();
    CHECK(loaded.instruction_copy == d.instruction_copy);
    CHECK(loaded.novel_min_chars == d.novel_min_chars);
    CHECK(loaded.stopwords == d.stopwords);
    CHECK(loaded.error_terms == d.error_terms);
    CHECK(loaded.clarification_cues == d.clarification_cues);
}
