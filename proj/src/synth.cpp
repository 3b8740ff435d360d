#include "reliance/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <regex>

#include "reliance/corpus.hpp"
#include "reliance/rng.hpp"
#include "reliance/segmenter.hpp"
#include "json_io.hpp"

namespace reliance {

namespace {

using enum EngagementMode;

struct KcSpec {
    const char* id;
    const char* name;
    Significance significance;
    const char* question;  // nullptr: no mapped pre-test question
    std::vector<std::string> lexicon;
    const char* term;
    const char* ident;
    const char* instruction;
    const char* code;
    const char* own_code;
};

const std::vector<KcSpec>& kc_specs() {
    static const std::vector<KcSpec> specs = {
        {"vue_data", "Reactive data", Significance::Focal, "q1", {"data property", "data", "reactive"}, "data property",
         "todos", "Create a Vue app with a data property todos that starts as an empty array.",
         "data() {\n  return {\n    todos: [],\n    newTodo: ''\n  };\n}",
         "const state = reactive({ items: [], draft: '' });\nexport default { setup() { return state; } };"},
        {"methods", "Component methods", Significance::Focal, "q2", {"method", "methods"}, "method", "addTodo",
         "Add a method addTodo that pushes newTodo into the todos array.",
         "methods: {\n  addTodo() {\n    this.todos.push(this.newTodo);\n    this.newTodo = '';\n  }\n}",
         "function addItem(list, value) {\n  if (!value) return list;\n  return list.concat([{ text: value, finished: false }]);\n}"},
        {"v_for", "List rendering", Significance::Focal, "q3", {"v-for", "list rendering", "loop"}, "v-for", "todo",
         "Render each todo in a list using v-for.",
         "<li v-for=\"todo in todos\" :key=\"todo.id\">{{ todo.text }}</li>",
         "<ul>\n  <template v-for=\"(entry, i) in items\">\n    <li>{{ i + 1 }}. {{ entry.text }}</li>\n  </template>\n</ul>"},
        {"v_model", "Input binding", Significance::Focal, "q4", {"v-model", "input binding", "two-way binding"}, "v-model",
         "newTodo", "Bind the input field to newTodo with v-model.",
         "<input v-model=\"newTodo\" @keyup.enter=\"addTodo\">",
         "<input :value=\"draft\" @input=\"draft = $event.target.value\">\n<button @click=\"save(draft)\">Save</button>"},
        {"js_arrays", "JavaScript arrays", Significance::Supporting, "q5", {"array", "arrays", "filter", "push"}, "filter",
         "done", "Use the array filter function to remove completed todos.",
         "removeDone() {\n  this.todos = this.todos.filter(todo => !todo.done);\n}",
         "const open = [];\nfor (const entry of items) {\n  if (entry.finished === false) open.push(entry);\n}"},
        {"css", "CSS styling", Significance::Supporting, nullptr, {"css", "class", "style", "line-through"}, "css class",
         "done", "Style completed todos with a line-through class.",
         ".done {\n  text-decoration: line-through;\n}",
         "li.finished {\n  color: gray;\n  opacity: 0.6;\n}\nli.finished span { font-style: italic; }"},
    };
    return specs;
}

std::string rename_identifiers(std::string code) {
    static const std::vector<std::pair<std::regex, std::string>> renames = {
        {std::regex(R"(\bnewTodo\b)"), "draftText"}, {std::regex(R"(\baddTodo\b)"), "addTask"},
        {std::regex(R"(\btodos\b)"), "taskList"},    {std::regex(R"(\btodo\b)"), "item"},
        {std::regex(R"(\bdone\b)"), "finished"},     {std::regex(R"(\bremoveDone\b)"), "clearFinished"},
    };
    for (const auto& [re, to] : renames) code = std::regex_replace(code, re, to);
    return code;
}

class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}
    double unit() { return uniform_unit(rng_); }
    std::size_t below(std::size_t n) { return static_cast<std::size_t>(uniform_below(rng_, n)); }
    bool chance(double p) { return unit() < p; }
    double normal() {
        // Box-Muller from two portable uniforms.
        const double u1 = std::max(unit(), 1e-300), u2 = unit();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }
    template <std::size_t N>
    std::size_t pick(const std::array<double, N>& weights) {
        double total = 0.0;
        for (double w : weights) total += w;
        double r = unit() * total;
        for (std::size_t i = 0; i < N; ++i) {
            if (r < weights[i]) return i;
            r -= weights[i];
        }
        return N - 1;
    }
    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
};

EngagementMode mode_at(std::size_t i) { return static_cast<EngagementMode>(i); }

struct SessionBuilder {
    SessionRecord s;
    std::string code;
    Timestamp ts = 0;
    std::vector<KcAssignment> kcs;

    void advance(Gen& g, Timestamp lo, Timestamp hi) { ts += lo + static_cast<Timestamp>(g.below(static_cast<std::size_t>(hi - lo + 1))); }

    std::size_t say(Role role, std::string text, const std::string& kc) {
        ChatMessage m;
        m.session_id = s.session_id;
        m.index = s.messages.size();
        m.ts = ts;
        m.role = role;
        m.text = std::move(text);
        if (role == Role::Student) m.code_snapshot = code;
        s.messages.push_back(std::move(m));
        kcs.push_back({s.session_id, s.messages.size() - 1, kc, KcSource::Gold});
        return s.messages.size() - 1;
    }

    void edit(std::string next, bool bulk) {
        code = std::move(next);
        s.edits.push_back({s.session_id, ts, code, bulk});
    }

    void paste(const std::string& block) {
        s.copies.push_back({s.session_id, ts, block, SourceHint::Unknown});
        edit(code + (code.empty() ? "" : "\n") + block, true);
    }
};

}  // namespace

SynthCorpus generate_synthetic(const SynthOptions& opts) {
    SynthCorpus out;
    Gen g(derive_seed(opts.seed, 0x5e55));
    const auto& specs = kc_specs();

    for (const auto& k : specs) {
        KnowledgeComponentDef def;
        def.kc_id = k.id;
        def.name = k.name;
        def.significance = k.significance;
        if (k.question) def.pretest_question_id = k.question;
        def.lexicon = k.lexicon;
        out.corpus.kcs.push_back(std::move(def));
        out.corpus.instructions.push_back(k.instruction);
    }

    const std::array<double, 3> help_weights = {0.66, 0.22, 0.12};
    const std::array<std::array<double, 3>, 3> use_given_help = {
        std::array<double, 3>{0.62, 0.24, 0.14}, {0.30, 0.50, 0.20}, {0.20, 0.30, 0.50}};

    for (std::size_t si = 0; si < opts.sessions; ++si) {
        SessionBuilder b;
        char id[16];
        std::snprintf(id, sizeof id, "S%02zu", si + 1);
        b.s.session_id = id;
        b.ts = 1700000000000LL + static_cast<Timestamp>(si) * 10000000LL;
        const double ability = g.normal();
        const double trait = g.normal();
        const bool silent = si >= opts.sessions - opts.silent;
        b.s.excluded = si < opts.excluded;
        if (b.s.excluded) b.s.exclude_reason = "code pasted from an outside source";

        std::array<int, kPatternCount> pattern_counts{};
        if (!silent) {
            b.edit("<div id=\"app\"></div>", true);  // starter file, before any chat
            b.advance(g, 20000, 60000);
            const std::size_t n_segments = 3 + g.below(6);
            std::size_t prev_kc = specs.size();
            std::optional<ReliancePattern> prev;
            for (std::size_t k = 0; k < n_segments; ++k) {
                std::size_t kc = g.below(specs.size());
                while (kc == prev_kc) kc = g.below(specs.size());
                prev_kc = kc;
                const auto& spec = specs[kc];

                ReliancePattern pat;
                if (prev && g.chance(0.45)) {
                    pat = *prev;
                } else {
                    pat.help_seeking = mode_at(g.pick(help_weights));
                    auto weights = use_given_help[static_cast<std::size_t>(ordinal(pat.help_seeking))];
                    if (spec.significance == Significance::Supporting) weights[1] += 0.35;
                    pat.response_use = mode_at(g.pick(weights));
                }
                prev = pat;
                ++pattern_counts[pat.index()];

                const std::size_t first = b.s.messages.size();
                std::string opener;
                switch (pat.help_seeking) {
                    case Passive:
                        opener = g.chance(0.5) ? std::string(spec.instruction)
                                               : "Give me the code for the " + std::string(spec.term) + ".";
                        break;
                    case Active:
                        opener = g.chance(0.5) ? "How do I fix this error: " + std::string(spec.ident) +
                                                     " is not defined in my " + spec.term + "?"
                                               : "How does the " + std::string(spec.term) + " work in Vue?";
                        break;
                    case Constructive:
                        opener = g.chance(0.5) ? "Can you give me a hint for the " + std::string(spec.term) +
                                                     "? Do not write the code for me."
                                               : "I think the " + std::string(spec.term) +
                                                     " should go inside the component, right?";
                        break;
                }
                b.say(Role::Student, opener, spec.id);
                b.advance(g, 3000, 9000);

                const std::string block = spec.code;
                if (pat.response_use == Constructive) {
                    b.say(Role::Assistant,
                          "Think about it in steps. First decide where the " + std::string(spec.term) +
                              " belongs, then write a small piece and test it before moving on.",
                          spec.id);
                } else {
                    b.say(Role::Assistant, "Here is one way to do it:\n```js\n" + block + "\n```", spec.id);
                }
                b.advance(g, 10000, 40000);

                if (pat.help_seeking == Passive && g.chance(0.3)) {
                    b.say(Role::Student, "ok thanks", spec.id);
                    b.advance(g, 2000, 5000);
                    b.say(Role::Assistant, "You're welcome, let me know if anything else comes up.", spec.id);
                    b.advance(g, 5000, 20000);
                }

                switch (pat.response_use) {
                    case Passive:
                        if (g.chance(0.7)) b.paste(block);
                        break;
                    case Active: {
                        b.paste(block);
                        b.advance(g, 8000, 30000);
                        const auto base = b.code.substr(0, b.code.size() - block.size());
                        b.edit(base + rename_identifiers(block), false);
                        break;
                    }
                    case Constructive: {
                        const std::string own = spec.own_code;
                        const auto cut = own.find('\n');
                        const auto head = cut == std::string::npos ? own.substr(0, own.size() / 2) : own.substr(0, cut);
                        const auto base = b.code + (b.code.empty() ? "" : "\n");
                        b.edit(base + head, false);
                        b.advance(g, 15000, 45000);
                        b.edit(base + own, false);
                        break;
                    }
                }
                b.advance(g, 20000, 90000);

                const std::size_t last = b.s.messages.size() - 1;
                LabelRecord gold;
                gold.segment_id = make_segment_id(b.s.session_id, first, last);
                gold.help_seeking = pat.help_seeking;
                gold.response_use = pat.response_use;
                gold.source = LabelSource::Gold;
                if (!b.s.excluded) out.gold_labels.push_back(std::move(gold));
            }
        }

        // Assessments: ten questions, q1..q5 mapped to knowledge components.
        auto correct_option = [](int q) { return q % 4; };
        const double pre_rate = 1.0 / (1.0 + std::exp(-(ability * 1.3 + 0.3)));
        int pre_score = 0;
        for (int q = 1; q <= 10; ++q) {
            AssessmentResponse a;
            a.session_id = b.s.session_id;
            a.question_id = "q" + std::to_string(q);
            a.phase = TestPhase::Pre;
            if (g.chance(pre_rate)) {
                a.answer = correct_option(q);
                a.correct = true;
                ++pre_score;
            } else {
                a.answer = g.chance(0.35) ? kIdkAnswer : (correct_option(q) + 1) % 4;
            }
            b.s.assessments.push_back(a);
        }
        const double gain = 2.0 + 0.45 * pattern_counts[ReliancePattern{Passive, Constructive}.index()] -
                            0.6 * pattern_counts[ReliancePattern{Active, Passive}.index()] + 0.8 * g.normal();
        const int post_score = std::clamp(static_cast<int>(std::lround(pre_score + gain)), 0, 10);
        std::vector<int> order(10);
        for (int i = 0; i < 10; ++i) order[i] = i + 1;
        fisher_yates(order, g.engine());
        for (int i = 0; i < 10; ++i) {
            const int q = order[i];
            AssessmentResponse a;
            a.session_id = b.s.session_id;
            a.question_id = "q" + std::to_string(q);
            a.phase = TestPhase::Post;
            a.correct = i < post_score;
            a.answer = a.correct ? correct_option(q) : (g.chance(0.2) ? kIdkAnswer : (correct_option(q) + 2) % 4);
            b.s.assessments.push_back(a);
        }
        std::sort(b.s.assessments.begin(), b.s.assessments.end(), [](const auto& x, const auto& y) {
            return std::tie(x.phase, x.question_id) < std::tie(y.phase, y.question_id);
        });

        for (auto scale : kSrlScales) {
            SrlResponse r;
            r.session_id = b.s.session_id;
            r.scale = scale;
            for (auto& item : r.item_scores)
                item = std::clamp(static_cast<int>(std::lround(4.5 + 1.3 * trait + 0.7 * g.normal())), 1, 7);
            b.s.srl.push_back(r);
        }

        for (auto& a : b.kcs) out.gold_kcs.push_back(std::move(a));
        out.corpus.sessions.push_back(std::move(b.s));
    }
    validate_corpus(out.corpus);
    return out;
}

void write_synthetic(const SynthCorpus& synth, const std::filesystem::path& dir) {
    write_corpus(synth.corpus, dir);
    write_labels(dir / gold_files::kLabels, synth.gold_labels);
    write_kc_assignments(dir / gold_files::kKcs, synth.gold_kcs);
}

}  // namespace reliance
