#include "reliance/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>

#include "reliance/corpus.hpp"
#include "reliance/error.hpp"
#include "reliance/rng.hpp"
#include "reliance/stats/anova.hpp"
#include "reliance/stats/compositional.hpp"
#include "reliance/stats/lsa.hpp"
#include "reliance/stats/ols.hpp"
#include "reliance/stats/reliability.hpp"
#include "reliance/stats/somers.hpp"

namespace reliance {

using ojson = nlohmann::ordered_json;

const std::vector<std::string>& analysis_suites() {
    static const std::vector<std::string> names = {"distribution", "somers", "manova", "posthoc", "ols", "lsa", "tests"};
    return names;
}

std::string format_p(double p) {
    if (p < 0.001) return "p < .001";
    char buf[32];
    std::snprintf(buf, sizeof buf, "p = %.3f", p);
    return buf;
}

namespace {

struct Row {
    const InteractionSegment* segment;
    const SessionRecord* session;
    ReliancePattern pattern;
    CollapsedContext context;
};

struct Prepared {
    std::vector<Row> rows;  // canonical segment order
    std::size_t unclassified = 0;
    std::size_t sessions_analyzed = 0;
    // Break points for sequences: unclassified segments split a session's chain.
    std::vector<std::vector<int>> sequences;
};

std::string fmt(const char* format, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, format, v);
    return buf;
}

ojson number(double v) { return std::isfinite(v) ? ojson(v) : ojson(nullptr); }

Prepared prepare(const AnalysisInputs& in) {
    std::map<std::string, const LabelRecord*> labels;
    for (const auto& l : *in.labels) labels[l.segment_id] = &l;
    std::map<std::string, const ContextRecord*> contexts;
    for (const auto& c : *in.contexts) contexts[c.segment_id] = &c;

    Prepared p;
    std::set<std::string> sessions;
    std::string current_session;
    std::vector<int> chain;
    auto flush = [&] {
        if (!chain.empty()) p.sequences.push_back(std::move(chain));
        chain.clear();
    };
    for (const auto& seg : *in.segments) {
        const auto* session = in.corpus->find_session(seg.session_id);
        if (!session) throw ValidationError("segment refers to an unknown session", {}, 0, seg.segment_id);
        if (session->excluded) continue;
        if (seg.session_id != current_session) {
            flush();
            current_session = seg.session_id;
        }
        auto l = labels.find(seg.segment_id);
        if (l == labels.end()) throw ValidationError("segment has no label", {}, 0, seg.segment_id);
        if (!l->second->classified()) {
            ++p.unclassified;
            flush();
            continue;
        }
        auto c = contexts.find(seg.segment_id);
        if (c == contexts.end()) throw ValidationError("segment has no knowledge context", {}, 0, seg.segment_id);
        const auto pat = *l->second->pattern();
        p.rows.push_back({&seg, session, pat, c->second->context.collapsed});
        chain.push_back(static_cast<int>(pat.index()));
        sessions.insert(seg.session_id);
    }
    flush();
    p.sessions_analyzed = sessions.size();
    return p;
}

std::string pattern_short(std::size_t i) { return ReliancePattern::from_index(i).short_name(); }
std::string pattern_name(std::size_t i) { return ReliancePattern::from_index(i).name(); }

ojson distribution_suite(const Prepared& p, std::map<std::string, std::string>& csv) {
    std::array<std::int64_t, kPatternCount> counts{};
    std::array<std::array<std::int64_t, 3>, 3> flow{};
    std::array<std::int64_t, kContextCount> ctx{};
    for (const auto& r : p.rows) {
        ++counts[r.pattern.index()];
        ++flow[ordinal(r.pattern.help_seeking)][ordinal(r.pattern.response_use)];
        ++ctx[static_cast<std::size_t>(r.context)];
    }
    const double n = static_cast<double>(p.rows.size());
    if (p.rows.empty()) throw DomainError("no classified segments");

    ojson j;
    j["segments"] = p.rows.size();
    ojson pats = ojson::array();
    std::string pd = "pattern,short,count,share\n";
    for (std::size_t i = 0; i < kPatternCount; ++i) {
        pats.push_back({{"pattern", pattern_name(i)}, {"short", pattern_short(i)}, {"count", counts[i]},
                        {"share", counts[i] / n}});
        pd += pattern_name(i) + "," + pattern_short(i) + "," + std::to_string(counts[i]) + "," +
              fmt("%.6f", counts[i] / n) + "\n";
    }
    j["patterns"] = std::move(pats);

    ojson help, use;
    std::string fm = "help_seeking,response_use,count,share_of_total,share_of_help_mode\n";
    for (auto h : kModes) {
        std::int64_t row = 0;
        for (auto u : kModes) row += flow[ordinal(h)][ordinal(u)];
        help[std::string(to_string(h))] = row / n;
        for (auto u : kModes) {
            const auto c = flow[ordinal(h)][ordinal(u)];
            fm += std::string(to_string(h)) + "," + std::string(to_string(u)) + "," + std::to_string(c) + "," +
                  fmt("%.6f", c / n) + "," + fmt("%.6f", row ? static_cast<double>(c) / static_cast<double>(row) : 0.0) + "\n";
        }
    }
    for (auto u : kModes) {
        std::int64_t col = 0;
        for (auto h : kModes) col += flow[ordinal(h)][ordinal(u)];
        use[std::string(to_string(u))] = col / n;
    }
    j["help_seeking_shares"] = std::move(help);
    j["response_use_shares"] = std::move(use);
    ojson flows = ojson::array();
    for (auto& row : flow) flows.push_back(row);
    j["flow"] = std::move(flows);

    ojson contexts;
    for (std::size_t c = 0; c < kContextCount; ++c)
        contexts[std::string(to_string(static_cast<CollapsedContext>(c)))] = ctx[c];
    j["contexts"] = std::move(contexts);
    const auto focal = ctx[0] + ctx[1];
    j["focal_share"] = focal / n;
    j["undeveloped_share_of_focal"] = focal ? static_cast<double>(ctx[1]) / static_cast<double>(focal) : 0.0;

    csv["pattern_distribution.csv"] = pd;
    csv["flow_matrix.csv"] = fm;
    return j;
}

ojson somers_json(const stats::SomersResult& r) {
    ojson j;
    j["n"] = r.n;
    j["d"] = r.d_yx;
    j["d_reverse"] = r.d_xy ? ojson(*r.d_xy) : ojson(nullptr);
    j["concordant"] = r.counts.concordant;
    j["discordant"] = r.counts.discordant;
    j["ties_x_only"] = r.counts.ties_x_only;
    j["ties_y_only"] = r.counts.ties_y_only;
    j["ties_both"] = r.counts.ties_both;
    j["p_permutation"] = r.p_permutation;
    j["permutations"] = r.permutations;
    j["p_asymptotic"] = r.p_asymptotic;
    j["ase0"] = r.ase0;
    return j;
}

ojson somers_suite(const Prepared& p, const AnalysisParams& params) {
    std::vector<int> x, y;
    for (const auto& r : p.rows) {
        x.push_back(ordinal(r.pattern.help_seeking));
        y.push_back(ordinal(r.pattern.response_use));
    }
    stats::SomersOptions opts;
    opts.permutations = params.permutations;
    opts.seed = params.seed;
    opts.threads = params.jobs;
    ojson j;
    j["independent"] = "help_seeking";
    j["dependent"] = "response_use";
    j["seed"] = params.seed;
    j["modes"] = somers_json(stats::somers_d(x, y, opts));

    ojson srl = ojson::array();
    std::uint64_t stream = 1;
    for (auto scale : kSrlScales)
        for (auto axis : {Axis::HelpSeeking, Axis::ResponseUse}) {
            std::vector<int> sx, sy;
            for (const auto& r : p.rows)
                for (const auto& s : r.session->srl)
                    if (s.scale == scale) {
                        sx.push_back(s.sum());
                        sy.push_back(ordinal(axis == Axis::HelpSeeking ? r.pattern.help_seeking : r.pattern.response_use));
                    }
            ojson e;
            e["scale"] = std::string(to_string(scale));
            e["axis"] = std::string(to_string(axis));
            auto o = opts;
            o.seed = derive_seed(params.seed, stream++);
            try {
                e.update(somers_json(stats::somers_d(sx, sy, o)));
            } catch (const DomainError& err) {
                e["error"] = err.what();
            }
            srl.push_back(std::move(e));
        }
    j["srl"] = std::move(srl);
    return j;
}

struct Compositions {
    std::vector<CollapsedContext> group;
    std::vector<std::string> session;
    Eigen::MatrixXd shares;
    std::array<std::array<std::int64_t, kPatternCount>, kContextCount> counts{};
};

Compositions compositions(const Prepared& p) {
    std::map<std::pair<std::string, int>, std::array<double, kPatternCount>> acc;
    Compositions c;
    for (const auto& r : p.rows) {
        auto& a = acc[{r.session->session_id, static_cast<int>(r.context)}];
        a[r.pattern.index()] += 1.0;
        ++c.counts[static_cast<std::size_t>(r.context)][r.pattern.index()];
    }
    // Rows ordered by context, then session.
    std::vector<std::pair<std::pair<int, std::string>, std::array<double, kPatternCount>>> ordered;
    for (const auto& [key, v] : acc) ordered.push_back({{key.second, key.first}, v});
    std::sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    c.shares.resize(static_cast<Eigen::Index>(ordered.size()), kPatternCount);
    for (std::size_t i = 0; i < ordered.size(); ++i) {
        double total = 0.0;
        for (double v : ordered[i].second) total += v;
        for (std::size_t k = 0; k < kPatternCount; ++k)
            c.shares(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = ordered[i].second[k] / total;
        c.group.push_back(static_cast<CollapsedContext>(ordered[i].first.first));
        c.session.push_back(ordered[i].first.second);
    }
    return c;
}

stats::ClrMatrix clr_of(const Compositions& c, const AnalysisParams& params) {
    if (c.shares.rows() == 0) throw DomainError("no compositions");
    const double delta = params.delta ? *params.delta : stats::default_replacement_delta(c.shares, params.delta_factor);
    return stats::clr_transform(c.shares, delta);
}

std::string context_csv(const Compositions& c) {
    std::string out = "context,pattern,count,share\n";
    for (std::size_t g = 0; g < kContextCount; ++g) {
        std::int64_t total = 0;
        for (auto v : c.counts[g]) total += v;
        for (std::size_t k = 0; k < kPatternCount; ++k)
            out += std::string(to_string(static_cast<CollapsedContext>(g))) + "," + pattern_short(k) + "," +
                   std::to_string(c.counts[g][k]) + "," +
                   fmt("%.6f", total ? static_cast<double>(c.counts[g][k]) / static_cast<double>(total) : 0.0) + "\n";
    }
    return out;
}

ojson manova_suite(const Prepared& p, const AnalysisParams& params, std::map<std::string, std::string>& csv) {
    const auto c = compositions(p);
    csv["context_distribution.csv"] = context_csv(c);
    const auto clr = clr_of(c, params);

    std::vector<Eigen::MatrixXd> groups;
    ojson sizes;
    for (std::size_t g = 0; g < kContextCount; ++g) {
        std::vector<Eigen::Index> idx;
        for (std::size_t i = 0; i < c.group.size(); ++i)
            if (static_cast<std::size_t>(c.group[i]) == g) idx.push_back(static_cast<Eigen::Index>(i));
        sizes[std::string(to_string(static_cast<CollapsedContext>(g)))] = idx.size();
        if (idx.empty()) continue;
        Eigen::MatrixXd m(static_cast<Eigen::Index>(idx.size()), kPatternCount - 1);
        for (std::size_t r = 0; r < idx.size(); ++r) m.row(static_cast<Eigen::Index>(r)) = clr.values.row(idx[r]).leftCols(kPatternCount - 1);
        groups.push_back(std::move(m));
    }
    ojson j;
    j["observations"] = c.group.size();
    j["groups"] = std::move(sizes);
    j["delta"] = clr.delta;
    j["dropped_coordinate"] = pattern_name(kPatternCount - 1);
    const auto res = stats::manova_pillai(groups);
    j["pillai_v"] = res.pillai_v;
    j["f"] = number(res.f_stat);
    j["df1"] = res.df1;
    j["df2"] = res.df2;
    j["p"] = res.p_value;
    return j;
}

ojson posthoc_suite(const Prepared& p, const AnalysisParams& params) {
    const auto c = compositions(p);
    const auto clr = clr_of(c, params);
    ojson out;
    out["scale"] = "clr";
    out["delta"] = clr.delta;
    ojson patterns = ojson::array();
    for (std::size_t k = 0; k < kPatternCount; ++k) {
        std::vector<std::vector<double>> groups;
        std::vector<std::string> names;
        for (std::size_t g = 0; g < kContextCount; ++g) {
            std::vector<double> v;
            for (std::size_t i = 0; i < c.group.size(); ++i)
                if (static_cast<std::size_t>(c.group[i]) == g) v.push_back(clr.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)));
            if (v.size() < 2) continue;
            groups.push_back(std::move(v));
            names.emplace_back(to_string(static_cast<CollapsedContext>(g)));
        }
        ojson e;
        e["pattern"] = pattern_short(k);
        try {
            const auto gh = stats::games_howell(groups, params.alpha);
            e["anova"] = {{"f", number(gh.anova.f_stat)}, {"df1", gh.anova.df_between}, {"df2", gh.anova.df_within},
                          {"p", gh.anova.p_value}};
            ojson pairs = ojson::array();
            for (const auto& pr : gh.pairs)
                pairs.push_back({{"a", names[pr.first]}, {"b", names[pr.second]}, {"mean_diff", pr.mean_diff},
                                 {"q", number(pr.q_stat)}, {"df", pr.welch_df}, {"p", pr.p_value},
                                 {"significant", pr.significant}});
            e["pairs"] = std::move(pairs);
        } catch (const DomainError& err) {
            e["error"] = err.what();
        }
        patterns.push_back(std::move(e));
    }
    out["patterns"] = std::move(patterns);
    return out;
}

ojson ols_suite(const Prepared& p, const Corpus& corpus, const AnalysisParams& params) {
    const auto scores = score_assessments(corpus);
    std::map<std::string, std::array<double, kPatternCount>> counts;
    for (const auto& r : p.rows) counts[r.session->session_id][r.pattern.index()] += 1.0;

    std::vector<std::string> ids;
    for (const auto& [id, _] : counts)
        if (scores.count(id)) ids.push_back(id);
    std::vector<std::size_t> used;
    for (std::size_t k = 0; k < kPatternCount; ++k)
        for (const auto& id : ids)
            if (counts[id][k] > 0) {
                used.push_back(k);
                break;
            }

    ojson omitted = ojson::array();
    omitted.push_back("number_of_segments");
    for (std::size_t k = 0; k < kPatternCount; ++k)
        if (std::find(used.begin(), used.end(), k) == used.end()) omitted.push_back(pattern_name(k));

    std::vector<std::string> names = {"intercept", "pre_test"};
    for (auto k : used) names.push_back(pattern_name(k));
    Eigen::MatrixXd X(static_cast<Eigen::Index>(ids.size()), static_cast<Eigen::Index>(names.size()));
    Eigen::VectorXd y(static_cast<Eigen::Index>(ids.size()));
    for (std::size_t i = 0; i < ids.size(); ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        X(r, 0) = 1.0;
        X(r, 1) = scores.at(ids[i]).pre;
        for (std::size_t c = 0; c < used.size(); ++c) X(r, static_cast<Eigen::Index>(c + 2)) = counts[ids[i]][used[c]];
        y(r) = scores.at(ids[i]).post;
    }
    ojson j;
    j["outcome"] = "post_test";
    j["omitted"] = std::move(omitted);
    const auto fit = stats::ols_fit(X, y, names);
    ojson coefs = ojson::array();
    for (const auto& c : fit.coefficients)
        coefs.push_back({{"name", c.name}, {"estimate", c.estimate}, {"std_error", c.std_error}, {"t", number(c.t_stat)},
                         {"p", c.p_value}, {"ci_low", c.ci_low}, {"ci_high", c.ci_high},
                         {"significant", c.p_value < params.alpha}});
    j["coefficients"] = std::move(coefs);
    j["n"] = fit.n;
    j["r2"] = fit.r2;
    j["adj_r2"] = fit.adj_r2;
    j["f"] = number(fit.f_stat);
    j["df_model"] = fit.df_model;
    j["df_resid"] = fit.df_resid;
    j["model_p"] = fit.model_p;
    return j;
}

ojson lsa_suite(const Prepared& p, const AnalysisParams& params, std::map<std::string, std::string>& csv) {
    const auto res = stats::lsa_adjusted_residuals(p.sequences, kPatternCount, params.lsa_threshold);
    std::set<std::pair<std::size_t, std::size_t>> degenerate;
    for (const auto& d : res.degenerate) degenerate.insert({d.from, d.to});
    std::string out = "from,to,observed,expected,z,status\n";
    for (std::size_t i = 0; i < kPatternCount; ++i)
        for (std::size_t k = 0; k < kPatternCount; ++k) {
            const auto a = static_cast<Eigen::Index>(i), b = static_cast<Eigen::Index>(k);
            const double z = res.residuals(a, b);
            std::string status = degenerate.count({i, k}) ? "degenerate"
                                 : z > params.lsa_threshold ? "above"
                                 : z < -params.lsa_threshold ? "below"
                                                            : "ns";
            out += pattern_short(i) + "," + pattern_short(k) + "," + std::to_string(static_cast<long long>(res.observed(a, b))) +
                   "," + fmt("%.6f", res.expected(a, b)) + "," + fmt("%.6f", z) + "," + status + "\n";
        }
    csv["transitions.csv"] = out;

    ojson j;
    j["transitions"] = res.total;
    j["sequences"] = p.sequences.size();
    j["threshold"] = params.lsa_threshold;
    ojson flagged = ojson::array();
    for (const auto& f : res.flagged) {
        const auto a = static_cast<Eigen::Index>(f.from), b = static_cast<Eigen::Index>(f.to);
        flagged.push_back({{"from", pattern_short(f.from)}, {"to", pattern_short(f.to)},
                           {"observed", res.observed(a, b)}, {"expected", res.expected(a, b)},
                           {"z", res.residuals(a, b)}, {"direction", res.residuals(a, b) > 0 ? "above" : "below"}});
    }
    j["flagged"] = std::move(flagged);
    j["degenerate_cells"] = res.degenerate.size();
    return j;
}

ojson tests_suite(const Corpus& corpus) {
    const auto scores = score_assessments(corpus);
    std::vector<double> pre, post;
    for (const auto& s : corpus.sessions) {
        if (s.excluded) continue;
        auto it = scores.find(s.session_id);
        if (it == scores.end()) continue;
        pre.push_back(it->second.pre);
        post.push_back(it->second.post);
    }
    ojson j;
    auto describe = [](const std::vector<double>& v) {
        ojson d;
        d["n"] = v.size();
        d["mean"] = v.empty() ? ojson(nullptr) : ojson(stats::mean(v));
        d["sd"] = v.size() < 2 ? ojson(nullptr) : ojson(std::sqrt(stats::variance(v)));
        return d;
    };
    j["pre_test"] = describe(pre);
    j["post_test"] = describe(post);
    try {
        const auto t = stats::paired_t(pre, post);
        j["paired_t"] = {{"t", t.t}, {"df", t.df}, {"p", t.p_value}, {"mean_diff", t.mean_diff}, {"n", t.n}};
    } catch (const DomainError& e) {
        j["paired_t"] = {{"error", e.what()}};
    }

    ojson scales = ojson::array();
    for (auto scale : kSrlScales) {
        std::vector<std::vector<double>> items(3);
        std::vector<double> sums;
        for (const auto& s : corpus.sessions) {
            if (s.excluded) continue;
            for (const auto& r : s.srl)
                if (r.scale == scale) {
                    for (int i = 0; i < 3; ++i) items[i].push_back(r.item_scores[i]);
                    sums.push_back(r.sum());
                }
        }
        ojson e = describe(sums);
        e["scale"] = std::string(to_string(scale));
        try {
            e["alpha"] = stats::cronbach_alpha(items).alpha;
        } catch (const DomainError& err) {
            e["alpha"] = nullptr;
            e["error"] = err.what();
        }
        scales.push_back(std::move(e));
    }
    j["srl"] = std::move(scales);
    return j;
}

}  // namespace

AnalysisOutput run_analysis(const AnalysisInputs& in, const AnalysisParams& params) {
    if (!in.corpus || !in.segments || !in.labels || !in.contexts) throw Error("analysis inputs incomplete");
    for (const auto& s : params.suites)
        if (std::find(analysis_suites().begin(), analysis_suites().end(), s) == analysis_suites().end())
            throw ValidationError("unknown analysis suite '" + s + "'");

    const auto prepared = prepare(in);
    AnalysisOutput out;
    auto& rep = out.report;
    rep["inputs"] = {{"digest", in.digest},
                     {"sessions", in.corpus->sessions.size()},
                     {"sessions_analyzed", prepared.sessions_analyzed},
                     {"segments", prepared.rows.size()},
                     {"unclassified_segments", prepared.unclassified}};
    rep["parameters"] = {{"seed", params.seed},
                         {"permutations", params.permutations},
                         {"delta", params.delta ? ojson(*params.delta) : ojson(nullptr)},
                         {"delta_factor", params.delta_factor},
                         {"alpha", params.alpha},
                         {"lsa_threshold", params.lsa_threshold}};
    ojson results;
    for (const auto& name : analysis_suites()) {
        if (!params.suites.empty() && !params.suites.count(name)) continue;
        try {
            if (name == "distribution") results[name] = distribution_suite(prepared, out.csv);
            else if (name == "somers") results[name] = somers_suite(prepared, params);
            else if (name == "manova") results[name] = manova_suite(prepared, params, out.csv);
            else if (name == "posthoc") results[name] = posthoc_suite(prepared, params);
            else if (name == "ols") results[name] = ols_suite(prepared, *in.corpus, params);
            else if (name == "lsa") results[name] = lsa_suite(prepared, params, out.csv);
            else if (name == "tests") results[name] = tests_suite(*in.corpus);
        } catch (const DomainError& e) {
            results[name] = {{"error", e.what()}};
        }
    }
    rep["results"] = std::move(results);
    return out;
}

namespace {

double num(const ojson& j, const char* key) {
    auto it = j.find(key);
    return it != j.end() && it->is_number() ? it->get<double>() : std::nan("");
}

}  // namespace

std::string render_text_report(const ojson& analysis, const ojson* benchmark) {
    std::ostringstream o;
    const auto& in = analysis.at("inputs");
    const auto& res = analysis.at("results");
    o << "Reliance analysis\n";
    o << "  sessions analyzed: " << in.value("sessions_analyzed", 0) << ", segments: " << in.value("segments", 0)
      << ", unclassified: " << in.value("unclassified_segments", 0) << "\n";
    o << "  inputs digest: " << in.value("digest", std::string()) << "\n";

    auto section = [&](const char* key, const char* title) -> const ojson* {
        auto it = res.find(key);
        if (it == res.end()) return nullptr;
        o << "\n" << title << "\n";
        if (it->contains("error")) {
            o << "  not computed: " << it->at("error").get<std::string>() << "\n";
            return nullptr;
        }
        return &*it;
    };

    if (const auto* d = section("distribution", "Pattern distribution")) {
        for (const auto& p : d->at("patterns"))
            o << "  " << p.at("short").get<std::string>() << "  " << fmt("%4.0f", num(p, "count")) << "  "
              << fmt("%5.1f%%", 100.0 * num(p, "share")) << "\n";
        o << "  focal share " << fmt("%.1f%%", 100.0 * num(*d, "focal_share")) << ", undeveloped among focal "
          << fmt("%.1f%%", 100.0 * num(*d, "undeveloped_share_of_focal")) << "\n";
    }
    if (const auto* s = section("somers", "Somers' D (response-use given help-seeking)")) {
        const auto& m = s->at("modes");
        o << "  D = " << fmt("%.3f", num(m, "d")) << ", " << format_p(num(m, "p_permutation")) << " (permutation, B = "
          << m.value("permutations", 0) << "); asymptotic " << format_p(num(m, "p_asymptotic")) << "\n";
        for (const auto& e : s->at("srl")) {
            o << "  " << e.at("scale").get<std::string>() << " -> " << e.at("axis").get<std::string>() << ": ";
            if (e.contains("error")) o << "not computed\n";
            else o << "D = " << fmt("%.3f", num(e, "d")) << ", " << format_p(num(e, "p_permutation")) << "\n";
        }
    }
    if (const auto* m = section("manova", "MANOVA across knowledge contexts (CLR, Pillai's trace)")) {
        o << "  V = " << fmt("%.3f", num(*m, "pillai_v")) << ", F(" << fmt("%.0f", num(*m, "df1")) << ", "
          << fmt("%.0f", num(*m, "df2")) << ") = " << fmt("%.3f", num(*m, "f")) << ", " << format_p(num(*m, "p"))
          << ", delta = " << fmt("%.4g", num(*m, "delta")) << "\n";
    }
    if (const auto* g = section("posthoc", "Games-Howell on CLR coordinates (significant pairs)")) {
        bool any = false;
        for (const auto& e : g->at("patterns")) {
            if (!e.contains("pairs")) continue;
            for (const auto& pr : e.at("pairs"))
                if (pr.value("significant", false)) {
                    any = true;
                    o << "  " << e.at("pattern").get<std::string>() << ": " << pr.at("a").get<std::string>() << " vs "
                      << pr.at("b").get<std::string>() << ", " << format_p(num(pr, "p")) << "\n";
                }
        }
        if (!any) o << "  none\n";
    }
    if (const auto* r = section("ols", "OLS predicting post-test score")) {
        for (const auto& c : r->at("coefficients"))
            o << "  " << fmt("%-28s", 0.0).substr(0, 0) << c.at("name").get<std::string>()
              << std::string(std::max<int>(1, 28 - static_cast<int>(c.at("name").get<std::string>().size())), ' ')
              << fmt("%7.3f", num(c, "estimate")) << (c.value("significant", false) ? "*" : " ") << "  ["
              << fmt("%.3f", num(c, "ci_low")) << ", " << fmt("%.3f", num(c, "ci_high")) << "]\n";
        o << "  R2 = " << fmt("%.3f", num(*r, "r2")) << ", adj. R2 = " << fmt("%.3f", num(*r, "adj_r2")) << ", "
          << format_p(num(*r, "model_p")) << ", n = " << r->value("n", 0) << "\n";
        o << "  omitted:";
        for (const auto& name : r->at("omitted")) o << " " << name.get<std::string>();
        o << "\n";
    }
    if (const auto* l = section("lsa", "Lag sequential analysis")) {
        o << "  transitions: " << fmt("%.0f", num(*l, "transitions")) << "\n";
        for (const auto& f : l->at("flagged"))
            o << "  " << f.at("from").get<std::string>() << " -> " << f.at("to").get<std::string>()
              << ": z = " << fmt("%.2f", num(f, "z")) << ", n = " << fmt("%.0f", num(f, "observed")) << "\n";
    }
    if (const auto* t = section("tests", "Learning and self-regulation")) {
        const auto& pre = t->at("pre_test");
        const auto& post = t->at("post_test");
        o << "  pre-test M = " << fmt("%.2f", num(pre, "mean")) << " (SD " << fmt("%.2f", num(pre, "sd"))
          << "), post-test M = " << fmt("%.2f", num(post, "mean")) << " (SD " << fmt("%.2f", num(post, "sd")) << ")\n";
        const auto& pt = t->at("paired_t");
        if (pt.contains("error")) o << "  paired t: not computed\n";
        else
            o << "  paired t(" << fmt("%.0f", num(pt, "df")) << ") = " << fmt("%.3f", num(pt, "t")) << ", "
              << format_p(num(pt, "p")) << "\n";
        for (const auto& s : t->at("srl"))
            o << "  " << s.at("scale").get<std::string>() << ": M = " << fmt("%.2f", num(s, "mean")) << ", SD = "
              << fmt("%.2f", num(s, "sd")) << ", alpha = " << fmt("%.2f", num(s, "alpha")) << "\n";
    }
    if (benchmark) {
        o << "\nClassifier benchmark\n";
        for (const auto* axis : {"help_seeking", "response_use"}) {
            auto it = benchmark->find(axis);
            if (it == benchmark->end()) continue;
            o << "  " << axis << ": F1_Passive = " << fmt("%.3f", num(it->at("per_class").at(0), "f1"))
              << ", F1_Micro = " << fmt("%.3f", num(*it, "f1_micro")) << ", unclassified = "
              << it->value("unclassified_total", 0) << "\n";
        }
    }
    return o.str();
}

}  // namespace reliance
