#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <json.hpp>

#include "reliance/benchmark.hpp"
#include "reliance/diff.hpp"
#include "reliance/error.hpp"
#include "reliance/labeling.hpp"
#include "reliance/pipeline.hpp"
#include "reliance/stats/anova.hpp"
#include "reliance/stats/compositional.hpp"
#include "reliance/stats/lsa.hpp"
#include "reliance/stats/ols.hpp"
#include "reliance/stats/reliability.hpp"
#include "reliance/stats/somers.hpp"

namespace py = pybind11;
using namespace reliance;

namespace {

// JSON documents cross the boundary as text; the Python package decodes them.
std::string dumped(const nlohmann::ordered_json& j) { return j.dump(); }

RunConfig make_config(const std::string& corpus, const std::string& out, std::optional<std::uint64_t> seed,
                      unsigned jobs, const std::string& mode, const std::string& suite, std::size_t permutations,
                      std::optional<double> delta, std::optional<std::string> gold, std::optional<std::string> config,
                      const std::string& endpoint, bool drop_unclassified) {
    RunConfig cfg;
    cfg.corpus = corpus;
    cfg.out = out;
    cfg.seed = seed;
    cfg.jobs = jobs;
    auto m = parse_classifier_mode(mode);
    if (!m) throw ValidationError("unknown classifier mode '" + mode + "'");
    cfg.mode = *m;
    cfg.suite = suite;
    cfg.permutations = permutations;
    cfg.delta = delta;
    if (gold) cfg.gold = *gold;
    if (config) cfg.config = *config;
    cfg.endpoint = endpoint;
    cfg.drop_unclassified = drop_unclassified;
    return cfg;
}

std::optional<EngagementMode> mode_or_none(const py::handle& h) {
    if (h.is_none()) return std::nullopt;
    const auto s = h.cast<std::string>();
    auto m = parse_mode(s);
    if (!m) throw ValidationError("unknown engagement mode '" + s + "'");
    return m;
}

AxisLabels axis_labels(const py::dict& d) {
    AxisLabels out;
    for (auto [k, v] : d) out[k.cast<std::string>()] = mode_or_none(v);
    return out;
}

}  // namespace

PYBIND11_MODULE(_reliancescope, m) {
    m.doc() = "Native core of reliancescope";

    // Translators run newest first, so the base class goes in first.
    py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<DomainError>(m, "DomainError", PyExc_ArithmeticError);
    py::register_exception<EndpointError>(m, "EndpointError", PyExc_ConnectionError);

    m.def("somers_d",
          [](std::vector<int> x, std::vector<int> y, std::size_t permutations, std::uint64_t seed, unsigned threads) {
              stats::SomersOptions o;
              o.permutations = permutations;
              o.seed = seed;
              o.threads = threads;
              const auto r = stats::somers_d(x, y, o);
              py::dict d;
              d["d_yx"] = r.d_yx;
              d["d_xy"] = r.d_xy ? py::cast(*r.d_xy) : py::none();
              d["concordant"] = r.counts.concordant;
              d["discordant"] = r.counts.discordant;
              d["ties_x_only"] = r.counts.ties_x_only;
              d["ties_y_only"] = r.counts.ties_y_only;
              d["ties_both"] = r.counts.ties_both;
              d["n"] = r.n;
              d["p_permutation"] = r.p_permutation;
              d["p_asymptotic"] = r.p_asymptotic;
              d["ase0"] = r.ase0;
              return d;
          },
          py::arg("x"), py::arg("y"), py::arg("permutations") = 10000, py::arg("seed") = 0, py::arg("threads") = 1);

    m.def("clr_transform",
          [](const Eigen::MatrixXd& comps, std::optional<double> delta) {
              const auto r = stats::clr_transform(comps, delta);
              return py::make_tuple(r.values, r.replaced, r.delta);
          },
          py::arg("compositions"), py::arg("delta") = py::none());

    m.def("manova_pillai", [](const std::vector<Eigen::MatrixXd>& groups) {
        const auto r = stats::manova_pillai(groups);
        py::dict d;
        d["pillai_v"] = r.pillai_v;
        d["f"] = r.f_stat;
        d["df1"] = r.df1;
        d["df2"] = r.df2;
        d["p"] = r.p_value;
        return d;
    });

    m.def("games_howell",
          [](const std::vector<std::vector<double>>& groups, double alpha) {
              const auto r = stats::games_howell(groups, alpha);
              py::list pairs;
              for (const auto& p : r.pairs) {
                  py::dict d;
                  d["first"] = p.first;
                  d["second"] = p.second;
                  d["mean_diff"] = p.mean_diff;
                  d["q"] = p.q_stat;
                  d["df"] = p.welch_df;
                  d["p"] = p.p_value;
                  d["significant"] = p.significant;
                  pairs.append(d);
              }
              py::dict anova;
              anova["f"] = r.anova.f_stat;
              anova["p"] = r.anova.p_value;
              return py::make_tuple(pairs, anova);
          },
          py::arg("groups"), py::arg("alpha") = 0.05);

    m.def("ols_fit",
          [](const Eigen::MatrixXd& X, const Eigen::VectorXd& y, std::vector<std::string> names) {
              const auto r = stats::ols_fit(X, y, names);
              py::dict d;
              py::list coefs;
              for (const auto& c : r.coefficients) {
                  py::dict e;
                  e["name"] = c.name;
                  e["estimate"] = c.estimate;
                  e["std_error"] = c.std_error;
                  e["t"] = c.t_stat;
                  e["p"] = c.p_value;
                  e["ci_low"] = c.ci_low;
                  e["ci_high"] = c.ci_high;
                  coefs.append(e);
              }
              d["coefficients"] = coefs;
              d["r2"] = r.r2;
              d["adj_r2"] = r.adj_r2;
              d["f"] = r.f_stat;
              d["model_p"] = r.model_p;
              d["residuals"] = r.residuals;
              return d;
          },
          py::arg("X"), py::arg("y"), py::arg("names"));

    m.def("lsa_from_counts",
          [](const Eigen::MatrixXd& observed, double threshold) {
              const auto r = stats::lsa_from_counts(observed, threshold);
              return py::make_tuple(r.expected, r.residuals);
          },
          py::arg("observed"), py::arg("threshold") = 1.96);

    m.def("lsa_sequences",
          [](const std::vector<std::vector<int>>& seqs, std::size_t states, double threshold) {
              const auto r = stats::lsa_adjusted_residuals(seqs, states, threshold);
              return py::make_tuple(r.observed, r.expected, r.residuals);
          },
          py::arg("sequences"), py::arg("states"), py::arg("threshold") = 1.96);

    m.def("cronbach_alpha", [](const std::vector<std::vector<double>>& items) { return stats::cronbach_alpha(items).alpha; });
    m.def("paired_t", [](std::vector<double> pre, std::vector<double> post) {
        const auto r = stats::paired_t(pre, post);
        return py::make_tuple(r.t, r.df, r.p_value);
    });

    m.def("score_predictions",
          [](const py::dict& gold, const py::dict& pred, const std::string& axis, bool drop) {
              const auto a = parse_axis(axis);
              if (!a) throw ValidationError("unknown axis '" + axis + "'");
              const auto r = score_predictions(axis_labels(gold), axis_labels(pred), *a, drop);
              py::dict d;
              d["counts"] = r.counts;
              d["f1"] = std::vector<double>{r.per_class[0].f1, r.per_class[1].f1, r.per_class[2].f1};
              d["f1_micro"] = r.f1_micro;
              d["accuracy"] = r.accuracy;
              return d;
          },
          py::arg("gold"), py::arg("pred"), py::arg("axis") = "help_seeking", py::arg("drop_unclassified") = false);

    m.def("diff_snapshots", [](const std::string& prev, const std::string& next) {
        const auto d = diff_snapshots(prev, next);
        return py::make_tuple(d.offset, py::bytes(d.deleted), py::bytes(d.inserted));
    });
    m.def("reuse_similarity", &reuse_similarity, py::arg("inserted"), py::arg("block"));

    auto config_args = [] {
        return std::make_tuple(py::arg("corpus"), py::arg("out"), py::arg("seed") = py::none(), py::arg("jobs") = 1u,
                               py::arg("mode") = "rules", py::arg("suite") = "all", py::arg("permutations") = 10000,
                               py::arg("delta") = py::none(), py::arg("gold") = py::none(),
                               py::arg("config") = py::none(), py::arg("endpoint") = "",
                               py::arg("drop_unclassified") = false);
    };
    auto stage = [&](const char* name, auto fn, const char* doc) {
        std::apply(
            [&](auto... args) {
                m.def(
                    name,
                    [fn](const std::string& corpus, const std::string& out, std::optional<std::uint64_t> seed,
                         unsigned jobs, const std::string& mode, const std::string& suite, std::size_t permutations,
                         std::optional<double> delta, std::optional<std::string> gold,
                         std::optional<std::string> config, const std::string& endpoint, bool drop) {
                        auto cfg = make_config(corpus, out, seed, jobs, mode, suite, permutations, delta, gold, config,
                                               endpoint, drop);
                        py::gil_scoped_release release;
                        return fn(cfg);
                    },
                    args..., doc);
            },
            config_args());
    };
    stage("validate", [](const RunConfig& c) { return dumped(run_validate(c)); }, "Validate a corpus; JSON counts.");
    stage("segment", [](const RunConfig& c) { return dumped(run_segment(c)); }, "Run the segment stage.");
    stage("classify", [](const RunConfig& c) { return dumped(run_classify(c)); }, "Run the classify stage.");
    stage("context", [](const RunConfig& c) { return dumped(run_context(c)); }, "Run the context stage.");
    stage("analyze", [](const RunConfig& c) { return dumped(run_analyze(c)); }, "Run the analysis suites.");
    stage("benchmark", [](const RunConfig& c) { return dumped(run_benchmark(c)); }, "Score labels against gold.");
    stage("report", [](const RunConfig& c) { return run_report(c); }, "Render the text report.");

    m.def("write_fixture", [](std::uint64_t seed, const std::string& dir) { return dumped(write_fixture(seed, dir)); },
          py::arg("seed"), py::arg("dir"));
}
