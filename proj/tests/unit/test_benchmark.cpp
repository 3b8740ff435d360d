#include <doctest.h>

#include <random>

#include "reliance/benchmark.hpp"
#include "reliance/error.hpp"

using namespace reliance;

namespace {

constexpr auto P = EngagementMode::Passive;
constexpr auto A = EngagementMode::Active;
constexpr auto C = EngagementMode::Constructive;

AxisLabels labels(std::initializer_list<std::optional<EngagementMode>> modes) {
    AxisLabels out;
    int i = 0;
    for (auto m : modes) out["s" + std::to_string(i++)] = m;
    return out;
}

}  // namespace

TEST_CASE("perfect predictions") {
    const auto g = labels({P, A, C, P});
    const auto m = score_predictions(g, g, Axis::HelpSeeking);
    for (const auto& c : m.per_class) CHECK(c.f1 == 1.0);
    CHECK(m.f1_micro == 1.0);
}

TEST_CASE("worked confusion example") {
    const auto m = score_predictions(labels({P, P, A, C}), labels({P, A, A, C}), Axis::HelpSeeking);
    CHECK(std::fabs(m.per_class[0].f1 - 2.0 / 3.0) < 1e-9);
    CHECK(std::fabs(m.per_class[0].f1 - 0.667) < 1e-3);
    CHECK(m.f1_micro == doctest::Approx(0.75));
    CHECK(m.total() == 4);
}

TEST_CASE("micro F1 equals accuracy on random single-label data") {
    std::mt19937_64 rng(101);
    for (int rep = 0; rep < 100; ++rep) {
        AxisLabels g, p;
        const int n = 1 + static_cast<int>(rng() % 60);
        for (int i = 0; i < n; ++i) {
            const auto id = "s" + std::to_string(i);
            g[id] = static_cast<EngagementMode>(rng() % 3);
            p[id] = rep % 2 && rng() % 10 == 0 ? std::nullopt : std::optional(static_cast<EngagementMode>(rng() % 3));
        }
        const auto m = score_predictions(g, p, Axis::ResponseUse);
        std::size_t missing = 0;
        for (auto u : m.unclassified) missing += u;
        if (missing == 0) {
            CHECK(m.f1_micro == doctest::Approx(m.accuracy).epsilon(1e-15));
        } else {
            // Abstentions lower recall (which is then accuracy) but not precision.
            CHECK(m.f1_micro > m.accuracy);
        }
        std::int64_t cells = 0;
        for (auto& row : m.counts)
            for (auto v : row) cells += v;
        for (auto u : m.unclassified) cells += u;
        CHECK(cells == n);
    }
}

TEST_CASE("unclassified predictions count against the gold class unless dropped") {
    const auto g = labels({P, P});
    const auto p = labels({P, std::nullopt});
    const auto strict = score_predictions(g, p, Axis::HelpSeeking);
    CHECK(strict.accuracy == 0.5);
    CHECK(strict.per_class[0].recall == 0.5);
    const auto lenient = score_predictions(g, p, Axis::HelpSeeking, true);
    CHECK(lenient.accuracy == 1.0);
    CHECK(lenient.dropped == 1);
}

TEST_CASE("permutation invariance and id checks") {
    AxisLabels g{{"b", A}, {"a", P}, {"c", C}};
    AxisLabels p{{"c", A}, {"a", P}, {"b", A}};
    const auto m1 = score_predictions(g, p, Axis::HelpSeeking);
    AxisLabels g2{{"x", C}, {"y", A}, {"z", P}};
    AxisLabels p2{{"x", A}, {"y", A}, {"z", P}};
    const auto m2 = score_predictions(g2, p2, Axis::HelpSeeking);
    CHECK(m1.counts == m2.counts);
    CHECK_THROWS_AS(score_predictions(g, {{"a", P}}, Axis::HelpSeeking), ValidationError);
}

TEST_CASE("agreement and kappa") {
    std::map<std::string, RaterLabel> a, b;
    for (int i = 0; i < 9; ++i) {
        const auto m = static_cast<EngagementMode>(i % 3);
        a["s" + std::to_string(i)] = {m, m, std::nullopt};
    }
    auto r = agreement(a, a);
    CHECK(r.help_seeking.agreement == 1.0);
    CHECK(*r.help_seeking.kappa == doctest::Approx(1.0));
    CHECK(r.disagreements.empty());

    // Constant rater vs uniform rater: agreement 1/3, kappa 0.
    for (int i = 0; i < 9; ++i) b["s" + std::to_string(i)] = {P, P, std::nullopt};
    r = agreement(a, b);
    CHECK(r.help_seeking.agreement == doctest::Approx(1.0 / 3.0));
    CHECK(*r.help_seeking.kappa == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(r.disagreements.size() == 6);
    CHECK(r.overlap == 9);

    CHECK_THROWS_AS(agreement(a, {}), ValidationError);
}

TEST_CASE("disagreement on 3 of 10") {
    std::map<std::string, RaterLabel> a, b;
    for (int i = 0; i < 10; ++i) {
        const auto id = "s" + std::to_string(i);
        a[id] = {P, A, std::nullopt};
        b[id] = i < 3 ? RaterLabel{C, A, std::nullopt} : RaterLabel{P, A, std::nullopt};
    }
    const auto r = agreement(a, b);
    CHECK(r.joint_agreement == doctest::Approx(0.7));
    CHECK(r.disagreements == std::vector<std::string>{"s0", "s1", "s2"});
}
