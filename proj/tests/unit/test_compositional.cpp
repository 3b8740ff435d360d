#include <doctest.h>

#include <cmath>
#include <random>

#include "reliance/error.hpp"
#include "reliance/stats/compositional.hpp"

using namespace reliance::stats;
using Eigen::MatrixXd;

namespace {

MatrixXd rows(std::initializer_list<std::initializer_list<double>> data) {
    MatrixXd m(static_cast<Eigen::Index>(data.size()), static_cast<Eigen::Index>(data.begin()->size()));
    Eigen::Index r = 0;
    for (const auto& row : data) {
        Eigen::Index c = 0;
        for (double v : row) m(r, c++) = v;
        ++r;
    }
    return m;
}

}  // namespace

TEST_CASE("clr of simple compositions") {
    const auto uniform = clr_transform(rows({{1.0 / 3, 1.0 / 3, 1.0 / 3}}));
    for (int k = 0; k < 3; ++k) CHECK(std::fabs(uniform.values(0, k)) < 1e-15);

    const auto pw = clr_transform(rows({{0.5, 0.25, 0.25}}));
    const double l2 = std::log(2.0);
    CHECK(std::fabs(pw.values(0, 0) - 2.0 / 3.0 * l2) < 1e-12);
    CHECK(std::fabs(pw.values(0, 1) + l2 / 3.0) < 1e-12);
    CHECK(std::fabs(pw.values(0, 2) + l2 / 3.0) < 1e-12);
}

TEST_CASE("multiplicative replacement") {
    const auto r = clr_transform(rows({{0.5, 0.5, 0.0}}), 0.1);
    CHECK(r.replaced(0, 0) == doctest::Approx(0.45).epsilon(1e-15));
    CHECK(r.replaced(0, 1) == doctest::Approx(0.45).epsilon(1e-15));
    CHECK(r.replaced(0, 2) == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(std::fabs(r.replaced.row(0).sum() - 1.0) < 1e-12);
}

TEST_CASE("random compositions: rows of the clr sum to zero, replacement keeps unit sums") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    MatrixXd m(200, 9);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index k = 0; k < m.cols(); ++k) m(i, k) = u(rng) < 0.4 ? 0.0 : u(rng);
        if (m.row(i).sum() == 0.0) m(i, 0) = 1.0;
        m.row(i) /= m.row(i).sum();
    }
    const auto r = clr_transform(m);
    CHECK(r.delta == doctest::Approx(0.5 * (m.array() > 0).select(m, 2.0).minCoeff()));
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        CHECK(std::fabs(r.values.row(i).sum()) < 1e-12);
        CHECK(std::fabs(r.replaced.row(i).sum() - 1.0) < 1e-12);
    }
}

TEST_CASE("invalid compositions") {
    CHECK_THROWS_AS(clr_transform(rows({{0.5, 0.6}})), reliance::DomainError);
    CHECK_THROWS_AS(clr_transform(rows({{1.2, -0.2}})), reliance::DomainError);
    CHECK_THROWS_AS(clr_transform(rows({{1.0, 0.0, 0.0}}), 0.5), reliance::DomainError);
}

TEST_CASE("manova: two-group reference") {
    const auto g1 = rows({{2, 3}, {3, 3.5}, {4, 5}, {3.5, 4.5}, {2.5, 2}});
    const auto g2 = rows({{4, 2}, {5, 3.5}, {6, 3}, {5.5, 4}, {4.5, 2.5}, {5, 1.5}});
    const auto r = manova_pillai({g1, g2});
    CHECK(std::fabs(r.pillai_v - 0.8674934725848569) < 1e-8);
    CHECK(r.f_stat == doctest::Approx(26.187192118226708).epsilon(1e-9));
    CHECK(r.df1 == 2);
    CHECK(r.df2 == 8);
    CHECK(r.p_value == doctest::Approx(0.00030828265492479436).epsilon(1e-7));
}

TEST_CASE("manova: three-group reference") {
    const auto h1 = rows({{1, 2}, {2, 2.5}, {1.5, 3}, {2.5, 1}});
    const auto h2 = rows({{3, 2}, {2.5, 4}, {3.5, 3}, {4, 3.5}, {3, 2.5}});
    const auto h3 = rows({{1, 4}, {1.5, 5}, {2, 4.5}, {0.5, 3.5}});
    const auto r = manova_pillai({h1, h2, h3});
    CHECK(std::fabs(r.pillai_v - 1.2823343369683433) < 1e-8);
    CHECK(r.f_stat == doctest::Approx(8.934065004248216).epsilon(1e-9));
    CHECK(r.df1 == 4);
    CHECK(r.df2 == 20);
    CHECK(r.p_value == doctest::Approx(0.00026232392030267854).epsilon(1e-7));
}

TEST_CASE("manova: identical group means give V = 0") {
    const auto a = rows({{1, 2}, {3, 4}, {2, 5}});
    const auto b = rows({{3, 2}, {1, 4}, {2, 5}});
    const auto r = manova_pillai({a, b});
    CHECK(r.pillai_v <= 1e-10);
    CHECK(r.p_value == doctest::Approx(1.0));
}

TEST_CASE("manova: V stays within [0, min(p, g - 1)]") {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> z;
    for (int rep = 0; rep < 100; ++rep) {
        const int p = 1 + static_cast<int>(rng() % 4);
        const int g = 2 + static_cast<int>(rng() % 3);
        std::vector<MatrixXd> groups;
        for (int k = 0; k < g; ++k) {
            MatrixXd m(p + 2 + static_cast<int>(rng() % 5), p);
            for (Eigen::Index i = 0; i < m.rows(); ++i)
                for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = z(rng) + 0.7 * k * (j % 2);
            groups.push_back(m);
        }
        const auto r = manova_pillai(groups);
        CHECK(r.pillai_v >= -1e-12);
        CHECK(r.pillai_v <= std::min(p, g - 1) + 1e-12);
        CHECK(r.p_value >= 0.0);
        CHECK(r.p_value <= 1.0);
    }
}

TEST_CASE("manova: degenerate inputs") {
    const auto a = rows({{1, 2}, {3, 4}});
    CHECK_THROWS_AS(manova_pillai({a}), reliance::DomainError);
    // A column that is identical everywhere makes H + E singular.
    const auto b = rows({{1, 2}, {2, 2}, {3, 2}});
    const auto c = rows({{4, 2}, {5, 2}, {6, 2}});
    CHECK_THROWS_AS(manova_pillai({b, c}), reliance::DomainError);
}
