#include <doctest.h>

#include <random>
#include <vector>

#include "reliance/error.hpp"
#include "reliance/stats/somers.hpp"

using namespace reliance::stats;

namespace {

// Independent oracle: sign products over all pairs.
double brute_force_d(const std::vector<int>& x, const std::vector<int>& y) {
    std::int64_t s = 0, denom = 0;
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = i + 1; j < x.size(); ++j) {
            const int sx = (x[i] > x[j]) - (x[i] < x[j]);
            const int sy = (y[i] > y[j]) - (y[i] < y[j]);
            s += sx * sy;
            if (sx != 0) ++denom;
        }
    return static_cast<double>(s) / static_cast<double>(denom);
}

}  // namespace

TEST_CASE("perfect concordance and discordance") {
    std::vector<int> a{0, 1, 2}, b{0, 1, 2};
    CHECK(somers_d(a, b, {.permutations = 0}).d_yx == 1.0);
    std::vector<int> c{0, 1}, d{1, 0};
    CHECK(somers_d(c, d, {.permutations = 0}).d_yx == -1.0);
}

TEST_CASE("matches the all-pairs oracle on seeded random samples") {
    std::mt19937_64 rng(20240611);
    for (int rep = 0; rep < 200; ++rep) {
        const std::size_t n = 2 + rng() % 49;
        std::vector<int> x(n), y(n);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = static_cast<int>(rng() % 3);
            y[i] = static_cast<int>(rng() % 3);
        }
        if (std::all_of(x.begin(), x.end(), [&](int v) { return v == x[0]; })) x[0] = (x[0] + 1) % 3;
        const auto r = somers_d(x, y, {.permutations = 0});
        CHECK(r.d_yx == brute_force_d(x, y));
        CHECK(count_pairs_table(x, y) == count_pairs_exhaustive(x, y));
    }
}

TEST_CASE("asymptotic p matches reference") {
    std::vector<int> xs{0, 0, 0, 1, 1, 1, 2, 2, 2, 0, 1, 2, 0, 0, 1};
    std::vector<int> ys{0, 1, 0, 1, 2, 1, 2, 1, 2, 0, 0, 2, 2, 0, 1};
    const auto r = somers_d(xs, ys, {.permutations = 2000, .seed = 11});
    CHECK(r.d_yx == doctest::Approx(0.5675675675675675).epsilon(1e-14));
    CHECK(r.p_asymptotic == doctest::Approx(0.002950747585472983).epsilon(1e-9));
    CHECK(r.p_permutation > 0.0);
    CHECK(r.p_permutation < 0.05);
}

TEST_CASE("permutation p is deterministic per seed and independent of threads") {
    std::mt19937_64 rng(5);
    std::vector<int> x(300), y(300);
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = static_cast<int>(rng() % 3);
        y[i] = static_cast<int>((x[i] + rng() % 3) % 3);
    }
    const auto a = somers_d(x, y, {.permutations = 999, .seed = 42, .threads = 1});
    const auto b = somers_d(x, y, {.permutations = 999, .seed = 42, .threads = 1});
    const auto c = somers_d(x, y, {.permutations = 999, .seed = 42, .threads = 4});
    const auto d = somers_d(x, y, {.permutations = 999, .seed = 43, .threads = 1});
    CHECK(a.p_permutation == b.p_permutation);
    CHECK(a.p_permutation == c.p_permutation);
    CHECK(a.d_yx == d.d_yx);
    // p is (hits + 1) / (B + 1)
    const double hits = a.p_permutation * 1000.0 - 1.0;
    CHECK(hits == doctest::Approx(std::round(hits)));
}

TEST_CASE("large samples use table counting and agree with pair counting") {
    std::mt19937_64 rng(9);
    std::vector<int> x(6000), y(6000);
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = static_cast<int>(rng() % 4);
        y[i] = static_cast<int>(rng() % 3);
    }
    const auto via_table = somers_d(x, y, {.permutations = 0});
    const auto via_pairs = somers_d(x, y, {.permutations = 0, .exhaustive_limit = 10000});
    CHECK(via_table.counts == via_pairs.counts);
    CHECK(via_table.d_yx == via_pairs.d_yx);
}

TEST_CASE("undefined inputs") {
    std::vector<int> same{1, 1, 1}, y{0, 1, 2};
    CHECK_THROWS_AS(somers_d(same, y), reliance::DomainError);
    std::vector<int> one{1}, one_y{2};
    CHECK_THROWS_AS(somers_d(one, one_y), reliance::DomainError);
    // constant y is fine for D(y|x): every pair is a tie on y
    std::vector<int> x{0, 1, 2}, flat{1, 1, 1};
    const auto r = somers_d(x, flat, {.permutations = 10});
    CHECK(r.d_yx == 0.0);
    CHECK_FALSE(r.d_xy.has_value());
}
