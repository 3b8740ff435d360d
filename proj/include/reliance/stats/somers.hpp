#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>

namespace reliance::stats {

struct PairCounts {
    std::int64_t concordant = 0;
    std::int64_t discordant = 0;
    std::int64_t ties_x_only = 0;  // tied on x, differ on y
    std::int64_t ties_y_only = 0;  // tied on y, differ on x
    std::int64_t ties_both = 0;

    bool operator==(const PairCounts&) const = default;
};

struct SomersResult {
    double d_yx = 0.0;                // headline: y dependent on x
    std::optional<double> d_xy;       // empty when every y is identical
    PairCounts counts;
    std::size_t n = 0;
    double p_permutation = 1.0;       // two-sided, (hits + 1) / (B + 1)
    std::size_t permutations = 0;
    std::uint64_t seed = 0;
    double ase0 = 0.0;                // null-hypothesis asymptotic SE of d_yx
    double p_asymptotic = 1.0;
};

/// Pair classification by visiting every pair.
PairCounts count_pairs_exhaustive(std::span<const int> x, std::span<const int> y);
/// Same counts from the x-by-y contingency table.
PairCounts count_pairs_table(std::span<const int> x, std::span<const int> y);

struct SomersOptions {
    std::size_t permutations = 10000;
    std::uint64_t seed = 0;
    unsigned threads = 1;              // the result does not depend on this
    std::size_t exhaustive_limit = 5000;
};

/// Somers' D of y given x, with a seeded permutation p (shuffling y) and an
/// asymptotic p from the null standard error. Throws DomainError when n < 2 or
/// when every x is identical.
SomersResult somers_d(std::span<const int> x, std::span<const int> y, const SomersOptions& opts = {});

}  // namespace reliance::stats
