#pragma once

#include <span>
#include <vector>

namespace reliance::stats {

struct AnovaResult {
    double f_stat = 0.0;
    double df_between = 0.0;
    double df_within = 0.0;
    double p_value = 1.0;
};

/// Classic one-way ANOVA. Needs at least two groups and more observations
/// than groups. Zero within-group variance gives p = 1 for equal means and
/// p = 0 otherwise.
AnovaResult oneway_anova(const std::vector<std::vector<double>>& groups);

struct GamesHowellPair {
    std::size_t first = 0;
    std::size_t second = 0;
    double mean_diff = 0.0;  // mean(first) - mean(second)
    double q_stat = 0.0;
    double welch_df = 0.0;
    double p_value = 1.0;
    bool significant = false;
};

struct GamesHowellResult {
    std::vector<GamesHowellPair> pairs;  // (0,1), (0,2), ..., (1,2), ...
    AnovaResult anova;
};

/// Pairwise Games-Howell comparisons plus the omnibus one-way ANOVA.
/// Every group needs at least two observations.
GamesHowellResult games_howell(const std::vector<std::vector<double>>& groups, double alpha = 0.05);

double mean(std::span<const double> v);
/// Sample variance (n - 1 denominator).
double variance(std::span<const double> v);

}  // namespace reliance::stats
