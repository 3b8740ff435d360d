#include "reliance/stats/anova.hpp"

#include <cmath>
#include <limits>

#include "reliance/error.hpp"
#include "reliance/stats/special.hpp"

namespace reliance::stats {

double mean(std::span<const double> v) {
    if (v.empty()) throw DomainError("mean of an empty sample");
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double variance(std::span<const double> v) {
    if (v.size() < 2) throw DomainError("variance needs at least two observations");
    const double m = mean(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return ss / static_cast<double>(v.size() - 1);
}

AnovaResult oneway_anova(const std::vector<std::vector<double>>& groups) {
    if (groups.size() < 2) throw DomainError("anova: need at least two groups");
    std::size_t n = 0;
    double total = 0.0;
    for (const auto& g : groups) {
        if (g.empty()) throw DomainError("anova: empty group");
        n += g.size();
        for (double x : g) total += x;
    }
    if (n <= groups.size()) throw DomainError("anova: need more observations than groups");
    const double grand = total / static_cast<double>(n);
    double ssb = 0.0, ssw = 0.0;
    for (const auto& g : groups) {
        const double m = mean(g);
        ssb += static_cast<double>(g.size()) * (m - grand) * (m - grand);
        for (double x : g) ssw += (x - m) * (x - m);
    }
    AnovaResult res;
    res.df_between = static_cast<double>(groups.size() - 1);
    res.df_within = static_cast<double>(n - groups.size());
    if (ssw <= 0.0) {
        const bool equal = ssb <= 0.0;
        res.f_stat = equal ? 0.0 : std::numeric_limits<double>::infinity();
        res.p_value = equal ? 1.0 : 0.0;
        return res;
    }
    res.f_stat = (ssb / res.df_between) / (ssw / res.df_within);
    res.p_value = f_sf(res.f_stat, res.df_between, res.df_within);
    return res;
}

GamesHowellResult games_howell(const std::vector<std::vector<double>>& groups, double alpha) {
    if (groups.size() < 2) throw DomainError("games_howell: need at least two groups");
    for (const auto& g : groups)
        if (g.size() < 2) throw DomainError("games_howell: every group needs at least two observations");

    const int k = static_cast<int>(groups.size());
    std::vector<double> means, vars, ns;
    for (const auto& g : groups) {
        means.push_back(mean(g));
        vars.push_back(variance(g));
        ns.push_back(static_cast<double>(g.size()));
    }

    GamesHowellResult res;
    res.anova = oneway_anova(groups);
    for (std::size_t i = 0; i < groups.size(); ++i)
        for (std::size_t j = i + 1; j < groups.size(); ++j) {
            GamesHowellPair pair;
            pair.first = i;
            pair.second = j;
            pair.mean_diff = means[i] - means[j];
            const double vi = vars[i] / ns[i], vj = vars[j] / ns[j];
            if (vi + vj <= 0.0) {
                pair.welch_df = ns[i] + ns[j] - 2.0;
                const bool equal = pair.mean_diff == 0.0;
                pair.q_stat = equal ? 0.0 : std::numeric_limits<double>::infinity();
                pair.p_value = equal ? 1.0 : 0.0;
            } else {
                pair.q_stat = std::fabs(pair.mean_diff) / std::sqrt((vi + vj) / 2.0);
                pair.welch_df = (vi + vj) * (vi + vj) / (vi * vi / (ns[i] - 1.0) + vj * vj / (ns[j] - 1.0));
                pair.p_value = std::min(1.0, std::max(0.0, 1.0 - ptukey(pair.q_stat, k, pair.welch_df)));
            }
            pair.significant = pair.p_value < alpha;
            res.pairs.push_back(pair);
        }
    return res;
}

}  // namespace reliance::stats
