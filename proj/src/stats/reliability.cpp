#include "reliance/stats/reliability.hpp"

#include <cmath>

#include "reliance/error.hpp"
#include "reliance/stats/anova.hpp"
#include "reliance/stats/special.hpp"

namespace reliance::stats {

PairedTResult paired_t(std::span<const double> pre, std::span<const double> post) {
    if (pre.size() != post.size()) throw DomainError("paired_t: samples differ in length");
    if (pre.size() < 2) throw DomainError("paired_t: need at least two pairs");
    std::vector<double> d(pre.size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = post[i] - pre[i];

    PairedTResult res;
    res.n = d.size();
    res.df = static_cast<double>(d.size() - 1);
    res.mean_diff = mean(d);
    const double var = variance(d);
    if (var <= 0.0) {
        if (res.mean_diff != 0.0) throw DomainError("paired_t: differences are constant and nonzero");
        return res;
    }
    res.t = res.mean_diff / std::sqrt(var / static_cast<double>(d.size()));
    res.p_value = t_two_sided_p(res.t, res.df);
    return res;
}

AlphaResult cronbach_alpha(const std::vector<std::vector<double>>& items) {
    if (items.size() < 2) throw DomainError("cronbach_alpha: need at least two items");
    const std::size_t n = items.front().size();
    if (n < 2) throw DomainError("cronbach_alpha: need at least two respondents");
    for (const auto& col : items)
        if (col.size() != n) throw DomainError("cronbach_alpha: items differ in respondent count");

    std::vector<double> totals(n, 0.0);
    double item_var = 0.0;
    for (const auto& col : items) {
        item_var += variance(col);
        for (std::size_t i = 0; i < n; ++i) totals[i] += col[i];
    }
    const double total_var = variance(totals);
    if (total_var <= 0.0) throw DomainError("cronbach_alpha: total score has zero variance");
    const double k = static_cast<double>(items.size());
    return {k / (k - 1.0) * (1.0 - item_var / total_var), items.size(), n};
}

}  // namespace reliance::stats
