#pragma once

#include <span>
#include <vector>

namespace reliance::stats {

struct PairedTResult {
    double t = 0.0;
    double df = 0.0;
    double p_value = 1.0;
    double mean_diff = 0.0;  // mean(post - pre)
    std::size_t n = 0;
};

/// Paired t-test on post - pre. Zero difference variance with zero mean gives
/// t = 0, p = 1; with a nonzero mean it throws DomainError.
PairedTResult paired_t(std::span<const double> pre, std::span<const double> post);

struct AlphaResult {
    double alpha = 0.0;
    std::size_t items = 0;
    std::size_t respondents = 0;
};

/// Cronbach's alpha; `items` holds one column of scores per item.
AlphaResult cronbach_alpha(const std::vector<std::vector<double>>& items);

}  // namespace reliance::stats
