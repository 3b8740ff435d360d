#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace reliance::stats {

struct ClrMatrix {
    Eigen::MatrixXd replaced;  // compositions after zero replacement
    Eigen::MatrixXd values;    // centered log-ratios, one row per composition
    double delta = 0.0;
};

/// Smallest strictly positive entry, times `factor`.
double default_replacement_delta(const Eigen::MatrixXd& compositions, double factor = 0.5);

/// Multiplicative zero replacement followed by the centered log-ratio.
/// Rows must be non-negative and sum to 1 (within 1e-9). Without `delta` the
/// default above is used. Throws DomainError for an all-zero row or when a
/// row's zeros would absorb the whole unit sum.
ClrMatrix clr_transform(const Eigen::MatrixXd& compositions, std::optional<double> delta = std::nullopt);

struct ManovaResult {
    double pillai_v = 0.0;
    double f_stat = 0.0;
    double df1 = 0.0;
    double df2 = 0.0;
    double p_value = 1.0;
    std::size_t groups = 0;
    std::size_t variables = 0;
    std::size_t observations = 0;
};

/// One-way MANOVA with Pillai's trace. Each group is an observations x
/// variables matrix. Throws DomainError with fewer than two groups, too few
/// observations, or a singular H + E.
ManovaResult manova_pillai(const std::vector<Eigen::MatrixXd>& groups);

}  // namespace reliance::stats
