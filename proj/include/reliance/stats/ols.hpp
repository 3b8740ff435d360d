#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace reliance::stats {

struct OlsCoefficient {
    std::string name;
    double estimate = 0.0;
    double std_error = 0.0;
    double t_stat = 0.0;
    double p_value = 1.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
};

struct OlsResult {
    std::vector<OlsCoefficient> coefficients;
    double r2 = 0.0;
    double adj_r2 = 0.0;
    double f_stat = 0.0;
    double model_p = 1.0;
    double df_model = 0.0;
    double df_resid = 0.0;
    std::size_t n = 0;
    Eigen::VectorXd residuals;
};

/// Least squares fit of y on X. X must include the intercept column if one is
/// wanted (the R² and model F assume it does). Throws DomainError when rows <=
/// columns, and names the first column that makes X rank deficient.
OlsResult ols_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const std::vector<std::string>& names);

}  // namespace reliance::stats
