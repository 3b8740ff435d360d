#include "reliance/stats/ols.hpp"

#include <cmath>
#include <limits>

#include "reliance/error.hpp"
#include "reliance/stats/special.hpp"

namespace reliance::stats {

OlsResult ols_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const std::vector<std::string>& names) {
    const auto n = X.rows(), k = X.cols();
    if (y.size() != n) throw DomainError("ols: X and y differ in row count");
    if (static_cast<Eigen::Index>(names.size()) != k) throw DomainError("ols: one name per column required");
    if (n <= k) throw DomainError("ols: need more observations than coefficients");

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    if (qr.rank() < k) {
        for (Eigen::Index c = 1; c <= k; ++c) {
            Eigen::ColPivHouseholderQR<Eigen::MatrixXd> partial(X.leftCols(c));
            if (partial.rank() < c) throw DomainError("ols: design matrix is rank deficient at column '" + names[c - 1] + "'");
        }
        throw DomainError("ols: design matrix is rank deficient");
    }

    OlsResult res;
    res.n = static_cast<std::size_t>(n);
    const Eigen::VectorXd beta = qr.solve(y);
    res.residuals = y - X * beta;
    const double rss = res.residuals.squaredNorm();
    const double ybar = y.mean();
    const double tss = (y.array() - ybar).square().sum();
    res.df_resid = static_cast<double>(n - k);
    res.df_model = static_cast<double>(k - 1);
    const double sigma2 = rss / res.df_resid;

    // (X'X)^-1 = R^-1 R^-T, permuted back.
    const Eigen::MatrixXd R = qr.matrixR().topLeftCorner(k, k).triangularView<Eigen::Upper>();
    const Eigen::MatrixXd Rinv = R.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(k, k));
    const Eigen::MatrixXd cov_perm = Rinv * Rinv.transpose();
    const auto& perm = qr.colsPermutation();
    const Eigen::MatrixXd cov = perm * cov_perm * perm.transpose();

    const double tcrit = t_quantile(0.975, res.df_resid);
    for (Eigen::Index j = 0; j < k; ++j) {
        OlsCoefficient c;
        c.name = names[j];
        c.estimate = beta(j);
        c.std_error = std::sqrt(std::max(0.0, sigma2 * cov(j, j)));
        if (c.std_error > 0.0) {
            c.t_stat = c.estimate / c.std_error;
            c.p_value = t_two_sided_p(c.t_stat, res.df_resid);
        } else {
            c.t_stat = c.estimate == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), c.estimate);
            c.p_value = c.estimate == 0.0 ? 1.0 : 0.0;
        }
        c.ci_low = c.estimate - tcrit * c.std_error;
        c.ci_high = c.estimate + tcrit * c.std_error;
        res.coefficients.push_back(c);
    }

    res.r2 = tss > 0.0 ? 1.0 - rss / tss : 1.0;
    res.adj_r2 = 1.0 - (1.0 - res.r2) * static_cast<double>(n - 1) / res.df_resid;
    if (k > 1) {
        if (rss <= 0.0) {
            res.f_stat = std::numeric_limits<double>::infinity();
            res.model_p = 0.0;
        } else {
            res.f_stat = ((tss - rss) / res.df_model) / (rss / res.df_resid);
            res.model_p = f_sf(res.f_stat, res.df_model, res.df_resid);
        }
    }
    return res;
}

}  // namespace reliance::stats
