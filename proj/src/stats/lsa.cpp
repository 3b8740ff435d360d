#include "reliance/stats/lsa.hpp"

#include <cmath>

#include "reliance/error.hpp"

namespace reliance::stats {

LsaResult lsa_from_counts(const Eigen::MatrixXd& observed, double threshold) {
    if (observed.rows() != observed.cols()) throw DomainError("lsa: transition matrix must be square");
    LsaResult res;
    res.observed = observed;
    res.total = observed.sum();
    if (res.total <= 0.0) throw DomainError("lsa: no transitions");
    const Eigen::VectorXd rows = observed.rowwise().sum();
    const Eigen::RowVectorXd cols = observed.colwise().sum();
    const auto k = observed.rows();
    res.expected = rows * cols / res.total;
    res.residuals = Eigen::MatrixXd::Zero(k, k);
    for (Eigen::Index i = 0; i < k; ++i)
        for (Eigen::Index j = 0; j < k; ++j) {
            const double e = res.expected(i, j);
            const double var = e * (1.0 - rows(i) / res.total) * (1.0 - cols(j) / res.total);
            const LsaCell cell{static_cast<std::size_t>(i), static_cast<std::size_t>(j)};
            if (e <= 0.0 || var <= 0.0) {
                res.degenerate.push_back(cell);
                continue;
            }
            res.residuals(i, j) = (observed(i, j) - e) / std::sqrt(var);
            if (std::fabs(res.residuals(i, j)) > threshold) res.flagged.push_back(cell);
        }
    return res;
}

LsaResult lsa_adjusted_residuals(const std::vector<std::vector<int>>& sequences, std::size_t states,
                                 double threshold) {
    const auto k = static_cast<Eigen::Index>(states);
    Eigen::MatrixXd observed = Eigen::MatrixXd::Zero(k, k);
    for (const auto& seq : sequences) {
        for (int s : seq)
            if (s < 0 || s >= k) throw DomainError("lsa: state out of range");
        for (std::size_t t = 1; t < seq.size(); ++t) observed(seq[t - 1], seq[t]) += 1.0;
    }
    return lsa_from_counts(observed, threshold);
}

}  // namespace reliance::stats
