#pragma once

#include <vector>

#include <Eigen/Dense>

namespace reliance::stats {

struct LsaCell {
    std::size_t from = 0;
    std::size_t to = 0;
};

struct LsaResult {
    Eigen::MatrixXd observed;   // O_ij, counts of state i followed by state j
    Eigen::MatrixXd expected;   // E_ij = row_i * col_j / N
    Eigen::MatrixXd residuals;  // adjusted residuals z_ij
    std::vector<LsaCell> degenerate;  // E_ij = 0 or zero variance; z set to 0
    std::vector<LsaCell> flagged;     // |z| > threshold
    double total = 0.0;               // N
};

/// Lag-1 sequential analysis over `states` categories. Each inner vector is
/// one sequence; transitions never cross sequences. Throws DomainError when
/// there is no transition or a state is out of range.
LsaResult lsa_adjusted_residuals(const std::vector<std::vector<int>>& sequences, std::size_t states,
                                 double threshold = 1.96);

/// Same statistics from an observed transition matrix.
LsaResult lsa_from_counts(const Eigen::MatrixXd& observed, double threshold = 1.96);

}  // namespace reliance::stats
