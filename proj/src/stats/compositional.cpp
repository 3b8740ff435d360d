#include "reliance/stats/compositional.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "reliance/error.hpp"
#include "reliance/stats/special.hpp"

namespace reliance::stats {

double default_replacement_delta(const Eigen::MatrixXd& compositions, double factor) {
    double smallest = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < compositions.size(); ++i) {
        const double v = compositions.data()[i];
        if (v > 0.0) smallest = std::min(smallest, v);
    }
    if (!std::isfinite(smallest)) throw DomainError("clr: no positive proportion in the data");
    return factor * smallest;
}

ClrMatrix clr_transform(const Eigen::MatrixXd& compositions, std::optional<double> delta) {
    ClrMatrix out;
    const auto rows = compositions.rows(), cols = compositions.cols();
    if (cols == 0) throw DomainError("clr: compositions have no parts");
    for (Eigen::Index r = 0; r < rows; ++r) {
        if ((compositions.row(r).array() < 0.0).any())
            throw DomainError("clr: negative proportion in row " + std::to_string(r));
        if ((compositions.row(r).array() == 0.0).all())
            throw DomainError("clr: row " + std::to_string(r) + " is all zeros");
        if (std::fabs(compositions.row(r).sum() - 1.0) > 1e-9)
            throw DomainError("clr: row " + std::to_string(r) + " does not sum to 1");
    }
    out.delta = delta ? *delta : (rows ? default_replacement_delta(compositions) : 0.0);
    if (out.delta <= 0.0 && (compositions.array() == 0.0).any())
        throw DomainError("clr: replacement delta must be positive");

    out.replaced = compositions;
    out.values.resize(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const auto zeros = (compositions.row(r).array() == 0.0).count();
        const double scale = 1.0 - static_cast<double>(zeros) * out.delta;
        if (zeros > 0 && scale <= 0.0)
            throw DomainError("clr: delta too large for row " + std::to_string(r));
        for (Eigen::Index c = 0; c < cols; ++c) {
            const double v = compositions(r, c);
            out.replaced(r, c) = v == 0.0 ? out.delta : (zeros ? v * scale : v);
        }
        const Eigen::ArrayXd logs = out.replaced.row(r).array().log().transpose();
        out.values.row(r) = (logs - logs.mean()).transpose();
    }
    return out;
}

ManovaResult manova_pillai(const std::vector<Eigen::MatrixXd>& groups) {
    if (groups.size() < 2) throw DomainError("manova: need at least two groups");
    const auto p = groups.front().cols();
    Eigen::Index n_total = 0;
    for (const auto& g : groups) {
        if (g.cols() != p) throw DomainError("manova: groups differ in variable count");
        if (g.rows() == 0) throw DomainError("manova: empty group");
        n_total += g.rows();
    }
    const auto g_count = static_cast<Eigen::Index>(groups.size());
    if (n_total <= p + g_count) throw DomainError("manova: too few observations for the number of variables");

    Eigen::RowVectorXd grand = Eigen::RowVectorXd::Zero(p);
    for (const auto& g : groups) grand += g.colwise().sum();
    grand /= static_cast<double>(n_total);

    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(p, p), E = Eigen::MatrixXd::Zero(p, p);
    for (const auto& g : groups) {
        const Eigen::RowVectorXd mean = g.colwise().mean();
        const Eigen::RowVectorXd diff = mean - grand;
        H += static_cast<double>(g.rows()) * diff.transpose() * diff;
        const Eigen::MatrixXd centered = g.rowwise() - mean;
        E += centered.transpose() * centered;
    }
    const Eigen::MatrixXd T = H + E;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(T);
    if (lu.rank() < p) throw DomainError("manova: H + E is singular");

    ManovaResult res;
    res.groups = groups.size();
    res.variables = static_cast<std::size_t>(p);
    res.observations = static_cast<std::size_t>(n_total);
    res.pillai_v = std::max(0.0, (H * lu.inverse()).trace());

    const double pd = static_cast<double>(p), gd = static_cast<double>(g_count), nd = static_cast<double>(n_total);
    const double s = std::min(pd, gd - 1.0);
    const double m = (std::fabs(pd - gd + 1.0) - 1.0) / 2.0;
    const double nn = (nd - gd - pd - 1.0) / 2.0;
    res.df1 = s * (2.0 * m + s + 1.0);
    res.df2 = s * (2.0 * nn + s + 1.0);
    const double ratio = res.pillai_v / s;
    if (ratio >= 1.0) {
        res.f_stat = std::numeric_limits<double>::infinity();
        res.p_value = 0.0;
    } else {
        res.f_stat = ((2.0 * nn + s + 1.0) / (2.0 * m + s + 1.0)) * ratio / (1.0 - ratio);
        res.p_value = f_sf(res.f_stat, res.df1, res.df2);
    }
    return res;
}

}  // namespace reliance::stats
