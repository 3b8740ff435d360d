#include "reliance/stats/somers.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <thread>
#include <vector>

#include "reliance/error.hpp"
#include "reliance/rng.hpp"
#include "reliance/stats/special.hpp"

namespace reliance::stats {

namespace {

using Table = std::vector<std::vector<std::int64_t>>;

// Dense ranks of the distinct values.
std::vector<int> dense_ranks(std::span<const int> v, int& levels) {
    std::vector<int> sorted(v.begin(), v.end());
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    levels = static_cast<int>(sorted.size());
    std::vector<int> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        out[i] = static_cast<int>(std::lower_bound(sorted.begin(), sorted.end(), v[i]) - sorted.begin());
    return out;
}

PairCounts counts_from_table(const Table& t) {
    const std::size_t r = t.size(), c = r ? t[0].size() : 0;
    PairCounts pc;
    std::vector<std::int64_t> row_tot(r, 0), col_tot(c, 0);
    std::int64_t n = 0, same_cell = 0;
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) {
            row_tot[i] += t[i][j];
            col_tot[j] += t[i][j];
            n += t[i][j];
            same_cell += t[i][j] * (t[i][j] - 1) / 2;
        }
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) {
            if (!t[i][j]) continue;
            std::int64_t conc = 0, disc = 0;
            for (std::size_t k = i + 1; k < r; ++k) {
                for (std::size_t l = j + 1; l < c; ++l) conc += t[k][l];
                for (std::size_t l = 0; l < j; ++l) disc += t[k][l];
            }
            pc.concordant += t[i][j] * conc;
            pc.discordant += t[i][j] * disc;
        }
    std::int64_t same_row = 0, same_col = 0;
    for (auto v : row_tot) same_row += v * (v - 1) / 2;
    for (auto v : col_tot) same_col += v * (v - 1) / 2;
    pc.ties_both = same_cell;
    pc.ties_x_only = same_row - same_cell;
    pc.ties_y_only = same_col - same_cell;
    return pc;
}

Table build_table(const std::vector<int>& rx, int rlevels, const std::vector<int>& ry, int clevels) {
    Table t(rlevels, std::vector<std::int64_t>(clevels, 0));
    for (std::size_t i = 0; i < rx.size(); ++i) ++t[rx[i]][ry[i]];
    return t;
}

double d_from(const PairCounts& pc) {
    return static_cast<double>(pc.concordant - pc.discordant) /
           static_cast<double>(pc.concordant + pc.discordant + pc.ties_y_only);
}

// Null standard error of d_yx with x as the row variable.
double ase0_of(const Table& t, std::int64_t n) {
    const std::size_t r = t.size(), c = t[0].size();
    double row_sq = 0.0;
    for (std::size_t i = 0; i < r; ++i) {
        double rt = 0.0;
        for (std::size_t j = 0; j < c; ++j) rt += static_cast<double>(t[i][j]);
        row_sq += rt * rt;
    }
    const double nn = static_cast<double>(n);
    const double w = nn * nn - row_sq;
    double sum_d2 = 0.0, p_minus_q = 0.0;
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) {
            if (!t[i][j]) continue;
            double a = 0.0, d = 0.0;
            for (std::size_t k = 0; k < r; ++k)
                for (std::size_t l = 0; l < c; ++l) {
                    if ((k > i && l > j) || (k < i && l < j)) a += static_cast<double>(t[k][l]);
                    if ((k > i && l < j) || (k < i && l > j)) d += static_cast<double>(t[k][l]);
                }
            const double nij = static_cast<double>(t[i][j]);
            sum_d2 += nij * (a - d) * (a - d);
            p_minus_q += nij * (a - d);
        }
    const double inner = sum_d2 - p_minus_q * p_minus_q / nn;
    return 2.0 / w * std::sqrt(std::max(0.0, inner));
}

}  // namespace

PairCounts count_pairs_exhaustive(std::span<const int> x, std::span<const int> y) {
    if (x.size() != y.size()) throw DomainError("somers_d: x and y differ in length");
    PairCounts pc;
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = i + 1; j < x.size(); ++j) {
            const int dx = (x[i] > x[j]) - (x[i] < x[j]);
            const int dy = (y[i] > y[j]) - (y[i] < y[j]);
            if (dx == 0 && dy == 0) ++pc.ties_both;
            else if (dx == 0) ++pc.ties_x_only;
            else if (dy == 0) ++pc.ties_y_only;
            else if (dx == dy) ++pc.concordant;
            else ++pc.discordant;
        }
    return pc;
}

PairCounts count_pairs_table(std::span<const int> x, std::span<const int> y) {
    if (x.size() != y.size()) throw DomainError("somers_d: x and y differ in length");
    if (x.empty()) return {};
    int rl = 0, cl = 0;
    const auto rx = dense_ranks(x, rl);
    const auto ry = dense_ranks(y, cl);
    return counts_from_table(build_table(rx, rl, ry, cl));
}

SomersResult somers_d(std::span<const int> x, std::span<const int> y, const SomersOptions& opts) {
    if (x.size() != y.size()) throw DomainError("somers_d: x and y differ in length");
    if (x.size() < 2) throw DomainError("somers_d: need at least two observations");

    SomersResult res;
    res.n = x.size();
    res.seed = opts.seed;
    res.permutations = opts.permutations;
    res.counts = x.size() <= opts.exhaustive_limit ? count_pairs_exhaustive(x, y) : count_pairs_table(x, y);
    const auto& pc = res.counts;
    if (pc.concordant + pc.discordant + pc.ties_y_only == 0)
        throw DomainError("somers_d: every x value is identical, D is undefined");
    res.d_yx = d_from(pc);
    if (pc.concordant + pc.discordant + pc.ties_x_only > 0)
        res.d_xy = static_cast<double>(pc.concordant - pc.discordant) /
                   static_cast<double>(pc.concordant + pc.discordant + pc.ties_x_only);

    int rl = 0, cl = 0;
    const auto rx = dense_ranks(x, rl);
    const auto ry = dense_ranks(y, cl);
    const auto table = build_table(rx, rl, ry, cl);
    res.ase0 = ase0_of(table, static_cast<std::int64_t>(x.size()));
    if (res.ase0 > 0.0) res.p_asymptotic = 2.0 * (1.0 - normal_cdf(std::fabs(res.d_yx) / res.ase0));
    else res.p_asymptotic = res.d_yx == 0.0 ? 1.0 : 0.0;

    if (opts.permutations == 0) return res;

    const double observed = std::fabs(res.d_yx);
    const std::size_t B = opts.permutations;
    const unsigned workers = std::max(1u, std::min<unsigned>(opts.threads, static_cast<unsigned>(B)));
    std::vector<std::size_t> hits(workers, 0);
    auto run = [&](unsigned w) {
        std::vector<int> shuffled(ry);
        for (std::size_t b = w; b < B; b += workers) {
            std::mt19937_64 rng(derive_seed(opts.seed, b));
            std::copy(ry.begin(), ry.end(), shuffled.begin());
            fisher_yates(shuffled, rng);
            const double d = std::fabs(d_from(counts_from_table(build_table(rx, rl, shuffled, cl))));
            if (d >= observed - 1e-12) ++hits[w];
        }
    };
    if (workers == 1) {
        run(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run, w);
        for (auto& t : pool) t.join();
    }
    std::size_t total = 0;
    for (auto h : hits) total += h;
    res.p_permutation = static_cast<double>(total + 1) / static_cast<double>(B + 1);
    return res;
}

}  // namespace reliance::stats
