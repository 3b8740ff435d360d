#include "reliance/stats/special.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "reliance/error.hpp"

namespace reliance::stats {

namespace {

double beta_continued_fraction(double a, double b, double x) {
    constexpr double kTiny = 1e-300;
    constexpr double kEps = 1e-16;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 20000; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) return h;
    }
    throw DomainError("incomplete beta: continued fraction did not converge");
}

struct GaussLegendre {
    static constexpr int kPoints = 16;
    std::array<double, kPoints> node{}, weight{};

    GaussLegendre() {
        constexpr int n = kPoints;
        for (int i = 0; i < n; ++i) {
            double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
            double dp = 0.0;
            for (int iter = 0; iter < 100; ++iter) {
                double p0 = 1.0, p1 = x;
                for (int k = 2; k <= n; ++k) {
                    const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = pk;
                }
                dp = n * (x * p1 - p0) / (x * x - 1.0);
                const double step = p1 / dp;
                x -= step;
                if (std::fabs(step) < 1e-15) break;
            }
            node[i] = x;
            weight[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
    }

    template <typename F>
    double integrate(F&& f, double lo, double hi, int panels) const {
        const double width = (hi - lo) / panels;
        double total = 0.0;
        for (int p = 0; p < panels; ++p) {
            const double mid = lo + (p + 0.5) * width;
            double part = 0.0;
            for (int i = 0; i < kPoints; ++i) part += weight[i] * f(mid + 0.5 * width * node[i]);
            total += 0.5 * width * part;
        }
        return total;
    }
};

const GaussLegendre& gauss_legendre() {
    static const GaussLegendre rule;
    return rule;
}

double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI); }

// P(range of k standard normals <= w).
double range_cdf(double w, int k) {
    if (w <= 0.0) return 0.0;
    const auto integrand = [&](double z) {
        const double inside = normal_cdf(z + w) - normal_cdf(z);
        return normal_pdf(z) * std::pow(inside, k - 1);
    };
    const double value = k * gauss_legendre().integrate(integrand, -8.5, 8.5, 24);
    return std::min(1.0, std::max(0.0, value));
}

void require(bool ok, const char* what) {
    if (!ok) throw DomainError(what);
}

}  // namespace

double ibeta(double a, double b, double x) {
    require(a > 0 && b > 0, "incomplete beta: a and b must be positive");
    require(x >= 0.0 && x <= 1.0, "incomplete beta: x must lie in [0, 1]");
    if (x == 0.0 || x == 1.0) return x;
    const double log_front =
        std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(log_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
    return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double t_cdf(double t, double df) {
    require(df > 0, "t distribution: df must be positive");
    if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
    const double tail = 0.5 * ibeta(0.5 * df, 0.5, df / (df + t * t));
    return t > 0 ? 1.0 - tail : tail;
}

double t_two_sided_p(double t, double df) {
    require(df > 0, "t distribution: df must be positive");
    if (std::isinf(t)) return 0.0;
    return ibeta(0.5 * df, 0.5, df / (df + t * t));
}

double t_quantile(double p, double df) {
    require(p > 0.0 && p < 1.0, "t quantile: p must lie in (0, 1)");
    require(df > 0, "t quantile: df must be positive");
    double lo = -1.0, hi = 1.0;
    while (t_cdf(lo, df) > p) lo *= 2.0;
    while (t_cdf(hi, df) < p) hi *= 2.0;
    for (int i = 0; i < 200 && hi - lo > 1e-15 * std::max(1.0, std::fabs(hi)); ++i) {
        const double mid = 0.5 * (lo + hi);
        (t_cdf(mid, df) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double f_cdf(double f, double df1, double df2) {
    require(df1 > 0 && df2 > 0, "F distribution: degrees of freedom must be positive");
    if (f <= 0.0) return 0.0;
    if (std::isinf(f)) return 1.0;
    return ibeta(0.5 * df1, 0.5 * df2, df1 * f / (df1 * f + df2));
}

double f_sf(double f, double df1, double df2) {
    require(df1 > 0 && df2 > 0, "F distribution: degrees of freedom must be positive");
    if (f <= 0.0) return 1.0;
    if (std::isinf(f)) return 0.0;
    return ibeta(0.5 * df2, 0.5 * df1, df2 / (df2 + df1 * f));
}

double ptukey(double q, int k, double df) {
    require(k >= 2, "studentized range: need at least two groups");
    require(df > 0, "studentized range: df must be positive");
    if (q <= 0.0) return 0.0;
    if (std::isinf(q)) return 1.0;
    if (std::isinf(df) || df > 25000.0) return range_cdf(q, k);

    // s = chi_df / sqrt(df); integrate W(q s) against its density.
    const double log_norm =
        0.5 * df * std::log(df) - std::lgamma(0.5 * df) - (0.5 * df - 1.0) * std::log(2.0);
    const auto integrand = [&](double s) {
        if (s <= 0.0) return 0.0;
        const double log_density = log_norm + (df - 1.0) * std::log(s) - 0.5 * df * s * s;
        return std::exp(log_density) * range_cdf(q * s, k);
    };
    const double sd = 1.0 / std::sqrt(2.0 * df);
    const double lo = std::max(0.0, 1.0 - 14.0 * sd);
    const double hi = 1.0 + 14.0 * sd;
    const double value = gauss_legendre().integrate(integrand, lo, hi, 32);
    return std::min(1.0, std::max(0.0, value));
}

}  // namespace reliance::stats
