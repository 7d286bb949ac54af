#include "qmp/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <boost/math/distributions/normal.hpp>

#include "qmp/core.hpp"

namespace qmp {

namespace {

void require_finite(std::span<const double> v, const char *what) {
    for (double x : v) {
        if (!std::isfinite(x)) {
            throw ValueError(std::string(what) + ": non-finite value");
        }
    }
}

double normal_quantile(double p) {
    static const boost::math::normal_distribution<double> standard;
    return boost::math::quantile(standard, p);
}

double normal_upper_tail(double x, double mean, double sd) {
    boost::math::normal_distribution<double> dist(mean, sd);
    return boost::math::cdf(boost::math::complement(dist, x));
}

// c[0] + c[1] x + ... + c[k-1] x^(k-1)
double poly(std::span<const double> c, double x) {
    double result = 0.0;
    for (std::size_t i = c.size(); i-- > 0;) {
        result = result * x + c[i];
    }
    return result;
}

}  // namespace

std::vector<std::uint64_t> doubled_midranks(std::span<const double> abs_values) {
    const std::size_t n = abs_values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return abs_values[a] < abs_values[b]; });
    std::vector<std::uint64_t> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && abs_values[order[j + 1]] == abs_values[order[i]]) {
            ++j;
        }
        // 1-based positions i+1..j+1 share rank (i+j+2)/2.
        std::uint64_t doubled = i + j + 2;
        for (std::size_t t = i; t <= j; ++t) {
            ranks[order[t]] = doubled;
        }
        i = j + 1;
    }
    return ranks;
}

WilcoxonResult wilcoxon_signed_rank(std::span<const double> paired_a, std::span<const double> paired_b,
                                    WilcoxonMethod method) {
    if (paired_a.size() != paired_b.size()) {
        throw DimensionError("wilcoxon_signed_rank: samples must be paired");
    }
    if (paired_a.empty()) {
        throw DimensionError("wilcoxon_signed_rank: empty samples");
    }
    require_finite(paired_a, "wilcoxon_signed_rank");
    require_finite(paired_b, "wilcoxon_signed_rank");
    std::vector<double> abs_diff;
    std::vector<bool> positive;
    for (std::size_t i = 0; i < paired_a.size(); ++i) {
        double d = paired_a[i] - paired_b[i];
        if (d != 0.0) {
            abs_diff.push_back(std::abs(d));
            positive.push_back(d > 0.0);
        }
    }
    WilcoxonResult result;
    result.n_used = abs_diff.size();
    if (abs_diff.empty()) {
        result.degenerate = true;
        return result;
    }
    const std::size_t n = abs_diff.size();
    auto ranks = doubled_midranks(abs_diff);
    std::uint64_t w2 = 0;
    std::uint64_t total2 = 0;
    for (std::size_t i = 0; i < n; ++i) {
        total2 += ranks[i];
        if (positive[i]) {
            w2 += ranks[i];
        }
    }
    result.statistic = static_cast<double>(w2) / 2.0;

    if (method == WilcoxonMethod::Auto) {
        method = n <= kWilcoxonExactLimit ? WilcoxonMethod::Exact : WilcoxonMethod::Normal;
    }
    result.method = method;

    if (method == WilcoxonMethod::Exact) {
        if (n > 62) {
            throw DimensionError("wilcoxon_signed_rank: exact method limited to 62 pairs");
        }
        // counts[s] = number of sign assignments whose doubled positive-rank sum is s
        std::vector<std::uint64_t> counts(total2 + 1, 0);
        counts[0] = 1;
        std::uint64_t reach = 0;
        for (std::uint64_t r : ranks) {
            for (std::uint64_t s = reach + 1; s-- > 0;) {
                if (counts[s] != 0) {
                    counts[s + r] += counts[s];
                }
            }
            reach += r;
        }
        std::uint64_t at_most = 0;
        std::uint64_t at_least = 0;
        for (std::uint64_t s = 0; s <= total2; ++s) {
            if (s <= w2) {
                at_most += counts[s];
            }
            if (s >= w2) {
                at_least += counts[s];
            }
        }
        double denom = std::ldexp(1.0, static_cast<int>(n));
        double tail = static_cast<double>(std::min(at_most, at_least));
        result.p_value = std::min(1.0, 2.0 * tail / denom);
        return result;
    }

    const double nn = static_cast<double>(n);
    double mean = nn * (nn + 1.0) / 4.0;
    double var = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0;
    std::vector<std::uint64_t> sorted = ranks;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j < n && sorted[j] == sorted[i]) {
            ++j;
        }
        double t = static_cast<double>(j - i);
        var -= (t * t * t - t) / 48.0;
        i = j;
    }
    double d = result.statistic - mean;
    if (d > 0.0) {
        d = std::max(0.0, d - 0.5);
    } else if (d < 0.0) {
        d = std::min(0.0, d + 0.5);
    }
    if (var <= 0.0) {
        result.p_value = 1.0;
        return result;
    }
    double z = std::abs(d) / std::sqrt(var);
    result.p_value = std::min(1.0, std::erfc(z / std::sqrt(2.0)));
    return result;
}

ShapiroWilkResult shapiro_wilk(std::span<const double> sample) {
    const std::size_t n = sample.size();
    if (n < 3 || n > 5000) {
        throw DimensionError("shapiro_wilk: sample size must lie in [3, 5000]");
    }
    require_finite(sample, "shapiro_wilk");
    std::vector<double> x(sample.begin(), sample.end());
    std::sort(x.begin(), x.end());
    ShapiroWilkResult result;
    double range = x.back() - x.front();
    if (!(range > 1e-19)) {
        result.degenerate = true;
        result.p_value = 0.0;
        return result;
    }

    static constexpr double c1[] = {0.0, 0.221157, -0.147981, -2.07119, 4.434685, -2.706056};
    static constexpr double c2[] = {0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633};
    static constexpr double c3[] = {0.544, -0.39978, 0.025054, -6.714e-4};
    static constexpr double c4[] = {1.3822, -0.77857, 0.062767, -0.0020322};
    static constexpr double c5[] = {-1.5861, -0.31082, -0.083751, 0.0038915};
    static constexpr double c6[] = {-0.4803, -0.082676, 0.0030302};
    static constexpr double g[] = {-2.273, 0.459};

    const std::size_t half = n / 2;
    const double an = static_cast<double>(n);
    // a[i] for i = 0..half-1 weights the gap x[n-1-i] - x[i].
    std::vector<double> a(half);
    if (n == 3) {
        a[0] = std::sqrt(0.5);
    } else {
        std::vector<double> scores(half);
        double sum_sq = 0.0;
        for (std::size_t i = 0; i < half; ++i) {
            scores[i] = normal_quantile((static_cast<double>(i + 1) - 0.375) / (an + 0.25));
            sum_sq += scores[i] * scores[i];
        }
        sum_sq *= 2.0;
        double root_sum_sq = std::sqrt(sum_sq);
        double rsn = 1.0 / std::sqrt(an);
        double a1 = poly(c1, rsn) - scores[0] / root_sum_sq;
        std::size_t first_scaled;
        double fac;
        if (n > 5) {
            first_scaled = 2;
            double a2 = -scores[1] / root_sum_sq + poly(c2, rsn);
            fac = std::sqrt((sum_sq - 2.0 * scores[0] * scores[0] - 2.0 * scores[1] * scores[1]) /
                            (1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2));
            a[1] = a2;
        } else {
            first_scaled = 1;
            fac = std::sqrt((sum_sq - 2.0 * scores[0] * scores[0]) / (1.0 - 2.0 * a1 * a1));
        }
        a[0] = a1;
        for (std::size_t i = first_scaled; i < half; ++i) {
            a[i] = -scores[i] / fac;
        }
    }

    double mean = std::accumulate(x.begin(), x.end(), 0.0) / an;
    double ssq = 0.0;
    for (double v : x) {
        ssq += (v - mean) * (v - mean);
    }
    double numer = 0.0;
    for (std::size_t i = 0; i < half; ++i) {
        numer += a[i] * (x[n - 1 - i] - x[i]);
    }
    double w = std::min(1.0, numer * numer / ssq);
    result.w = w;

    if (n == 3) {
        constexpr double six_over_pi = 1.90985931710274;
        constexpr double pi_over_three = 1.04719755119660;
        result.p_value = std::clamp(six_over_pi * (std::asin(std::sqrt(w)) - pi_over_three), 0.0, 1.0);
        return result;
    }
    if (w >= 1.0) {
        result.p_value = 1.0;
        return result;
    }
    double w1 = std::log(1.0 - w);
    double y;
    double mu;
    double sigma;
    if (n <= 11) {
        double gamma = poly(g, an);
        if (w1 >= gamma) {
            result.p_value = 1e-99;
            return result;
        }
        y = -std::log(gamma - w1);
        mu = poly(c3, an);
        sigma = std::exp(poly(c4, an));
    } else {
        double log_n = std::log(an);
        y = w1;
        mu = poly(c5, log_n);
        sigma = std::exp(poly(c6, log_n));
    }
    result.p_value = std::clamp(normal_upper_tail(y, mu, sigma), 0.0, 1.0);
    return result;
}

}  // namespace qmp
