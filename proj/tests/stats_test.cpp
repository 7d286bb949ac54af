#include "qmp/stats.hpp"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "qmp/core.hpp"

using namespace qmp;

namespace {

struct ShapiroCase {
    std::vector<double> sample;
    double w;
    double p;
};

// Reference values from scipy.stats.shapiro (same AS R94 approximation).
const std::vector<ShapiroCase> &shapiro_cases() {
    static const std::vector<ShapiroCase> cases = {
        {{-12.6919, 12.9364, -8.5223}, 0.8682821080434744, 0.29065926828145994},
        {{-13.6779, 6.4889, 3.6106, -19.5286}, 0.8790610746009885, 0.33464122677723757},
        {{-4.6162, -0.6042, 7.9089, -12.37, 6.2619}, 0.9460600041425848, 0.7090340137462244},
        {{-0.4931, 8.5425, -11.5323, 2.3695, 21.2606, 26.9963, 11.8958}, 0.9847487618943176,
         0.9793121104359522},
        {{-11.0448, 2.6882, 3.1306, -0.1347, 12.7272, -0.7886, -0.233, -11.0652, 1.4113, 14.0044, 1.1519},
         0.8912610538422983, 0.1441990012846731},
        {{-0.7127, 4.7405, -4.1485, 0.9772, -16.4042, -8.5726, 6.8828, -11.5453, 6.5045, -13.8836, -9.0738,
          -10.9543},
         0.9257929253078075, 0.3376422747168225},
        {{-5.7103, 0.0079, -10.6364, 13.0171, 7.4787, 9.8088, -1.1042, 4.6792, 8.9061, 10.2301,
          3.1238, -0.619, -3.5948, -7.4864, -9.6548, 3.6003, -2.4455, -19.9586, -1.5525, 10.6383},
         0.9611000630651109, 0.5660540222232593},
        {{0.5837, 0.3629, 1.3876, 2.7003, 0.5181, 1.1914, 0.6815, 0.4064, 0.3479, 0.1426,
          2.8387, 0.2625, 0.3636, 0.1941, 0.3264, 0.3661, 4.5247, 0.947,  1.5211, 0.0585,
          0.3509, 0.918,  1.2877, 0.2425, 1.2185, 0.9212, 0.416,  1.8782, 0.0687, 0.2234},
         0.7497184013601108, 9.011590893712597e-06},
        {{0.069, 0.252, 0.0952, 0.1131, 0.2806, 0.5925, 0.3432, 0.7778}, 0.8830326781168665,
         0.20127939383523852},
    };
    return cases;
}

const std::vector<double> kA30 = {1.83, 0.50, 1.62, 2.48, 1.68, 1.88, 1.55, 3.06, 1.30, 2.01,
                                  3.11, 1.92, 2.42, 0.71, 1.05, 1.36, 0.9,  1.2,  2.2,  1.7,
                                  0.3,  2.9,  1.1,  0.8,  1.5,  2.6,  0.4,  1.9,  2.05, 0.95};
const std::vector<double> kB30 = {0.878, 0.647, 0.598, 2.05, 1.06, 1.29, 1.06, 3.14, 1.29, 1.9,
                                  2.4,   1.1,   2.1,   0.9,  1.2,  1.1,  1.0,  1.5,  1.8,  1.1,
                                  0.7,   2.1,   1.4,   0.5,  1.7,  2.0,  0.9,  1.4,  1.7,  1.3};

}  // namespace

TEST(Wilcoxon, scipy_references) {
    auto normal = wilcoxon_signed_rank(kA30, kB30);
    EXPECT_EQ(normal.method, WilcoxonMethod::Normal);
    EXPECT_NEAR(normal.p_value, 0.008466259105361288, 1e-10);

    std::span<const double> a12(kA30.data(), 12), b12(kB30.data(), 12);
    auto exact = wilcoxon_signed_rank(a12, b12);
    EXPECT_EQ(exact.method, WilcoxonMethod::Exact);
    EXPECT_DOUBLE_EQ(exact.p_value, 0.0068359375);

    std::vector<double> x{1, 2, 3, 4, 5, 6}, y{2, 3, 4, 5, 6, 7};
    auto shifted = wilcoxon_signed_rank(x, y);
    EXPECT_DOUBLE_EQ(shifted.p_value, 0.03125);
    EXPECT_EQ(shifted.statistic, 0.0);
}

TEST(Wilcoxon, all_zero_differences_are_degenerate) {
    std::vector<double> a{0.5, 0.7, 0.9};
    auto r = wilcoxon_signed_rank(a, a);
    EXPECT_TRUE(r.degenerate);
    EXPECT_EQ(r.p_value, 1.0);
    EXPECT_EQ(r.n_used, 0u);
}

TEST(Wilcoxon, rejects_bad_input) {
    std::vector<double> a{1, 2}, b{1};
    EXPECT_THROW(wilcoxon_signed_rank(a, b), DimensionError);
    std::vector<double> c{1, NAN};
    EXPECT_THROW(wilcoxon_signed_rank(a, c), ValueError);
}

TEST(Wilcoxon, doubled_midranks_examples) {
    std::vector<double> v{3, 1, 3, 2};
    EXPECT_EQ(doubled_midranks(v), (std::vector<std::uint64_t>{7, 2, 7, 4}));
}

TEST(Wilcoxon, exact_matches_enumeration) {
    std::mt19937_64 rng(1);
    std::uniform_int_distribution<int> small(-4, 4);
    for (int trial = 0; trial < 300; ++trial) {
        std::size_t n = 1 + rng() % 12;
        std::vector<double> a(n), b(n);
        for (std::size_t i = 0; i < n; ++i) {
            // coarse grid so ties and zero differences are common
            a[i] = small(rng) * 0.5;
            b[i] = small(rng) * 0.5;
        }
        auto r = wilcoxon_signed_rank(a, b, WilcoxonMethod::Exact);
        EXPECT_EQ(r.p_value, oracle::wilcoxon_enumerate_p(a, b)) << "trial " << trial;
    }
}

TEST(Wilcoxon, normal_close_to_exact_at_thirty) {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> normal;
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> a(30), b(30);
        for (std::size_t i = 0; i < 30; ++i) {
            a[i] = normal(rng) + 0.3;
            b[i] = normal(rng);
        }
        auto exact = wilcoxon_signed_rank(a, b, WilcoxonMethod::Exact);
        auto approx = wilcoxon_signed_rank(a, b, WilcoxonMethod::Normal);
        EXPECT_NEAR(exact.p_value, approx.p_value, 0.02);
    }
}

TEST(Wilcoxon, p_value_monotone_in_statistic) {
    // Fix |d| = 1..10 and flip signs to sweep W+ from 0 up to its midpoint.
    std::vector<double> p_by_w(28, -1.0);
    for (unsigned mask = 0; mask < 1024; ++mask) {
        std::vector<double> a(10), b(10, 0.0);
        int w = 0;
        for (int i = 0; i < 10; ++i) {
            bool pos = mask >> i & 1;
            a[i] = pos ? i + 1 : -(i + 1);
            w += pos ? i + 1 : 0;
        }
        if (w < 28 && p_by_w[w] < 0) {
            p_by_w[w] = wilcoxon_signed_rank(a, b).p_value;
        }
    }
    for (std::size_t w = 1; w < p_by_w.size(); ++w) {
        EXPECT_GE(p_by_w[w], p_by_w[w - 1]);
    }
}

TEST(ShapiroWilk, scipy_references) {
    for (const auto &c : shapiro_cases()) {
        auto r = shapiro_wilk(c.sample);
        EXPECT_NEAR(r.w, c.w, 1e-4) << "N = " << c.sample.size();
        EXPECT_NEAR(r.p_value, c.p, 1e-4 + 1e-3 * c.p) << "N = " << c.sample.size();
    }
}

TEST(ShapiroWilk, invariant_under_affine_maps) {
    const auto &c = shapiro_cases()[6];
    std::vector<double> scaled;
    for (double x : c.sample) scaled.push_back(3.5 * x - 7.0);
    auto a = shapiro_wilk(c.sample), b = shapiro_wilk(scaled);
    EXPECT_NEAR(a.w, b.w, 1e-12);
    EXPECT_NEAR(a.p_value, b.p_value, 1e-10);
}

TEST(ShapiroWilk, separates_normal_from_uniform) {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> uniform;
    std::vector<double> g(500), u(500);
    for (auto &x : g) x = normal(rng);
    for (auto &x : u) x = uniform(rng);
    EXPECT_GT(shapiro_wilk(g).p_value, 0.01);
    EXPECT_LT(shapiro_wilk(u).p_value, 0.01);
}

TEST(ShapiroWilk, degenerate_and_bad_sizes) {
    std::vector<double> constant(10, 2.5);
    auto r = shapiro_wilk(constant);
    EXPECT_TRUE(r.degenerate);
    EXPECT_EQ(r.p_value, 0.0);
    std::vector<double> two{1, 2};
    EXPECT_THROW(shapiro_wilk(two), DimensionError);
    std::vector<double> bad{1, 2, INFINITY};
    EXPECT_THROW(shapiro_wilk(bad), ValueError);
}

TEST(ShapiroWilk, w_in_unit_interval) {
    std::mt19937_64 rng(4);
    std::exponential_distribution<double> expo;
    for (int t = 0; t < 200; ++t) {
        std::vector<double> s(3 + rng() % 200);
        for (auto &x : s) x = expo(rng);
        auto r = shapiro_wilk(s);
        EXPECT_GT(r.w, 0.0);
        EXPECT_LE(r.w, 1.0);
        EXPECT_GE(r.p_value, 0.0);
        EXPECT_LE(r.p_value, 1.0);
    }
}
