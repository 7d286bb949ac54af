#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace qmp {

enum class WilcoxonMethod { Auto, Exact, Normal };

struct WilcoxonResult {
    double p_value = 1.0;
    /// Sum of ranks of the positive differences a_i - b_i.
    double statistic = 0.0;
    /// Pairs left after dropping zero differences.
    std::size_t n_used = 0;
    /// Every difference was zero; p is reported as 1.
    bool degenerate = false;
    WilcoxonMethod method = WilcoxonMethod::Exact;
};

/// Largest N (after zero-dropping) for which Auto uses the exact null distribution.
inline constexpr std::size_t kWilcoxonExactLimit = 25;

/// Two-sided Wilcoxon signed-rank test on paired samples.
///
/// Zero differences are dropped and tied |differences| get mid-ranks. The
/// exact method counts, over all 2^N sign assignments, how many reach a rank
/// sum at least as extreme as the observed one: p = min(1, 2 min(P[W <= w],
/// P[W >= w])). The normal method uses the tie-corrected variance and a 0.5
/// continuity correction.
WilcoxonResult wilcoxon_signed_rank(std::span<const double> paired_a, std::span<const double> paired_b,
                                    WilcoxonMethod method = WilcoxonMethod::Auto);

/// Mid-ranks of |values| (1-based), doubled so ties stay integral.
std::vector<std::uint64_t> doubled_midranks(std::span<const double> abs_values);

struct ShapiroWilkResult {
    double w = 1.0;
    double p_value = 1.0;
    /// Zero range: W is undefined, p is reported as 0.
    bool degenerate = false;
};

/// Shapiro-Wilk W test for 3 <= N <= 5000.
///
/// Coefficients and the W-to-p transform follow Royston's 1995 approximation
/// (algorithm AS R94): polynomial corrections in 1/sqrt(N) for the two
/// extreme coefficients, Blom-type normal scores for the rest, and a
/// log-normal fit of 1 - W (with a gamma pre-transform for N <= 11). N = 3
/// uses the exact arcsine distribution.
ShapiroWilkResult shapiro_wilk(std::span<const double> sample);

}  // namespace qmp
