#include "qmp/pursuit.hpp"

#include <cmath>
#include <string>

#include "qmp/random.hpp"

namespace qmp {

namespace {

constexpr double kStagnationThreshold = 1e-15;

// Stream labels for keyed draws.
constexpr std::uint64_t kSweepStream = 0x5357454550ULL;
constexpr std::uint64_t kFailureStream = 0x4641494CULL;
constexpr std::uint64_t kFailureIndexStream = 0x46494458ULL;

std::optional<Termination> check_stop(const StoppingRule &stopping, std::size_t support,
                                      double norm_sq, std::size_t iterations, std::size_t cap) {
    if (support > stopping.max_support) {
        return Termination::SupportExceeded;
    }
    if (std::sqrt(norm_sq) <= stopping.residual_tolerance) {
        return Termination::ResidualBelowEps;
    }
    if (iterations >= cap) {
        return Termination::IterationCap;
    }
    return std::nullopt;
}

void check_shapes(const Dictionary &dict, const Signal &signal) {
    if (dict.n() != signal.size()) {
        throw DimensionError("pursuit: dictionary has n = " + std::to_string(dict.n()) +
                             " but signal has length " + std::to_string(signal.size()));
    }
}

}  // namespace

std::string_view to_string(Variant v) {
    return v == Variant::SingleError ? "single" : "double";
}

std::string_view to_string(Termination t) {
    switch (t) {
        case Termination::SupportExceeded:
            return "SupportExceeded";
        case Termination::ResidualBelowEps:
            return "ResidualBelowEps";
        case Termination::IterationCap:
            return "IterationCap";
        case Termination::StagnationGuard:
            return "StagnationGuard";
    }
    return "?";
}

Variant parse_variant(std::string_view text) {
    if (text == "single") {
        return Variant::SingleError;
    }
    if (text == "double") {
        return Variant::DoubleError;
    }
    throw ValueError("unknown variant: " + std::string(text));
}

Termination parse_termination(std::string_view text) {
    for (auto t : {Termination::SupportExceeded, Termination::ResidualBelowEps,
                   Termination::IterationCap, Termination::StagnationGuard}) {
        if (to_string(t) == text) {
            return t;
        }
    }
    throw ValueError("unknown termination reason: " + std::string(text));
}

double QmpConfig::per_subroutine_failure() const {
    return delta / (3.0 * static_cast<double>(effective_k_max()));
}

double QmpConfig::per_iteration_failure_rate() const {
    return 3.0 * per_subroutine_failure();
}

void QmpConfig::validate() const {
    if (!(xi >= 0.0) || !std::isfinite(xi)) {
        throw ValueError("QmpConfig: xi must be a finite value >= 0");
    }
    if (!(delta > 0.0 && delta < 1.0)) {
        throw ValueError("QmpConfig: delta must lie in (0, 1)");
    }
    stopping.validate();
    if (effective_k_max() < 1) {
        throw ValueError("QmpConfig: k_max must be >= 1");
    }
}

PursuitTrace classical_mp(const Dictionary &dict, const Signal &signal, const StoppingRule &stopping,
                          CostLedger *ledger, const IterationObserver &observer) {
    check_shapes(dict, signal);
    stopping.validate();
    const std::size_t n = dict.n();
    const std::size_t m = dict.m();
    const std::size_t cap = stopping.iteration_cap();

    std::vector<double> residual(signal.values().begin(), signal.values().end());
    double norm_sq = norm_squared(residual);
    PursuitTrace trace{{}, SparseSolution(m), Termination::ResidualBelowEps};
    std::vector<double> sweep(m);
    if (ledger) {
        ledger->params = {n, m, 0.0, 0.0, cap};
        charge_classical_init(*ledger, n);
    }

    while (true) {
        if (auto stop = check_stop(stopping, trace.solution.support_size(), norm_sq,
                                   trace.iterations.size(), cap)) {
            trace.termination = *stop;
            break;
        }
        for (std::size_t j = 0; j < m; ++j) {
            sweep[j] = inner_product(dict.atom(j), residual);
        }
        auto [best, z] = select_max_abs(sweep);
        if (std::abs(z) < kStagnationThreshold) {
            trace.termination = Termination::StagnationGuard;
            break;
        }
        trace.solution.add(best, z);
        auto atom = dict.atom(best);
        for (std::size_t i = 0; i < n; ++i) {
            residual[i] -= z * atom[i];
        }
        norm_sq = norm_squared(residual);
        if (ledger) {
            charge_classical_iteration(*ledger, n, m);
        }
        trace.iterations.push_back({best, z, z, norm_sq, false});
        if (observer) {
            observer({trace.iterations.size() - 1, trace.iterations.back(), sweep, residual,
                      trace.solution});
        }
    }
    return trace;
}

double sweep_error(std::uint64_t seed, std::size_t iteration, std::size_t j, double bound) {
    if (bound == 0.0) {
        return 0.0;
    }
    double u = unit_interval(derive_seed(seed, {kSweepStream, iteration, j}));
    return bound * (2.0 * u - 1.0);
}

std::vector<double> noisy_sweep(const Dictionary &dict, const SampleTree &tree, const QmpConfig &cfg,
                                std::size_t iteration) {
    if (tree.size() != dict.n()) {
        throw DimensionError("noisy_sweep: tree size does not match dictionary");
    }
    double scale = cfg.scale_error_by_residual_norm ? std::sqrt(tree.norm_squared()) : 1.0;
    double bound = cfg.xi * scale;
    auto residual = tree.values();
    std::vector<double> estimates(dict.m());
    for (std::size_t j = 0; j < dict.m(); ++j) {
        estimates[j] = inner_product(dict.atom(j), residual) + sweep_error(cfg.seed, iteration, j, bound);
    }
    return estimates;
}

std::pair<std::size_t, double> select_max_abs(std::span<const double> estimates,
                                              std::optional<std::size_t> failure) {
    if (estimates.empty()) {
        throw DimensionError("select_max_abs: empty input");
    }
    if (failure) {
        if (*failure >= estimates.size()) {
            throw DimensionError("select_max_abs: failure index out of range");
        }
        return {*failure, estimates[*failure]};
    }
    std::size_t best = 0;
    double best_abs = std::abs(estimates[0]);
    for (std::size_t j = 1; j < estimates.size(); ++j) {
        double a = std::abs(estimates[j]);
        if (a > best_abs) {
            best = j;
            best_abs = a;
        }
    }
    return {best, estimates[best]};
}

std::optional<std::size_t> draw_failure(const QmpConfig &cfg, std::size_t iteration, std::size_t m) {
    if (!cfg.inject_failures) {
        return std::nullopt;
    }
    double u = unit_interval(derive_seed(cfg.seed, {kFailureStream, iteration}));
    if (u >= cfg.per_iteration_failure_rate()) {
        return std::nullopt;
    }
    double v = unit_interval(derive_seed(cfg.seed, {kFailureIndexStream, iteration}));
    auto index = static_cast<std::size_t>(v * static_cast<double>(m));
    return std::min(index, m - 1);
}

PursuitTrace quantum_mp(const Dictionary &dict, const Signal &signal, const QmpConfig &cfg,
                        CostLedger *ledger, const IterationObserver &observer) {
    check_shapes(dict, signal);
    cfg.validate();
    const std::size_t n = dict.n();
    const std::size_t m = dict.m();
    const std::size_t cap = cfg.effective_k_max();
    if (ledger && cfg.xi == 0.0) {
        throw ValueError("quantum_mp: the cost model is undefined for xi = 0");
    }

    SampleTree tree(signal.values());
    PursuitTrace trace{{}, SparseSolution(m), Termination::ResidualBelowEps};
    if (ledger) {
        ledger->params = {n, m, cfg.xi, cfg.delta, cap};
        charge_quantum_init(*ledger, n);
    }

    while (true) {
        const std::size_t iteration = trace.iterations.size();
        if (auto stop = check_stop(cfg.stopping, trace.solution.support_size(), tree.norm_squared(),
                                   iteration, cap)) {
            trace.termination = *stop;
            break;
        }
        std::vector<double> estimates = noisy_sweep(dict, tree, cfg, iteration);
        std::optional<std::size_t> failure = draw_failure(cfg, iteration, m);
        auto [best, estimate] = select_max_abs(estimates, failure);
        auto atom = dict.atom(best);
        double exact = inner_product(atom, tree.values());
        double z = cfg.variant == Variant::SingleError ? exact : estimate;
        if (std::abs(z) < kStagnationThreshold) {
            trace.termination = Termination::StagnationGuard;
            break;
        }
        trace.solution.add(best, z);
        tree.axpy_update(z, atom);
        if (ledger) {
            charge_quantum_iteration(*ledger, dict.atom_support(best), n, m, cfg.xi, cfg.delta, cap);
        }
        trace.iterations.push_back({best, z, exact, tree.norm_squared(), failure.has_value()});
        if (observer) {
            observer({iteration, trace.iterations.back(), estimates, tree.values(), trace.solution});
        }
    }
    return trace;
}

}  // namespace qmp
