#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "qmp/core.hpp"
#include "qmp/cost_model.hpp"
#include "qmp/sample_tree.hpp"

namespace qmp {

enum class Variant {
    /// Noise only affects which atom is picked; the coefficient is recomputed exactly.
    SingleError,
    /// Noise affects both the picked atom and the coefficient applied.
    DoubleError,
};

enum class Termination { SupportExceeded, ResidualBelowEps, IterationCap, StagnationGuard };

std::string_view to_string(Variant v);
std::string_view to_string(Termination t);
Variant parse_variant(std::string_view text);
Termination parse_termination(std::string_view text);

/// Parameters of the simulated quantum pursuit.
struct QmpConfig {
    /// Inner-product precision. Zero turns the estimator into an exact oracle.
    double xi = 0.01;
    /// Total failure budget, in (0, 1).
    double delta = 0.01;
    Variant variant = Variant::DoubleError;
    /// When set, the error bound is xi * ||r||_2 instead of xi.
    bool scale_error_by_residual_norm = false;
    bool inject_failures = false;
    StoppingRule stopping;
    std::uint64_t seed = 0;
    /// Iteration cap, also the k in delta' = delta / (3k). 0 means stopping.iteration_cap().
    std::size_t k_max = 0;

    std::size_t effective_k_max() const { return k_max == 0 ? stopping.iteration_cap() : k_max; }
    /// delta' = delta / (3 k_max).
    double per_subroutine_failure() const;
    /// 3 delta': probability that one iteration's estimation or search fails.
    double per_iteration_failure_rate() const;
    void validate() const;

    bool operator==(const QmpConfig &) const = default;
};

struct IterationRecord {
    std::size_t chosen_index = 0;
    /// Coefficient actually added to the solution.
    double coefficient = 0.0;
    /// <d_j*, r> on the residual before the update.
    double exact_coefficient = 0.0;
    double residual_norm_sq_after = 0.0;
    bool failure_injected = false;

    bool operator==(const IterationRecord &) const = default;
};

struct PursuitTrace {
    std::vector<IterationRecord> iterations;
    SparseSolution solution;
    Termination termination = Termination::ResidualBelowEps;

    std::size_t iteration_count() const { return iterations.size(); }
    bool operator==(const PursuitTrace &) const = default;
};

/// What an observer sees after each completed iteration.
struct IterationEvent {
    std::size_t iteration;
    const IterationRecord &record;
    /// The sweep the atom was selected from (exact for classical, noisy for quantum).
    std::span<const double> sweep;
    std::span<const double> residual_after;
    const SparseSolution &solution;
};

using IterationObserver = std::function<void(const IterationEvent &)>;

/// Plain matching pursuit with exact inner products.
///
/// Loops while neither ||x||_0 > L nor ||r||_2 <= eps holds, capped at
/// stopping.iteration_cap() iterations. Each iteration picks the atom with the
/// largest |<d_j, r>| (smallest index on ties), adds z = <d_j*, r> to x_j* and
/// sets r <- r - z d_j*. A pick with |z| < 1e-15 ends the run with StagnationGuard.
PursuitTrace classical_mp(const Dictionary &dict, const Signal &signal, const StoppingRule &stopping,
                          CostLedger *ledger = nullptr, const IterationObserver &observer = {});

/// Classical simulation of the quantum pursuit.
///
/// The residual lives in a SampleTree; every iteration draws a noisy sweep,
/// picks the largest estimate in absolute value (or a uniformly random index
/// on an injected failure) and applies either the estimate (DoubleError) or
/// the exact inner product (SingleError). The stopping test reads the tree root.
PursuitTrace quantum_mp(const Dictionary &dict, const Signal &signal, const QmpConfig &cfg,
                        CostLedger *ledger = nullptr, const IterationObserver &observer = {});

/// Inner-product estimates z_j + e_j with e_j uniform on [-xi*scale, xi*scale].
///
/// e_j depends only on (cfg.seed, iteration, j), so repeated calls agree bit for bit.
std::vector<double> noisy_sweep(const Dictionary &dict, const SampleTree &tree, const QmpConfig &cfg,
                                std::size_t iteration);

/// The error e_j used by noisy_sweep for a given bound.
double sweep_error(std::uint64_t seed, std::size_t iteration, std::size_t j, double bound);

/// Argmax of |estimates[j]|, smallest index on ties. A supplied failure index
/// overrides the search and is returned with its estimate.
std::pair<std::size_t, double> select_max_abs(std::span<const double> estimates,
                                              std::optional<std::size_t> failure = std::nullopt);

/// Failure draw for one iteration: the random index if the iteration fails.
std::optional<std::size_t> draw_failure(const QmpConfig &cfg, std::size_t iteration, std::size_t m);

}  // namespace qmp
