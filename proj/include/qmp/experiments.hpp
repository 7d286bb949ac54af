#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qmp/io.hpp"
#include "qmp/pursuit.hpp"
#include "qmp/stats.hpp"
#include "qmp/synthgen.hpp"

namespace qmp {

/// Optional p-value; empty when the test could not be run (too few batches,
/// zero variance).
struct TestOutcome {
    std::optional<double> p_value;
    bool degenerate = false;

    bool operator==(const TestOutcome &) const = default;
};

struct BatchRecord {
    std::size_t batch_id = 0;
    std::uint64_t seed = 0;
    bool failed = false;
    std::string error;
    double classical_mean_sparsity = 0.0;
    double single_mean_sparsity = 0.0;
    double double_mean_sparsity = 0.0;
    double ratio_single = 0.0;
    double ratio_double = 0.0;
    /// Runs that stopped on the iteration cap, all three engines.
    std::size_t cap_hits = 0;

    bool operator==(const BatchRecord &) const = default;
};

struct ExperimentAggregate {
    std::size_t batches_used = 0;
    double mean_sparsity_classical = 0.0;
    double mean_sparsity_single = 0.0;
    double mean_sparsity_double = 0.0;
    double mean_ratio_single = 0.0;
    double mean_ratio_double = 0.0;
    TestOutcome normality_single;
    TestOutcome normality_double;
    /// Single vs double per-batch ratios.
    TestOutcome wilcoxon;
    std::size_t cap_hits = 0;

    bool operator==(const ExperimentAggregate &) const = default;
};

struct ExperimentOptions {
    BatchSpec spec;
    std::size_t batches = 100;
    /// xi, delta, scale and failure flags, master seed. Its stopping rule is
    /// replaced by the harness (see residual_tolerance / support_cap_factor).
    QmpConfig qmp;
    /// Stop once ||r||_2 <= this; defaults to noise_norm_bound for the spec.
    std::optional<double> residual_tolerance;
    /// Safety cap L = factor * spec.sparsity, also the iteration cap.
    std::size_t support_cap_factor = 10;
    unsigned threads = 1;

    double effective_tolerance() const;
    StoppingRule stopping() const;
};

struct ExperimentResult {
    ExperimentOptions options;
    std::vector<BatchRecord> batches;
    ExperimentAggregate aggregate;
};

/// Largest possible norm of the truncated noise, truncation * sigma * sqrt(n).
/// Used as the default residual tolerance.
double noise_norm_bound(std::size_t n, double sigma, double truncation);

/// Seed used to generate batch `batch_id` from the master seed.
std::uint64_t batch_seed(std::uint64_t master, std::size_t batch_id);
/// Seed of the (batch, signal, engine) PRNG stream; engine 0 = single, 1 = double.
std::uint64_t engine_seed(std::uint64_t master, std::size_t batch_id, std::size_t signal, int engine);

/// Runs classical, single-error and double-error pursuit on identical data
/// for every batch.
BatchRecord run_batch(const ExperimentOptions &options, std::size_t batch_id);

/// Deterministic in-order reduce over batch records; failed batches are skipped.
ExperimentAggregate aggregate_batches(const std::vector<BatchRecord> &records);

ExperimentResult run_sparsity_experiment(const ExperimentOptions &options);

Json to_json(const ExperimentOptions &options);
ExperimentOptions experiment_options_from_json(const Json &j);
Json to_json(const ExperimentResult &result);
ExperimentResult experiment_result_from_json(const Json &j);

/// Per-row settings for the run-time sweep: m = 2n and target sparsity n / 5.
struct SweepOptions {
    std::vector<std::size_t> n_values;
    /// xi, delta, scale flag and seed are used; stopping is set per row.
    QmpConfig qmp;
    std::size_t trials = 1;
    /// Rows with n above this are evaluated with the cost model only.
    std::size_t simulate_max = 256;
    double noise_sigma = 0.01;
    double noise_truncation = 2.0;
    std::size_t support_cap_factor = 10;
};

struct SweepRow {
    std::size_t n = 0;
    std::size_t m = 0;
    bool simulated = false;
    /// Model rows: n / 5. Simulated rows: mean classical iteration count.
    double k = 0.0;
    double k_classical = 0.0;
    double k_quantum = 0.0;
    /// Mean over trials of |k_quantum - k_classical| / k_classical.
    double mean_relative_k_gap = 0.0;
    /// Exact totals for model rows; for simulated rows the sums over trials.
    OpCount classical_ops_sum = 0;
    OpCount quantum_ops_sum = 0;
    std::size_t trials = 1;
    double classical_ops_std = 0.0;
    double quantum_ops_std = 0.0;

    double ratio() const;
};

std::size_t sweep_m(std::size_t n);
std::size_t sweep_sparsity(std::size_t n);

std::vector<SweepRow> run_cost_sweep(const SweepOptions &options);

/// Header "n,m,k,classical_ops,quantum_ops,ratio"; `detail` appends
/// k_classical,k_quantum,classical_ops_std,quantum_ops_std,simulated.
std::string sweep_csv(const std::vector<SweepRow> &rows, bool detail = false);

}  // namespace qmp
