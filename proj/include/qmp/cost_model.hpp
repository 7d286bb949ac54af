#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace qmp {

/// Operation counter. 128 bits keeps k*n*m exact for n up to ~1e12.
using OpCount = unsigned __int128;

std::string to_string(OpCount value);
OpCount parse_op_count(const std::string &text);

// Model constants. Every hidden constant is 1 and polylog(nm) is ceil(log2(nm)).

/// ceil(log2 n), with n = 1 mapped to 1.
std::size_t ceil_log2(std::size_t n);
/// ceil(log2(n*m)) without overflowing n*m.
std::size_t ceil_log2_product(std::size_t n, std::size_t m);
std::size_t ceil_sqrt(std::size_t m);

/// ceil(sqrt(m)) * (1/xi) * ln(3 k_max m / delta) * ceil(log2(nm)), before rounding.
double quantum_search_term_real(std::size_t n, std::size_t m, double xi, double delta,
                                std::size_t k_max);
/// Integral search charge: the ceiling of quantum_search_term_real.
OpCount quantum_search_term(std::size_t n, std::size_t m, double xi, double delta,
                            std::size_t k_max);

struct CostParams {
    std::size_t n = 0;
    std::size_t m = 0;
    double xi = 0.0;
    double delta = 0.0;
    std::size_t k_max = 0;

    bool operator==(const CostParams &) const = default;
};

struct IterationCharge {
    OpCount classical = 0;
    OpCount quantum = 0;
    std::size_t atom_support = 0;

    bool operator==(const IterationCharge &) const = default;
};

/// Running operation counts for one pursuit run (or a merge of several).
struct CostLedger {
    OpCount classical_ops = 0;
    OpCount quantum_ops = 0;
    OpCount classical_init_ops = 0;
    OpCount quantum_init_ops = 0;
    std::size_t classical_init_calls = 0;
    std::size_t quantum_init_calls = 0;
    std::vector<IterationCharge> per_iteration;
    CostParams params;

    /// Appends `other`'s charges. Associative; params are kept from `*this`
    /// unless it has none yet.
    void merge(const CostLedger &other);

    bool operator==(const CostLedger &) const = default;
};

/// classical_ops += n*m + n (sweep plus residual update).
void charge_classical_iteration(CostLedger &ledger, std::size_t n, std::size_t m);
/// classical_ops += n.
void charge_classical_init(CostLedger &ledger, std::size_t n);
/// quantum_ops += n * ceil(log2 n) for the residual tree build.
void charge_quantum_init(CostLedger &ledger, std::size_t n);
/// quantum_ops += support * ceil(log2 n) + search term.
void charge_quantum_iteration(CostLedger &ledger, std::size_t support, std::size_t n,
                              std::size_t m, double xi, double delta, std::size_t k_max);

/// n + k (n m + n).
OpCount classical_model_total(std::size_t n, std::size_t m, std::size_t k);

/// n ceil(log2 n) + sum_i supports[i] ceil(log2 n) + k * search term, with k = supports.size().
OpCount quantum_model_total(std::size_t n, std::size_t m, double xi, double delta,
                            std::size_t k_max, std::span<const std::size_t> supports);

/// Dense-atom form: every iteration touches all n residual entries; k_max = k.
OpCount quantum_model_total_dense(std::size_t n, std::size_t m, std::size_t k, double xi,
                                  double delta);

struct SupportModel {
    enum class Kind { Dense, Fixed };
    Kind kind = Kind::Dense;
    std::size_t fixed_support = 0;

    static SupportModel dense() { return {}; }
    static SupportModel fixed(std::size_t s) { return {Kind::Fixed, s}; }
    std::size_t support_for(std::size_t n) const;
};

struct CrossoverQuery {
    std::function<std::size_t(std::size_t)> m_of_n;
    std::function<std::size_t(std::size_t)> k_of_n;
    double xi = 0.01;
    double delta = 0.01;
    SupportModel support = SupportModel::dense();
    std::size_t n_min = 64;
    std::size_t n_max = std::size_t{1} << 24;
    /// Geometric grid ratio; must be > 1.
    double grid_factor = 2.0;
};

struct ModelPoint {
    std::size_t n = 0;
    std::size_t m = 0;
    std::size_t k = 0;
    OpCount classical_ops = 0;
    OpCount quantum_ops = 0;
    double ratio() const;
};

/// Evaluates both model totals at one n under the query's mappings.
ModelPoint evaluate_model(const CrossoverQuery &query, std::size_t n);

/// The geometric grid n_min, n_min*f, ... (rounded, strictly increasing), capped at n_max.
std::vector<std::size_t> geometric_grid(std::size_t n_min, std::size_t n_max, double factor);

/// Smallest n in [n_min, n_max] with quantum total < classical total.
///
/// Scans the geometric grid for the first point where the quantum model wins,
/// then bisects on integers between it and the previous grid point. Assumes the
/// sign of (quantum - classical) changes once inside that bracket.
std::optional<std::size_t> crossover_point(const CrossoverQuery &query);

}  // namespace qmp
