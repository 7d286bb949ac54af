#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "qmp/core.hpp"

namespace qmp {

using Rng = std::mt19937_64;

/// Shape and noise parameters for one batch of synthetic sparse-coded signals.
struct BatchSpec {
    std::size_t n = 100;
    std::size_t m = 512;
    std::size_t sparsity = 17;
    std::size_t signals_per_batch = 100;
    double noise_sigma = 0.01;
    /// Noise is truncated to [-noise_truncation * sigma, +noise_truncation * sigma].
    double noise_truncation = 2.0;
    std::uint64_t seed = 0;

    void validate() const;
    bool operator==(const BatchSpec &) const = default;
};

/// One dictionary with its codes x_i and observed signals s_i = D x_i + noise.
struct Batch {
    BatchSpec spec;
    Dictionary dictionary;
    std::vector<SparseSolution> codes;
    std::vector<Signal> signals;

    bool operator==(const Batch &) const = default;
};

/// i.i.d. standard normal entries, each column scaled to unit length.
Dictionary generate_dictionary(std::size_t n, std::size_t m, Rng &rng);

/// Support drawn uniformly without replacement; values standard normal,
/// redrawn while |value| < 1e-6.
SparseSolution generate_sparse_code(std::size_t m, std::size_t sparsity, Rng &rng);

/// D x plus Gaussian noise truncated by rejection. sigma = 0 gives D x exactly.
Signal generate_signal(const Dictionary &dict, const SparseSolution &code, double noise_sigma,
                       double truncation, Rng &rng);

/// Draws N(0, sigma^2) until the sample falls within truncation * sigma.
double truncated_normal(double sigma, double truncation, Rng &rng);

/// Deterministic in spec (including spec.seed).
Batch generate_batch(const BatchSpec &spec);

}  // namespace qmp
