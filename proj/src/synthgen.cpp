#include "qmp/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qmp {

void BatchSpec::validate() const {
    if (n < 1 || m < 1 || signals_per_batch < 1) {
        throw ValueError("BatchSpec: n, m and signals_per_batch must be >= 1");
    }
    if (sparsity < 1 || sparsity > m) {
        throw ValueError("BatchSpec: sparsity must lie in [1, m]");
    }
    if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) {
        throw ValueError("BatchSpec: noise_sigma must be >= 0");
    }
    if (noise_sigma > 0.0 && !(noise_truncation > 0.0)) {
        throw ValueError("BatchSpec: noise_truncation must be > 0");
    }
}

Dictionary generate_dictionary(std::size_t n, std::size_t m, Rng &rng) {
    if (n < 1 || m < 1) {
        throw DimensionError("generate_dictionary: n and m must be >= 1");
    }
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> data(n * m);
    for (std::size_t j = 0; j < m; ++j) {
        std::span<double> col(data.data() + j * n, n);
        double norm = 0.0;
        while (norm == 0.0) {
            for (double &v : col) {
                v = normal(rng);
            }
            norm = std::sqrt(norm_squared(col));
        }
        for (double &v : col) {
            v /= norm;
        }
    }
    return Dictionary(n, m, std::move(data));
}

SparseSolution generate_sparse_code(std::size_t m, std::size_t sparsity, Rng &rng) {
    if (sparsity > m) {
        throw ValueError("generate_sparse_code: sparsity exceeds m");
    }
    std::vector<std::size_t> all(m);
    std::iota(all.begin(), all.end(), std::size_t{0});
    std::vector<std::size_t> support;
    support.reserve(sparsity);
    std::sample(all.begin(), all.end(), std::back_inserter(support), sparsity, rng);

    std::normal_distribution<double> normal(0.0, 1.0);
    SparseSolution code(m);
    for (std::size_t j : support) {
        double v = 0.0;
        while (std::abs(v) < 1e-6) {
            v = normal(rng);
        }
        code.set(j, v);
    }
    return code;
}

double truncated_normal(double sigma, double truncation, Rng &rng) {
    if (!(sigma >= 0.0) || !std::isfinite(sigma) || !(truncation > 0.0)) {
        throw ValueError("truncated_normal: need sigma >= 0 and truncation > 0");
    }
    if (sigma == 0.0) {
        return 0.0;
    }
    std::normal_distribution<double> normal(0.0, sigma);
    double bound = truncation * sigma;
    while (true) {
        double v = normal(rng);
        if (std::abs(v) <= bound) {
            return v;
        }
    }
}

Signal generate_signal(const Dictionary &dict, const SparseSolution &code, double noise_sigma,
                       double truncation, Rng &rng) {
    std::vector<double> s = reconstruct(dict, code);
    if (noise_sigma > 0.0) {
        for (double &v : s) {
            v += truncated_normal(noise_sigma, truncation, rng);
        }
    }
    return Signal(std::move(s));
}

Batch generate_batch(const BatchSpec &spec) {
    spec.validate();
    Rng rng(spec.seed);
    Dictionary dict = generate_dictionary(spec.n, spec.m, rng);
    std::vector<SparseSolution> codes;
    std::vector<Signal> signals;
    codes.reserve(spec.signals_per_batch);
    signals.reserve(spec.signals_per_batch);
    for (std::size_t i = 0; i < spec.signals_per_batch; ++i) {
        codes.push_back(generate_sparse_code(spec.m, spec.sparsity, rng));
        signals.push_back(generate_signal(dict, codes.back(), spec.noise_sigma, spec.noise_truncation, rng));
    }
    return Batch{spec, std::move(dict), std::move(codes), std::move(signals)};
}

}  // namespace qmp
