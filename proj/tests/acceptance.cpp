// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "qmp/cost_model.hpp"
#include "qmp/experiments.hpp"
#include "qmp/pursuit.hpp"
#include "qmp/sample_tree.hpp"
#include "qmp/stats.hpp"
#include "qmp/synthgen.hpp"

using namespace qmp;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
    bool pass;
    std::string detail;
};

struct Instance {
    Dictionary dict;
    Signal signal;
};

// n in [4, 64], m in [8, 128], Gaussian signal.
std::vector<Instance> random_instances(std::size_t count, std::uint64_t seed) {
    Rng rng(seed);
    std::uniform_int_distribution<std::size_t> n_dist(4, 64), m_dist(8, 128);
    std::normal_distribution<double> normal;
    std::vector<Instance> out;
    for (std::size_t i = 0; i < count; ++i) {
        std::size_t n = n_dist(rng), m = m_dist(rng);
        Dictionary d = generate_dictionary(n, m, rng);
        std::vector<double> s(n);
        for (auto &x : s) x = normal(rng);
        out.push_back({std::move(d), Signal(std::move(s))});
    }
    return out;
}

StoppingRule instance_rule(const Instance &inst) { return {inst.dict.n(), 1e-6, 4 * inst.dict.n()}; }

Outcome oracle_equivalence() {
    std::size_t mismatches = 0, iterations = 0;
    for (const auto &inst : random_instances(100, 1001)) {
        StoppingRule stop = instance_rule(inst);
        PursuitTrace c = classical_mp(inst.dict, inst.signal, stop);
        QmpConfig cfg;
        cfg.xi = 0.0;
        cfg.inject_failures = false;
        cfg.stopping = stop;
        for (Variant v : {Variant::SingleError, Variant::DoubleError}) {
            cfg.variant = v;
            PursuitTrace q = quantum_mp(inst.dict, inst.signal, cfg);
            bool same = q.iterations.size() == c.iterations.size() && q.solution == c.solution &&
                        q.termination == c.termination;
            for (std::size_t i = 0; same && i < q.iterations.size(); ++i) {
                same = q.iterations[i].chosen_index == c.iterations[i].chosen_index &&
                       q.iterations[i].coefficient == c.iterations[i].coefficient;
            }
            mismatches += !same;
        }
        iterations += c.iterations.size();
    }
    return {mismatches == 0, std::to_string(mismatches) + " mismatched traces, " + std::to_string(iterations) +
                                 " classical iterations"};
}

Outcome energy_identity() {
    double worst = 0.0;
    std::size_t checked = 0;
    for (const auto &inst : random_instances(100, 1001)) {
        std::vector<double> before(inst.signal.values().begin(), inst.signal.values().end());
        classical_mp(inst.dict, inst.signal, instance_rule(inst), nullptr, [&](const IterationEvent &e) {
            double nb = 0.0, na = 0.0;
            for (double x : before) nb += x * x;
            for (double x : e.residual_after) na += x * x;
            double z = e.record.coefficient;
            worst = std::max(worst, std::abs(na - (nb - z * z)) / (1.0 + nb));
            ++checked;
            before.assign(e.residual_after.begin(), e.residual_after.end());
        });
    }
    char buf[128];
    std::snprintf(buf, sizeof buf, "worst scaled gap %.3g over %zu iterations", worst, checked);
    return {worst <= 1e-9, buf};
}

Outcome tree_consistency() {
    Rng rng(303);
    std::normal_distribution<double> normal;
    std::vector<double> init(1024);
    for (auto &x : init) x = normal(rng);
    SampleTree tree(init);
    for (int i = 0; i < 10000; ++i) tree.update(rng() % 1024, normal(rng));

    // brute force: every node is the sum of squares of the leaves beneath it
    auto nodes = tree.node_sums();
    std::size_t padded = tree.padded_size();
    double worst = 0.0;
    for (std::size_t node = 0; node < nodes.size(); ++node) {
        std::size_t first = node, width = 1;
        while (first < padded - 1) {
            first = 2 * first + 1;
            width *= 2;
        }
        double sum = 0.0;
        for (std::size_t i = first - (padded - 1); i < first - (padded - 1) + width; ++i) {
            if (i < tree.size()) sum += tree.value(i) * tree.value(i);
        }
        worst = std::max(worst, std::abs(nodes[node] - sum) / std::max(1.0, std::abs(sum)));
    }

    std::vector<double> leaves(256);
    std::uniform_real_distribution<double> uniform(-1.0, 1.0);
    for (auto &x : leaves) x = uniform(rng);
    SampleTree sampler(leaves);
    std::vector<double> counts(256, 0.0);
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) counts[sampler.sample_index(rng)] += 1;
    double chi = 0.0;
    for (std::size_t i = 0; i < 256; ++i) {
        double expected = draws * leaves[i] * leaves[i] / sampler.norm_squared();
        chi += (counts[i] - expected) * (counts[i] - expected) / expected;
    }
    boost::math::chi_squared dist(255);
    double critical = boost::math::quantile(boost::math::complement(dist, 0.001));
    char buf[160];
    std::snprintf(buf, sizeof buf, "worst node error %.3g, chi2 %.1f < %.1f", worst, chi, critical);
    return {worst <= 1e-9 && chi < critical, buf};
}

Outcome replication() {
    ExperimentOptions o;
    o.spec.n = 100;
    o.spec.m = 512;
    o.spec.sparsity = 17;
    o.spec.signals_per_batch = 20;
    o.spec.noise_sigma = 0.01;
    o.spec.noise_truncation = 2.0;
    o.batches = 20;
    o.qmp.xi = 0.01;
    o.qmp.scale_error_by_residual_norm = false;
    o.qmp.seed = 7;
    auto result = run_sparsity_experiment(o);
    const auto &a = result.aggregate;
    bool size_ok = a.batches_used == 20 && a.mean_sparsity_classical >= 15 && a.mean_sparsity_classical <= 21;
    bool ratios_ok = a.mean_ratio_single >= 0.98 && a.mean_ratio_single <= 1.05 && a.mean_ratio_double >= 0.98 &&
                     a.mean_ratio_double <= 1.05;
    double p = a.wilcoxon.p_value.value_or(-1.0);
    char buf[200];
    std::snprintf(buf, sizeof buf, "mean size %.3f, ratios %.4f / %.4f, Wilcoxon p %.4f, cap hits %zu",
                  a.mean_sparsity_classical, a.mean_ratio_single, a.mean_ratio_double, p, a.cap_hits);
    return {size_ok && ratios_ok && p > 0.01, buf};
}

Outcome cost_exactness() {
    std::size_t mismatches = 0;
    auto instances = random_instances(20, 505);
    for (std::size_t i = 0; i < instances.size(); ++i) {
        const auto &inst = instances[i];
        QmpConfig cfg;
        cfg.stopping = instance_rule(inst);
        cfg.seed = i;
        CostLedger ledger;
        PursuitTrace t = quantum_mp(inst.dict, inst.signal, cfg, &ledger);
        std::vector<std::size_t> supports;
        for (const auto &rec : t.iterations) supports.push_back(inst.dict.atom_support(rec.chosen_index));
        OpCount closed = quantum_model_total(inst.dict.n(), inst.dict.m(), cfg.xi, cfg.delta, cfg.effective_k_max(),
                                             supports);
        mismatches += ledger.quantum_ops != closed;
    }
    return {mismatches == 0, std::to_string(mismatches) + " of 20 ledgers differ from the closed form"};
}

// Golden crossover for m = 2n, k = floor(n/5), xi = delta = 0.01, dense atoms.
constexpr std::size_t kCrossoverGolden = 915;

Outcome crossover() {
    CrossoverQuery q;
    q.m_of_n = [](std::size_t n) { return 2 * n; };
    q.k_of_n = [](std::size_t n) { return std::max<std::size_t>(1, n / 5); };
    q.xi = 0.01;
    q.delta = 0.01;
    q.support = SupportModel::dense();
    q.n_min = 64;
    q.n_max = std::size_t{1} << 24;
    bool decreasing = true;
    double prev = INFINITY;
    for (std::size_t n : geometric_grid(q.n_min, q.n_max, 2.0)) {
        double r = evaluate_model(q, n).ratio();
        decreasing = decreasing && r < prev;
        prev = r;
    }
    auto n0 = crossover_point(q);
    char buf[160];
    std::snprintf(buf, sizeof buf, "ratio decreasing %s, N0 = %zu (golden %zu), ratio at 2^24 = %.4g",
                  decreasing ? "yes" : "no", n0.value_or(0), kCrossoverGolden, prev);
    return {decreasing && n0 && *n0 == kCrossoverGolden, buf};
}

Outcome wilcoxon_enumeration() {
    Rng rng(707);
    std::uniform_int_distribution<int> grid(-5, 5);
    std::size_t mismatches = 0;
    for (int trial = 0; trial < 200; ++trial) {
        std::size_t n = 1 + rng() % 12;
        std::vector<double> a(n), b(n), d(n);
        for (std::size_t i = 0; i < n; ++i) {
            a[i] = grid(rng) * 0.25;
            b[i] = grid(rng) * 0.25;
        }
        // sign enumeration with ranks by direct comparison
        std::vector<double> nz;
        for (std::size_t i = 0; i < n; ++i) {
            if (a[i] != b[i]) nz.push_back(a[i] - b[i]);
        }
        std::vector<unsigned> rank2(nz.size());
        unsigned observed = 0;
        for (std::size_t i = 0; i < nz.size(); ++i) {
            unsigned less = 0, eq = 0;
            for (double y : nz) {
                less += std::abs(y) < std::abs(nz[i]);
                eq += std::abs(y) == std::abs(nz[i]);
            }
            rank2[i] = 2 * less + eq + 1;
            if (nz[i] > 0) observed += rank2[i];
        }
        double expected = 1.0;
        if (!nz.empty()) {
            std::uint64_t lo = 0, hi = 0, total = std::uint64_t{1} << nz.size();
            for (std::uint64_t mask = 0; mask < total; ++mask) {
                unsigned s = 0;
                for (std::size_t i = 0; i < nz.size(); ++i) s += (mask >> i & 1) ? rank2[i] : 0;
                lo += s <= observed;
                hi += s >= observed;
            }
            expected = std::min(1.0, 2.0 * static_cast<double>(std::min(lo, hi)) / static_cast<double>(total));
        }
        double got = wilcoxon_signed_rank(a, b).p_value;
        mismatches += got != expected;
    }
    return {mismatches == 0, std::to_string(mismatches) + " of 200 p-values differ"};
}

Outcome noise_contract() {
    const double xi = 0.01;
    std::size_t violations = 0;
    for (std::size_t k = 0; k < 1000000; ++k) {
        double scale = 1.0 + static_cast<double>(k % 7);
        double e = sweep_error(99, k / 1000, k % 1000, xi * scale);
        violations += !(std::abs(e) <= xi * scale);
    }
    auto inst = random_instances(1, 808).front();
    SampleTree tree(inst.signal.values());
    bool identical = true;
    for (bool scaled : {false, true}) {
        QmpConfig cfg;
        cfg.xi = xi;
        cfg.seed = 42;
        cfg.scale_error_by_residual_norm = scaled;
        for (std::size_t it = 0; it < 50; ++it) {
            auto a = noisy_sweep(inst.dict, tree, cfg, it);
            auto b = noisy_sweep(inst.dict, tree, cfg, it);
            identical = identical && a == b;
            double bound = xi * (scaled ? std::sqrt(tree.norm_squared()) : 1.0);
            for (std::size_t j = 0; j < a.size(); ++j) {
                double exact = inner_product(inst.dict.atom(j), tree.values());
                violations += !(std::abs(a[j] - exact) <= bound * (1 + 1e-12));
            }
        }
    }
    return {violations == 0 && identical,
            std::to_string(violations) + " bound violations, repeat calls " + (identical ? "identical" : "differ")};
}

Outcome iteration_parity() {
    SweepOptions o;
    o.n_values = {64, 128, 256};
    o.trials = 20;
    o.simulate_max = 256;
    o.qmp.xi = 0.01;
    o.qmp.delta = 0.01;
    o.qmp.seed = 11;
    auto rows = run_cost_sweep(o);
    bool ok = rows.size() == 3;
    std::string detail;
    for (const auto &r : rows) {
        ok = ok && r.simulated && r.mean_relative_k_gap <= 0.1;
        char buf[96];
        std::snprintf(buf, sizeof buf, "%sn=%zu gap %.4f (k %.2f vs %.2f)", detail.empty() ? "" : "; ", r.n,
                      r.mean_relative_k_gap, r.k_classical, r.k_quantum);
        detail += buf;
    }
    return {ok, detail};
}

struct Criterion {
    int id;
    const char *name;
    double limit_seconds;  // 0: no runtime limit
    std::function<Outcome()> run;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "oracle equivalence", 10, oracle_equivalence},
        {2, "energy identity", 0, energy_identity},
        {3, "sample-tree consistency", 5, tree_consistency},
        {4, "sparsity replication", 300, replication},
        {5, "cost-model exactness", 0, cost_exactness},
        {6, "crossover behavior", 0, crossover},
        {7, "wilcoxon correctness", 0, wilcoxon_enumeration},
        {8, "noise contract", 0, noise_contract},
        {9, "iteration-count parity", 0, iteration_parity},
    };
    int failures = 0;
    for (const auto &c : criteria) {
        auto start = Clock::now();
        Outcome out;
        try {
            out = c.run();
        } catch (const std::exception &e) {
            out = {false, std::string("exception: ") + e.what()};
        }
        double secs = std::chrono::duration<double>(Clock::now() - start).count();
        bool in_time = c.limit_seconds == 0 || secs < c.limit_seconds;
        bool pass = out.pass && in_time;
        failures += !pass;
        std::printf("[%s] %d %s: %s (%.2fs%s)\n", pass ? "PASS" : "FAIL", c.id, c.name, out.detail.c_str(), secs,
                    in_time ? "" : ", over time limit");
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
