#include "qmp/experiments.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <thread>

#include "qmp/cost_model.hpp"
#include "qmp/random.hpp"

namespace qmp {

namespace {

constexpr std::uint64_t kBatchStream = 0x4241544348ULL;
constexpr std::uint64_t kEngineStream = 0x454E47494E45ULL;
constexpr std::uint64_t kSweepDataStream = 0x5357454450ULL;
constexpr std::uint64_t kSweepEngineStream = 0x535745454EULL;

double mean_of(const std::vector<double> &v) {
    if (v.empty()) {
        return 0.0;
    }
    double sum = 0.0;
    for (double x : v) {
        sum += x;
    }
    return sum / static_cast<double>(v.size());
}

double sample_std(const std::vector<double> &v) {
    if (v.size() < 2) {
        return 0.0;
    }
    double mean = mean_of(v);
    double ss = 0.0;
    for (double x : v) {
        ss += (x - mean) * (x - mean);
    }
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

TestOutcome normality_outcome(const std::vector<double> &sample) {
    TestOutcome out;
    if (sample.size() < 3 || sample.size() > 5000) {
        return out;
    }
    ShapiroWilkResult sw = shapiro_wilk(sample);
    out.degenerate = sw.degenerate;
    if (!sw.degenerate) {
        out.p_value = sw.p_value;
    }
    return out;
}

Json to_json(const TestOutcome &t) {
    Json j;
    j["p_value"] = t.p_value ? Json(*t.p_value) : Json(nullptr);
    j["degenerate"] = t.degenerate;
    return j;
}

TestOutcome test_outcome_from_json(const Json &j) {
    TestOutcome t;
    if (!j.at("p_value").is_null()) {
        t.p_value = j.at("p_value").get<double>();
    }
    t.degenerate = j.at("degenerate").get<bool>();
    return t;
}

std::string format_real(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::string format_mean(OpCount sum, std::size_t count) {
    if (count <= 1 || sum % count == 0) {
        return to_string(count <= 1 ? sum : sum / count);
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3Lf",
                  static_cast<long double>(sum) / static_cast<long double>(count));
    return buf;
}

}  // namespace

double noise_norm_bound(std::size_t n, double sigma, double truncation) {
    return truncation * sigma * std::sqrt(static_cast<double>(n));
}

double ExperimentOptions::effective_tolerance() const {
    if (residual_tolerance) {
        return *residual_tolerance;
    }
    return noise_norm_bound(spec.n, spec.noise_sigma, spec.noise_truncation);
}

StoppingRule ExperimentOptions::stopping() const {
    StoppingRule rule;
    rule.max_support = support_cap_factor * spec.sparsity;
    rule.residual_tolerance = effective_tolerance();
    rule.max_iterations = rule.max_support;
    return rule;
}

std::uint64_t batch_seed(std::uint64_t master, std::size_t batch_id) {
    return derive_seed(master, {kBatchStream, batch_id});
}

std::uint64_t engine_seed(std::uint64_t master, std::size_t batch_id, std::size_t signal, int engine) {
    return derive_seed(master, {kEngineStream, batch_id, signal, static_cast<std::uint64_t>(engine)});
}

BatchRecord run_batch(const ExperimentOptions &options, std::size_t batch_id) {
    BatchRecord record;
    record.batch_id = batch_id;
    record.seed = batch_seed(options.qmp.seed, batch_id);
    try {
        BatchSpec spec = options.spec;
        spec.seed = record.seed;
        Batch batch = generate_batch(spec);
        StoppingRule stopping = options.stopping();

        QmpConfig single = options.qmp;
        single.stopping = stopping;
        single.k_max = 0;
        single.variant = Variant::SingleError;
        QmpConfig dbl = single;
        dbl.variant = Variant::DoubleError;

        std::vector<double> classical_sizes;
        std::vector<double> single_sizes;
        std::vector<double> double_sizes;
        for (std::size_t i = 0; i < batch.signals.size(); ++i) {
            const Signal &s = batch.signals[i];
            PursuitTrace c = classical_mp(batch.dictionary, s, stopping);
            single.seed = engine_seed(options.qmp.seed, batch_id, i, 0);
            PursuitTrace q1 = quantum_mp(batch.dictionary, s, single);
            dbl.seed = engine_seed(options.qmp.seed, batch_id, i, 1);
            PursuitTrace q2 = quantum_mp(batch.dictionary, s, dbl);
            for (const auto *t : {&c, &q1, &q2}) {
                record.cap_hits += t->termination == Termination::IterationCap;
            }
            classical_sizes.push_back(static_cast<double>(c.solution.support_size()));
            single_sizes.push_back(static_cast<double>(q1.solution.support_size()));
            double_sizes.push_back(static_cast<double>(q2.solution.support_size()));
        }
        record.classical_mean_sparsity = mean_of(classical_sizes);
        record.single_mean_sparsity = mean_of(single_sizes);
        record.double_mean_sparsity = mean_of(double_sizes);
        if (!(record.classical_mean_sparsity > 0.0)) {
            throw ValueError("classical representations are all empty; ratios undefined");
        }
        record.ratio_single = record.single_mean_sparsity / record.classical_mean_sparsity;
        record.ratio_double = record.double_mean_sparsity / record.classical_mean_sparsity;
    } catch (const std::exception &e) {
        record.failed = true;
        record.error = e.what();
    }
    return record;
}

ExperimentAggregate aggregate_batches(const std::vector<BatchRecord> &records) {
    ExperimentAggregate agg;
    std::vector<double> classical;
    std::vector<double> single;
    std::vector<double> dbl;
    std::vector<double> ratio_single;
    std::vector<double> ratio_double;
    for (const auto &r : records) {
        if (r.failed) {
            continue;
        }
        classical.push_back(r.classical_mean_sparsity);
        single.push_back(r.single_mean_sparsity);
        dbl.push_back(r.double_mean_sparsity);
        ratio_single.push_back(r.ratio_single);
        ratio_double.push_back(r.ratio_double);
        agg.cap_hits += r.cap_hits;
    }
    agg.batches_used = classical.size();
    agg.mean_sparsity_classical = mean_of(classical);
    agg.mean_sparsity_single = mean_of(single);
    agg.mean_sparsity_double = mean_of(dbl);
    agg.mean_ratio_single = mean_of(ratio_single);
    agg.mean_ratio_double = mean_of(ratio_double);
    agg.normality_single = normality_outcome(ratio_single);
    agg.normality_double = normality_outcome(ratio_double);
    if (!ratio_single.empty()) {
        WilcoxonResult w = wilcoxon_signed_rank(ratio_single, ratio_double);
        agg.wilcoxon.p_value = w.p_value;
        agg.wilcoxon.degenerate = w.degenerate;
    }
    return agg;
}

ExperimentResult run_sparsity_experiment(const ExperimentOptions &options) {
    options.spec.validate();
    options.qmp.validate();
    if (options.batches < 1) {
        throw ValueError("run_sparsity_experiment: need at least one batch");
    }
    if (options.support_cap_factor < 1) {
        throw ValueError("run_sparsity_experiment: support_cap_factor must be >= 1");
    }
    ExperimentResult result;
    result.options = options;
    result.batches.resize(options.batches);

    unsigned workers = std::max(1u, std::min<unsigned>(options.threads,
                                                       static_cast<unsigned>(options.batches)));
    if (workers == 1) {
        for (std::size_t b = 0; b < options.batches; ++b) {
            result.batches[b] = run_batch(options, b);
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t b = next++; b < options.batches; b = next++) {
                    result.batches[b] = run_batch(options, b);
                }
            });
        }
    }
    result.aggregate = aggregate_batches(result.batches);
    return result;
}

Json to_json(const ExperimentOptions &options) {
    Json j;
    j["spec"] = to_json(options.spec);
    j["batches"] = options.batches;
    j["qmp"] = to_json(options.qmp);
    j["residual_tolerance"] =
        options.residual_tolerance ? Json(*options.residual_tolerance) : Json(nullptr);
    j["effective_tolerance"] = options.effective_tolerance();
    j["support_cap_factor"] = options.support_cap_factor;
    return j;
}

ExperimentOptions experiment_options_from_json(const Json &j) {
    ExperimentOptions o;
    o.spec = batch_spec_from_json(j.at("spec"));
    o.batches = j.at("batches").get<std::size_t>();
    o.qmp = qmp_config_from_json(j.at("qmp"));
    if (!j.at("residual_tolerance").is_null()) {
        o.residual_tolerance = j.at("residual_tolerance").get<double>();
    }
    o.support_cap_factor = j.at("support_cap_factor").get<std::size_t>();
    return o;
}

Json to_json(const ExperimentResult &result) {
    Json batches = Json::array();
    for (const auto &r : result.batches) {
        Json b;
        b["batch_id"] = r.batch_id;
        b["seed"] = r.seed;
        b["failed"] = r.failed;
        b["error"] = r.error;
        b["classical_mean_sparsity"] = r.classical_mean_sparsity;
        b["single_mean_sparsity"] = r.single_mean_sparsity;
        b["double_mean_sparsity"] = r.double_mean_sparsity;
        b["ratios"] = {{"single", r.ratio_single}, {"double", r.ratio_double}};
        b["cap_hits"] = r.cap_hits;
        batches.push_back(std::move(b));
    }
    const auto &a = result.aggregate;
    Json agg;
    agg["batches_used"] = a.batches_used;
    agg["mean_sparsity_classical"] = a.mean_sparsity_classical;
    agg["mean_sparsity_single"] = a.mean_sparsity_single;
    agg["mean_sparsity_double"] = a.mean_sparsity_double;
    agg["mean_ratio_single"] = a.mean_ratio_single;
    agg["mean_ratio_double"] = a.mean_ratio_double;
    agg["normality_single"] = to_json(a.normality_single);
    agg["normality_double"] = to_json(a.normality_double);
    agg["wilcoxon"] = to_json(a.wilcoxon);
    agg["cap_hits"] = a.cap_hits;

    Json j;
    j["schema_version"] = kSchemaVersion;
    j["config"] = to_json(result.options);
    j["batches"] = std::move(batches);
    j["aggregate"] = std::move(agg);
    return j;
}

ExperimentResult experiment_result_from_json(const Json &j) {
    try {
        if (j.at("schema_version").get<int>() != kSchemaVersion) {
            throw FormatError("unsupported schema_version");
        }
        ExperimentResult result;
        result.options = experiment_options_from_json(j.at("config"));
        for (const auto &b : j.at("batches")) {
            BatchRecord r;
            r.batch_id = b.at("batch_id").get<std::size_t>();
            r.seed = b.at("seed").get<std::uint64_t>();
            r.failed = b.at("failed").get<bool>();
            r.error = b.at("error").get<std::string>();
            r.classical_mean_sparsity = b.at("classical_mean_sparsity").get<double>();
            r.single_mean_sparsity = b.at("single_mean_sparsity").get<double>();
            r.double_mean_sparsity = b.at("double_mean_sparsity").get<double>();
            r.ratio_single = b.at("ratios").at("single").get<double>();
            r.ratio_double = b.at("ratios").at("double").get<double>();
            r.cap_hits = b.at("cap_hits").get<std::size_t>();
            result.batches.push_back(std::move(r));
        }
        const Json &a = j.at("aggregate");
        auto &agg = result.aggregate;
        agg.batches_used = a.at("batches_used").get<std::size_t>();
        agg.mean_sparsity_classical = a.at("mean_sparsity_classical").get<double>();
        agg.mean_sparsity_single = a.at("mean_sparsity_single").get<double>();
        agg.mean_sparsity_double = a.at("mean_sparsity_double").get<double>();
        agg.mean_ratio_single = a.at("mean_ratio_single").get<double>();
        agg.mean_ratio_double = a.at("mean_ratio_double").get<double>();
        agg.normality_single = test_outcome_from_json(a.at("normality_single"));
        agg.normality_double = test_outcome_from_json(a.at("normality_double"));
        agg.wilcoxon = test_outcome_from_json(a.at("wilcoxon"));
        agg.cap_hits = a.at("cap_hits").get<std::size_t>();
        return result;
    } catch (const nlohmann::json::exception &e) {
        throw FormatError(std::string("experiment result: ") + e.what());
    }
}

double SweepRow::ratio() const {
    return static_cast<double>(static_cast<long double>(quantum_ops_sum) /
                               static_cast<long double>(classical_ops_sum));
}

std::size_t sweep_m(std::size_t n) { return 2 * n; }

std::size_t sweep_sparsity(std::size_t n) { return std::max<std::size_t>(1, n / 5); }

std::vector<SweepRow> run_cost_sweep(const SweepOptions &options) {
    if (options.n_values.empty()) {
        throw ValueError("run_cost_sweep: no signal lengths given");
    }
    if (options.trials < 1) {
        throw ValueError("run_cost_sweep: trials must be >= 1");
    }
    if (!(options.qmp.xi > 0.0)) {
        throw ValueError("run_cost_sweep: the cost model needs xi > 0");
    }
    std::vector<SweepRow> rows;
    for (std::size_t n : options.n_values) {
        if (n < 1) {
            throw ValueError("run_cost_sweep: n must be >= 1");
        }
        SweepRow row;
        row.n = n;
        row.m = sweep_m(n);
        std::size_t sparsity = sweep_sparsity(n);
        if (n > options.simulate_max) {
            auto k = sparsity;
            row.k = row.k_classical = row.k_quantum = static_cast<double>(k);
            row.classical_ops_sum = classical_model_total(n, row.m, k);
            row.quantum_ops_sum = quantum_model_total_dense(n, row.m, k, options.qmp.xi, options.qmp.delta);
            rows.push_back(row);
            continue;
        }
        row.simulated = true;
        row.trials = options.trials;
        std::vector<double> kc;
        std::vector<double> kq;
        std::vector<double> gaps;
        std::vector<double> classical_ops;
        std::vector<double> quantum_ops;
        for (std::size_t t = 0; t < options.trials; ++t) {
            BatchSpec spec;
            spec.n = n;
            spec.m = row.m;
            spec.sparsity = sparsity;
            spec.signals_per_batch = 1;
            spec.noise_sigma = options.noise_sigma;
            spec.noise_truncation = options.noise_truncation;
            spec.seed = derive_seed(options.qmp.seed, {kSweepDataStream, n, t});
            Batch batch = generate_batch(spec);

            StoppingRule stopping;
            stopping.max_support = options.support_cap_factor * sparsity;
            stopping.residual_tolerance = noise_norm_bound(n, options.noise_sigma, options.noise_truncation);
            stopping.max_iterations = stopping.max_support;
            QmpConfig cfg = options.qmp;
            cfg.variant = Variant::DoubleError;
            cfg.stopping = stopping;
            cfg.k_max = 0;
            cfg.seed = derive_seed(options.qmp.seed, {kSweepEngineStream, n, t});

            CostLedger classical_ledger;
            CostLedger quantum_ledger;
            PursuitTrace c = classical_mp(batch.dictionary, batch.signals[0], stopping, &classical_ledger);
            PursuitTrace q = quantum_mp(batch.dictionary, batch.signals[0], cfg, &quantum_ledger);
            double k1 = static_cast<double>(c.iteration_count());
            double k2 = static_cast<double>(q.iteration_count());
            kc.push_back(k1);
            kq.push_back(k2);
            gaps.push_back(k1 > 0.0 ? std::abs(k2 - k1) / k1 : 0.0);
            row.classical_ops_sum += classical_ledger.classical_ops;
            row.quantum_ops_sum += quantum_ledger.quantum_ops;
            classical_ops.push_back(static_cast<double>(classical_ledger.classical_ops));
            quantum_ops.push_back(static_cast<double>(quantum_ledger.quantum_ops));
        }
        row.k_classical = mean_of(kc);
        row.k_quantum = mean_of(kq);
        row.k = row.k_classical;
        row.mean_relative_k_gap = mean_of(gaps);
        row.classical_ops_std = sample_std(classical_ops);
        row.quantum_ops_std = sample_std(quantum_ops);
        rows.push_back(row);
    }
    return rows;
}

std::string sweep_csv(const std::vector<SweepRow> &rows, bool detail) {
    std::ostringstream out;
    out << "n,m,k,classical_ops,quantum_ops,ratio";
    if (detail) {
        out << ",k_classical,k_quantum,classical_ops_std,quantum_ops_std,simulated";
    }
    out << '\n';
    for (const auto &r : rows) {
        out << r.n << ',' << r.m << ',' << format_real(r.k) << ','
            << format_mean(r.classical_ops_sum, r.trials) << ','
            << format_mean(r.quantum_ops_sum, r.trials) << ',' << format_real(r.ratio());
        if (detail) {
            out << ',' << format_real(r.k_classical) << ',' << format_real(r.k_quantum) << ','
                << format_real(r.classical_ops_std) << ',' << format_real(r.quantum_ops_std) << ','
                << (r.simulated ? 1 : 0);
        }
        out << '\n';
    }
    return out.str();
}

}  // namespace qmp
