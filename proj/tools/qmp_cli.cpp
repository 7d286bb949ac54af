// qmp: command-line front end for the matching pursuit workbench.
//
//   qmp generate    write a synthetic batch (dictionary, codes, signals) as JSON
//   qmp run         run one engine over a batch file, write traces as JSON
//   qmp compare     classical vs single/double-error sparsity experiment
//   qmp cost-sweep  operation-count sweep as CSV
//   qmp stats       Wilcoxon / Shapiro-Wilk on a compare result file
//
// Exit codes: 0 success, 1 usage error, 2 data error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qmp/experiments.hpp"
#include "qmp/io.hpp"
#include "qmp/pursuit.hpp"
#include "qmp/stats.hpp"
#include "qmp/synthgen.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

struct GlobalFlags {
    std::uint64_t seed = 0;
    double xi = 0.01;
    double delta = 0.01;
    std::string variant = "double";
    bool scale_error = false;
    bool inject_failures = false;
    std::optional<double> eps;
    std::optional<std::size_t> max_support;
    std::optional<std::size_t> k_max;
    std::string out;
};

qmp::QmpConfig make_config(const GlobalFlags &g) {
    qmp::QmpConfig cfg;
    cfg.seed = g.seed;
    cfg.xi = g.xi;
    cfg.delta = g.delta;
    cfg.variant = qmp::parse_variant(g.variant);
    cfg.scale_error_by_residual_norm = g.scale_error;
    cfg.inject_failures = g.inject_failures;
    cfg.k_max = g.k_max.value_or(0);
    return cfg;
}

void emit(const GlobalFlags &g, const std::string &text) {
    if (g.out.empty() || g.out == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(g.out, std::ios::binary);
    if (!out) {
        throw qmp::FormatError("cannot write " + g.out);
    }
    out << text;
}

qmp::BatchSpec spec_from_flags(std::size_t n, std::size_t m, std::size_t sparsity, std::size_t signals,
                               double sigma, double truncation, std::uint64_t seed) {
    qmp::BatchSpec spec;
    spec.n = n;
    spec.m = m;
    spec.sparsity = sparsity;
    spec.signals_per_batch = signals;
    spec.noise_sigma = sigma;
    spec.noise_truncation = truncation;
    spec.seed = seed;
    return spec;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Matching pursuit and simulated quantum matching pursuit workbench"};
    app.require_subcommand(1);
    GlobalFlags g;

    auto add_globals = [&g](CLI::App *cmd) {
        cmd->add_option("--seed", g.seed, "Master PRNG seed")->envname("QMP_SEED");
        cmd->add_option("--xi", g.xi, "Inner-product precision (noise bound)")->check(CLI::NonNegativeNumber);
        cmd->add_option("--delta", g.delta, "Total failure probability budget");
        cmd->add_option("--variant", g.variant, "Quantum variant")->check(CLI::IsMember({"single", "double"}));
        cmd->add_flag("--scale-error", g.scale_error, "Scale the noise bound by ||r||_2");
        cmd->add_flag("--inject-failures", g.inject_failures, "Inject subroutine failures at rate 3*delta'");
        cmd->add_option("--eps", g.eps, "Residual-norm stopping tolerance")->check(CLI::NonNegativeNumber);
        cmd->add_option("--max-support", g.max_support, "Support threshold L")->check(CLI::PositiveNumber);
        cmd->add_option("--k-max", g.k_max, "Iteration cap (defaults to L)")->check(CLI::PositiveNumber);
        cmd->add_option("--out", g.out, "Output path (stdout if omitted)");
    };

    // generate
    auto *gen = app.add_subcommand("generate", "Write a synthetic batch as JSON");
    std::size_t n = 100, m = 512, sparsity = 17, signals = 100;
    double sigma = 0.01, truncation = 2.0;
    auto add_shape = [&](CLI::App *cmd) {
        cmd->add_option("--n", n, "Signal length")->check(CLI::PositiveNumber);
        cmd->add_option("--m", m, "Atom count")->check(CLI::PositiveNumber);
        cmd->add_option("--sparsity", sparsity, "Nonzeros per code")->check(CLI::PositiveNumber);
        cmd->add_option("--signals", signals, "Signals per batch")->check(CLI::PositiveNumber);
        cmd->add_option("--sigma", sigma, "Noise standard deviation")->check(CLI::NonNegativeNumber);
        cmd->add_option("--truncation", truncation, "Noise truncation in multiples of sigma");
    };
    add_shape(gen);
    add_globals(gen);

    // run
    auto *run = app.add_subcommand("run", "Run one engine over every signal of a batch file");
    std::string data_path;
    std::string engine = "quantum";
    std::optional<std::size_t> signal_index;
    bool with_ledger = false;
    run->add_option("--data", data_path, "Batch JSON from `generate`")->required();
    run->add_option("--engine", engine, "classical or quantum")->check(CLI::IsMember({"classical", "quantum"}));
    run->add_option("--signal", signal_index, "Only this signal index");
    run->add_flag("--ledger", with_ledger, "Attach the operation-count ledger to every trace");
    add_globals(run);

    // compare
    auto *cmp = app.add_subcommand("compare", "Sparsity experiment: classical vs single/double error");
    std::size_t batches = 100;
    std::size_t cap_factor = 10;
    unsigned threads = 1;
    add_shape(cmp);
    cmp->add_option("--batches", batches, "Number of batches")->check(CLI::PositiveNumber);
    cmp->add_option("--cap-factor", cap_factor, "Safety cap L = factor * sparsity")->check(CLI::PositiveNumber);
    cmp->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
    add_globals(cmp);

    // cost-sweep
    auto *sweep = app.add_subcommand("cost-sweep", "Operation-count sweep over signal lengths (CSV)");
    std::vector<std::size_t> n_values{64, 128, 256, 512, 1024};
    std::size_t trials = 1;
    std::size_t simulate_max = 256;
    bool detail = false;
    sweep->add_option("--n", n_values, "Comma-separated signal lengths")->delimiter(',');
    sweep->add_option("--trials", trials, "Trials per simulated row")->check(CLI::PositiveNumber);
    sweep->add_option("--simulate-max", simulate_max, "Largest n that is simulated; above it the model is used");
    sweep->add_option("--sigma", sigma, "Noise standard deviation")->check(CLI::NonNegativeNumber);
    sweep->add_flag("--detail", detail, "Append per-engine k, std and simulated columns");
    add_globals(sweep);

    // stats
    auto *stats = app.add_subcommand("stats", "Statistical tests on a compare result file");
    std::string results_path;
    stats->add_option("--in", results_path, "Result JSON from `compare`")->required();
    add_globals(stats);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (*gen) {
            qmp::Batch batch = qmp::generate_batch(
                spec_from_flags(n, m, sparsity, signals, sigma, truncation, g.seed));
            emit(g, qmp::dump(qmp::to_json(batch)));
        } else if (*run) {
            qmp::Batch batch = qmp::batch_from_json(qmp::read_json_file(data_path));
            qmp::QmpConfig cfg = make_config(g);
            cfg.stopping.residual_tolerance = g.eps.value_or(0.0);
            cfg.stopping.max_support = g.max_support.value_or(batch.dictionary.n());
            cfg.stopping.max_iterations = g.k_max.value_or(0);
            cfg.validate();
            qmp::Json traces = qmp::Json::array();
            std::size_t first = 0, last = batch.signals.size();
            if (signal_index) {
                if (*signal_index >= batch.signals.size()) {
                    throw qmp::DimensionError("--signal index out of range");
                }
                first = *signal_index;
                last = first + 1;
            }
            for (std::size_t i = first; i < last; ++i) {
                qmp::CostLedger ledger;
                qmp::PursuitTrace trace;
                bool charge = with_ledger && (engine == "classical" || cfg.xi > 0.0);
                if (engine == "classical") {
                    trace = qmp::classical_mp(batch.dictionary, batch.signals[i], cfg.stopping,
                                              charge ? &ledger : nullptr);
                } else {
                    qmp::QmpConfig per_signal = cfg;
                    per_signal.seed = qmp::engine_seed(g.seed, 0, i, 0);
                    trace = qmp::quantum_mp(batch.dictionary, batch.signals[i], per_signal,
                                            charge ? &ledger : nullptr);
                }
                qmp::Json t = qmp::to_json(trace);
                t["signal"] = i;
                if (charge) {
                    t["ledger"] = qmp::to_json(ledger);
                }
                traces.push_back(std::move(t));
            }
            qmp::Json out;
            out["schema_version"] = qmp::kSchemaVersion;
            out["engine"] = engine;
            out["config"] = qmp::to_json(cfg);
            out["traces"] = std::move(traces);
            emit(g, qmp::dump(out));
        } else if (*cmp) {
            qmp::ExperimentOptions options;
            options.spec = spec_from_flags(n, m, sparsity, signals, sigma, truncation, 0);
            options.batches = batches;
            options.qmp = make_config(g);
            options.residual_tolerance = g.eps;
            options.support_cap_factor = cap_factor;
            options.threads = threads;
            emit(g, qmp::dump(qmp::to_json(qmp::run_sparsity_experiment(options))));
        } else if (*sweep) {
            qmp::SweepOptions options;
            options.n_values = n_values;
            options.qmp = make_config(g);
            options.trials = trials;
            options.simulate_max = simulate_max;
            options.noise_sigma = sigma;
            emit(g, qmp::sweep_csv(qmp::run_cost_sweep(options), detail));
        } else if (*stats) {
            qmp::ExperimentResult result =
                qmp::experiment_result_from_json(qmp::read_json_file(results_path));
            std::vector<double> single, dbl;
            for (const auto &b : result.batches) {
                if (!b.failed) {
                    single.push_back(b.ratio_single);
                    dbl.push_back(b.ratio_double);
                }
            }
            if (single.empty()) {
                throw qmp::ValueError("result file holds no usable batches");
            }
            qmp::Json out;
            out["schema_version"] = qmp::kSchemaVersion;
            out["batches_used"] = single.size();
            auto normality = [](const std::vector<double> &v) {
                qmp::Json j;
                if (v.size() < 3) {
                    j["w"] = nullptr;
                    j["p_value"] = nullptr;
                    j["degenerate"] = false;
                    return j;
                }
                qmp::ShapiroWilkResult sw = qmp::shapiro_wilk(v);
                j["w"] = sw.w;
                j["p_value"] = sw.degenerate ? qmp::Json(nullptr) : qmp::Json(sw.p_value);
                j["degenerate"] = sw.degenerate;
                return j;
            };
            out["normality_single"] = normality(single);
            out["normality_double"] = normality(dbl);
            qmp::WilcoxonResult w = qmp::wilcoxon_signed_rank(single, dbl);
            out["wilcoxon"] = {{"p_value", w.p_value},
                               {"statistic", w.statistic},
                               {"n_used", w.n_used},
                               {"degenerate", w.degenerate},
                               {"method", w.method == qmp::WilcoxonMethod::Exact ? "exact" : "normal"}};
            emit(g, qmp::dump(out));
        }
    } catch (const std::exception &e) {
        std::cerr << "qmp: " << e.what() << '\n';
        return kExitData;
    }
    return 0;
}
