#include "qmp/io.hpp"

#include <fstream>
#include <sstream>

namespace qmp {

namespace {

const Json &field(const Json &j, const char *key) {
    if (!j.is_object() || !j.contains(key)) {
        throw FormatError(std::string("missing field \"") + key + "\"");
    }
    return j.at(key);
}

template <class T>
T get(const Json &j, const char *key) {
    try {
        return field(j, key).get<T>();
    } catch (const nlohmann::json::exception &e) {
        throw FormatError(std::string("field \"") + key + "\": " + e.what());
    }
}

}  // namespace

Json to_json(const Signal &signal) {
    Json j;
    j["values"] = std::vector<double>(signal.values().begin(), signal.values().end());
    return j;
}

Signal signal_from_json(const Json &j) {
    return Signal(get<std::vector<double>>(j, "values"));
}

Json to_json(const Dictionary &dict) {
    Json atoms = Json::array();
    for (std::size_t k = 0; k < dict.m(); ++k) {
        auto col = dict.atom(k);
        atoms.push_back(std::vector<double>(col.begin(), col.end()));
    }
    Json j;
    j["n"] = dict.n();
    j["m"] = dict.m();
    j["atoms"] = std::move(atoms);
    return j;
}

Dictionary dictionary_from_json(const Json &j) {
    auto n = get<std::size_t>(j, "n");
    auto m = get<std::size_t>(j, "m");
    auto columns = get<std::vector<std::vector<double>>>(j, "atoms");
    if (columns.size() != m) {
        throw FormatError("dictionary: \"atoms\" has " + std::to_string(columns.size()) +
                          " columns, expected m = " + std::to_string(m));
    }
    for (const auto &col : columns) {
        if (col.size() != n) {
            throw FormatError("dictionary: column length does not match n");
        }
    }
    return Dictionary::from_columns(columns);
}

Json to_json(const SparseSolution &x) {
    Json entries = Json::array();
    for (const auto &[index, value] : x.entries()) {
        entries.push_back(Json::array({index, value}));
    }
    Json j;
    j["m"] = x.dimension();
    j["entries"] = std::move(entries);
    return j;
}

SparseSolution solution_from_json(const Json &j) {
    SparseSolution x(get<std::size_t>(j, "m"));
    for (const auto &entry : field(j, "entries")) {
        if (!entry.is_array() || entry.size() != 2) {
            throw FormatError("solution: entries must be [index, value] pairs");
        }
        x.set(entry[0].get<std::size_t>(), entry[1].get<double>());
    }
    return x;
}

Json to_json(const StoppingRule &rule) {
    Json j;
    j["max_support"] = rule.max_support;
    j["residual_tolerance"] = rule.residual_tolerance;
    j["max_iterations"] = rule.max_iterations;
    return j;
}

StoppingRule stopping_from_json(const Json &j) {
    StoppingRule rule;
    rule.max_support = get<std::size_t>(j, "max_support");
    rule.residual_tolerance = get<double>(j, "residual_tolerance");
    rule.max_iterations = get<std::size_t>(j, "max_iterations");
    return rule;
}

Json to_json(const QmpConfig &cfg) {
    Json j;
    j["xi"] = cfg.xi;
    j["delta"] = cfg.delta;
    j["variant"] = to_string(cfg.variant);
    j["scale_error_by_residual_norm"] = cfg.scale_error_by_residual_norm;
    j["inject_failures"] = cfg.inject_failures;
    j["stopping"] = to_json(cfg.stopping);
    j["seed"] = cfg.seed;
    j["k_max"] = cfg.k_max;
    return j;
}

QmpConfig qmp_config_from_json(const Json &j) {
    QmpConfig cfg;
    cfg.xi = get<double>(j, "xi");
    cfg.delta = get<double>(j, "delta");
    cfg.variant = parse_variant(get<std::string>(j, "variant"));
    cfg.scale_error_by_residual_norm = get<bool>(j, "scale_error_by_residual_norm");
    cfg.inject_failures = get<bool>(j, "inject_failures");
    cfg.stopping = stopping_from_json(field(j, "stopping"));
    cfg.seed = get<std::uint64_t>(j, "seed");
    cfg.k_max = get<std::size_t>(j, "k_max");
    return cfg;
}

Json to_json(const BatchSpec &spec) {
    Json j;
    j["n"] = spec.n;
    j["m"] = spec.m;
    j["sparsity"] = spec.sparsity;
    j["signals_per_batch"] = spec.signals_per_batch;
    j["noise_sigma"] = spec.noise_sigma;
    j["noise_truncation"] = spec.noise_truncation;
    j["seed"] = spec.seed;
    return j;
}

BatchSpec batch_spec_from_json(const Json &j) {
    BatchSpec spec;
    spec.n = get<std::size_t>(j, "n");
    spec.m = get<std::size_t>(j, "m");
    spec.sparsity = get<std::size_t>(j, "sparsity");
    spec.signals_per_batch = get<std::size_t>(j, "signals_per_batch");
    spec.noise_sigma = get<double>(j, "noise_sigma");
    spec.noise_truncation = get<double>(j, "noise_truncation");
    spec.seed = get<std::uint64_t>(j, "seed");
    return spec;
}

Json to_json(const Batch &batch) {
    Json codes = Json::array();
    for (const auto &c : batch.codes) {
        codes.push_back(to_json(c));
    }
    Json signals = Json::array();
    for (const auto &s : batch.signals) {
        signals.push_back(to_json(s));
    }
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["spec"] = to_json(batch.spec);
    j["dictionary"] = to_json(batch.dictionary);
    j["codes"] = std::move(codes);
    j["signals"] = std::move(signals);
    return j;
}

Batch batch_from_json(const Json &j) {
    if (field(j, "schema_version") != kSchemaVersion) {
        throw FormatError("batch: unsupported schema_version");
    }
    BatchSpec spec = batch_spec_from_json(field(j, "spec"));
    Dictionary dict = dictionary_from_json(field(j, "dictionary"));
    std::vector<SparseSolution> codes;
    for (const auto &c : field(j, "codes")) {
        codes.push_back(solution_from_json(c));
    }
    std::vector<Signal> signals;
    for (const auto &s : field(j, "signals")) {
        signals.push_back(signal_from_json(s));
        if (signals.back().size() != dict.n()) {
            throw FormatError("batch: signal length does not match dictionary");
        }
    }
    return Batch{spec, std::move(dict), std::move(codes), std::move(signals)};
}

Json to_json(const PursuitTrace &trace) {
    Json iterations = Json::array();
    for (const auto &it : trace.iterations) {
        Json r;
        r["chosen_index"] = it.chosen_index;
        r["coefficient"] = it.coefficient;
        r["exact_coefficient"] = it.exact_coefficient;
        r["residual_norm_sq_after"] = it.residual_norm_sq_after;
        r["failure_injected"] = it.failure_injected;
        iterations.push_back(std::move(r));
    }
    Json j;
    j["iterations"] = std::move(iterations);
    j["solution"] = to_json(trace.solution);
    j["termination_reason"] = to_string(trace.termination);
    return j;
}

PursuitTrace trace_from_json(const Json &j) {
    PursuitTrace trace;
    for (const auto &r : field(j, "iterations")) {
        IterationRecord it;
        it.chosen_index = get<std::size_t>(r, "chosen_index");
        it.coefficient = get<double>(r, "coefficient");
        it.exact_coefficient = get<double>(r, "exact_coefficient");
        it.residual_norm_sq_after = get<double>(r, "residual_norm_sq_after");
        it.failure_injected = get<bool>(r, "failure_injected");
        trace.iterations.push_back(it);
    }
    trace.solution = solution_from_json(field(j, "solution"));
    trace.termination = parse_termination(get<std::string>(j, "termination_reason"));
    return trace;
}

Json to_json(const CostLedger &ledger) {
    Json per_iteration = Json::array();
    for (const auto &c : ledger.per_iteration) {
        Json r;
        r["classical_charge"] = to_string(c.classical);
        r["quantum_charge"] = to_string(c.quantum);
        r["atom_support_size"] = c.atom_support;
        per_iteration.push_back(std::move(r));
    }
    Json params;
    params["n"] = ledger.params.n;
    params["m"] = ledger.params.m;
    params["xi"] = ledger.params.xi;
    params["delta"] = ledger.params.delta;
    params["k_max"] = ledger.params.k_max;
    Json j;
    j["classical_ops"] = to_string(ledger.classical_ops);
    j["quantum_ops"] = to_string(ledger.quantum_ops);
    j["classical_init_ops"] = to_string(ledger.classical_init_ops);
    j["quantum_init_ops"] = to_string(ledger.quantum_init_ops);
    j["classical_init_calls"] = ledger.classical_init_calls;
    j["quantum_init_calls"] = ledger.quantum_init_calls;
    j["per_iteration"] = std::move(per_iteration);
    j["params"] = std::move(params);
    return j;
}

CostLedger ledger_from_json(const Json &j) {
    CostLedger ledger;
    ledger.classical_ops = parse_op_count(get<std::string>(j, "classical_ops"));
    ledger.quantum_ops = parse_op_count(get<std::string>(j, "quantum_ops"));
    ledger.classical_init_ops = parse_op_count(get<std::string>(j, "classical_init_ops"));
    ledger.quantum_init_ops = parse_op_count(get<std::string>(j, "quantum_init_ops"));
    ledger.classical_init_calls = get<std::size_t>(j, "classical_init_calls");
    ledger.quantum_init_calls = get<std::size_t>(j, "quantum_init_calls");
    for (const auto &r : field(j, "per_iteration")) {
        ledger.per_iteration.push_back({parse_op_count(get<std::string>(r, "classical_charge")),
                                        parse_op_count(get<std::string>(r, "quantum_charge")),
                                        get<std::size_t>(r, "atom_support_size")});
    }
    const Json &p = field(j, "params");
    ledger.params = {get<std::size_t>(p, "n"), get<std::size_t>(p, "m"), get<double>(p, "xi"),
                     get<double>(p, "delta"), get<std::size_t>(p, "k_max")};
    return ledger;
}

Json debug_dump(const SampleTree &tree) {
    Json levels = Json::array();
    auto sums = tree.node_sums();
    std::size_t start = 0;
    for (std::size_t width = 1; width <= tree.padded_size(); width *= 2) {
        levels.push_back(std::vector<double>(sums.begin() + static_cast<std::ptrdiff_t>(start),
                                             sums.begin() + static_cast<std::ptrdiff_t>(start + width)));
        start += width;
    }
    Json j;
    j["leaf_count"] = tree.size();
    j["padded"] = tree.padded_size();
    j["leaves"] = std::vector<double>(tree.values().begin(), tree.values().end());
    j["levels"] = std::move(levels);
    return j;
}

Json read_json_file(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw FormatError("cannot open " + path.string());
    }
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::parse_error &e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

std::string dump(const Json &j) {
    return j.dump(2) + "\n";
}

void write_json_file(const std::filesystem::path &path, const Json &j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw FormatError("cannot write " + path.string());
    }
    out << dump(j);
}

}  // namespace qmp
