#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "qmp/core.hpp"
#include "qmp/cost_model.hpp"
#include "qmp/pursuit.hpp"
#include "qmp/sample_tree.hpp"
#include "qmp/synthgen.hpp"

// JSON encodings. Doubles are written in their shortest round-trip decimal
// form, so every finite 64-bit value reloads bit for bit. 128-bit operation counters
// are written as decimal strings.

namespace qmp {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

/// Malformed or inconsistent input file.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

Json to_json(const Signal &signal);
Signal signal_from_json(const Json &j);

/// {"n":..., "m":..., "atoms":[[col0], [col1], ...]}
Json to_json(const Dictionary &dict);
Dictionary dictionary_from_json(const Json &j);

/// {"m":..., "entries":[[index, value], ...]} in increasing index order.
Json to_json(const SparseSolution &x);
SparseSolution solution_from_json(const Json &j);

Json to_json(const StoppingRule &rule);
StoppingRule stopping_from_json(const Json &j);

Json to_json(const QmpConfig &cfg);
QmpConfig qmp_config_from_json(const Json &j);

Json to_json(const BatchSpec &spec);
BatchSpec batch_spec_from_json(const Json &j);

/// {"schema_version", "spec", "dictionary", "codes", "signals"}
Json to_json(const Batch &batch);
Batch batch_from_json(const Json &j);

Json to_json(const PursuitTrace &trace);
PursuitTrace trace_from_json(const Json &j);

Json to_json(const CostLedger &ledger);
CostLedger ledger_from_json(const Json &j);

/// Level-ordered node list: {"leaf_count", "padded", "leaves", "levels": [[root], [..], ...]}.
Json debug_dump(const SampleTree &tree);

Json read_json_file(const std::filesystem::path &path);
/// Writes `j` with two-space indent and a trailing newline.
void write_json_file(const std::filesystem::path &path, const Json &j);
std::string dump(const Json &j);

}  // namespace qmp
