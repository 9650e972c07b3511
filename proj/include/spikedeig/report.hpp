#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "spikedeig/block.hpp"
#include "spikedeig/centering.hpp"
#include "spikedeig/concentration.hpp"
#include "spikedeig/montecarlo.hpp"

namespace spikedeig {

using Json = nlohmann::ordered_json;

// Field names match the struct members; non-finite doubles become null.
Json to_json(const ExperimentReport& report);  // aggregate only, no records
Json to_json(const ReplicateRecord& record);
Json to_json(const ConsistencyReport& report);  // aggregate only
Json to_json(const SmReport& report);
Json to_json(const HwReport& report);
Json to_json(const PolynomialCoefficients& coeffs);
Json to_json(const XRoot& root);
Json to_json(const CenteringBundle& bundle);
Json to_json(const MasterResiduals& residuals);
Json to_json(const SeriesReport& report);

// One record per line. `context` fields (variant, nu, n, N, M, ...) are
// prepended to every line.
void write_records_jsonl(const std::string& path, const std::vector<ReplicateRecord>& records,
                         const Json& context);

// Header "index,seed,ok,value" then one row per record, value empty when the
// record was flagged.
void write_samples_csv(const std::string& path, const std::vector<ReplicateRecord>& records);

// Pretty-printed with a trailing newline. Throws Error(Io).
void write_json(const std::string& path, const Json& value);

}  // namespace spikedeig
