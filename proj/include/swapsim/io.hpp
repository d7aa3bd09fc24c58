// CSV and JSON persistence for ensembles, toy runs and analysis reports.

#pragma once

#include "swapsim/analysis.hpp"
#include "swapsim/engine.hpp"
#include "swapsim/toys.hpp"

#include <json.hpp>

#include <iosfwd>
#include <vector>

namespace swapsim {

using Json = nlohmann::ordered_json;

/// Header: trial_id,a,b,A,B,c_outcome,heralded
void write_ensemble_csv(std::ostream& out, const Ensemble& ensemble);
/// Throws std::runtime_error on a malformed header or row.
std::vector<TrialRecord> read_ensemble_csv(std::istream& in);

/// {"meta": ..., "records": [...]}; `meta` is copied verbatim.
Json ensemble_to_json(const Ensemble& ensemble, const Json& meta);
Ensemble ensemble_from_json(const Json& doc);

/// Header: trial_id,a,b,A,B,lambda_A,lambda_B,accepted (lambda empty when absent)
void write_toy_csv(std::ostream& out, const std::vector<ToyTrial>& trials);
/// Header: trial_id,alice,bob,verdict
void write_rps_csv(std::ostream& out, const std::vector<RpsTrial>& trials);

Json config_meta(const ExperimentConfig& config);

Json to_json(const CorrelatorTable& table);
Json to_json(const CHSHResult& result);
Json to_json(const CITestResult& result);
Json to_json(const NdaReport& report);
Json to_json(const FragilityReport& report);
Json to_json(const TeleportReport& report);

}  // namespace swapsim
