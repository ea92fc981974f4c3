#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "seqest/coverage.hpp"
#include "seqest/montecarlo.hpp"
#include "seqest/plan.hpp"
#include "seqest/stopping.hpp"
#include "seqest/tuner.hpp"

// Canonical JSON documents (schema_version 1) and the flat CSV forms used by
// the CLI and golden tests. nlohmann::json objects keep keys sorted, so a
// document's dump() is canonical and hashable.

namespace seqest {

inline constexpr int kSchemaVersion = 1;

nlohmann::json goal_to_json(const PrecisionGoal& goal);
PrecisionGoal goal_from_json(const nlohmann::json& j);

// Plan document: includes "plan_hash", the FNV-1a 64 hash (hex) of the
// canonical dump with the hash field absent.
nlohmann::json plan_to_json(const StageSchedule& plan);
StageSchedule plan_from_json(const nlohmann::json& j);
std::string plan_hash(const StageSchedule& plan);

nlohmann::json result_to_json(const EstimationResult& res);
nlohmann::json coverage_to_json(const CoverageReport& rpt);
nlohmann::json montecarlo_to_json(const MonteCarloReport& rpt);
nlohmann::json tune_to_json(const TuneResult& res);

// CSV: one row per report; stage_mass columns padded to the widest row.
std::string coverage_csv(const std::vector<CoverageReport>& reports);
std::string montecarlo_csv(const std::vector<MonteCarloReport>& reports);

// Observation file: one nonnegative integer per line, surrounding whitespace
// tolerated, empty lines rejected; binomial mode additionally requires
// values in {0,1}. Errors name the offending line number.
std::vector<std::int64_t> parse_observations(const std::string& path, bool binomial);

}  // namespace seqest
