#include "seqest/serialize.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>

namespace seqest {
namespace {

using nlohmann::json;

std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[v & 0xF];
        v >>= 4;
    }
    return out;
}

json finite_or_null(double v) {
    if (std::isnan(v)) return nullptr;
    return v;
}

double null_or_nan(const json& j) {
    if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
    return j.get<double>();
}

std::string csv_num(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

}  // namespace

json goal_to_json(const PrecisionGoal& goal) {
    return json{{"mode", mode_name(goal.mode)},
                {"eps_a", goal.eps_a},
                {"eps_r", goal.eps_r},
                {"delta", goal.delta}};
}

PrecisionGoal goal_from_json(const json& j) {
    PrecisionGoal g;
    g.mode = mode_from_name(j.at("mode").get<std::string>());
    g.eps_a = j.at("eps_a").get<double>();
    g.eps_r = j.at("eps_r").get<double>();
    g.delta = j.at("delta").get<double>();
    g.validate();
    return g;
}

json plan_to_json(const StageSchedule& plan) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["goal"] = goal_to_json(plan.goal);
    j["zeta"] = plan.zeta;
    j["rho"] = finite_or_null(plan.rho);
    j["nu"] = finite_or_null(plan.nu);
    j["tau"] = plan.tau;
    j["stages"] = plan.stages;
    j["per_stage_budget"] = plan.per_stage_budget;
    if (plan.open_ended) {
        j["open_ended"] = json{{"n1", plan.open_ended->n1},
                               {"growth", plan.open_ended->growth},
                               {"tau", plan.open_ended->tau}};
    } else {
        j["open_ended"] = nullptr;
    }
    j["plan_hash"] = hex64(fnv1a64(j.dump()));
    return j;
}

StageSchedule plan_from_json(const json& j) {
    if (j.at("schema_version").get<int>() != kSchemaVersion)
        throw std::invalid_argument("seqest: unsupported plan schema_version");
    StageSchedule plan;
    plan.goal = goal_from_json(j.at("goal"));
    plan.mode = plan.goal.mode;
    plan.zeta = j.at("zeta").get<double>();
    plan.rho = null_or_nan(j.at("rho"));
    plan.nu = null_or_nan(j.at("nu"));
    plan.tau = j.at("tau").get<int>();
    plan.stages = j.at("stages").get<std::vector<std::int64_t>>();
    plan.per_stage_budget = j.at("per_stage_budget").get<std::vector<double>>();
    if (!j.at("open_ended").is_null()) {
        OpenEndedConfig cfg;
        cfg.n1 = j.at("open_ended").at("n1").get<std::int64_t>();
        cfg.growth = j.at("open_ended").at("growth").get<double>();
        cfg.tau = j.at("open_ended").at("tau").get<int>();
        plan.open_ended = cfg;
    }
    return plan;
}

std::string plan_hash(const StageSchedule& plan) {
    json j = plan_to_json(plan);
    j.erase("plan_hash");
    return hex64(fnv1a64(j.dump()));
}

json result_to_json(const EstimationResult& res) {
    return json{{"schema_version", kSchemaVersion},
                {"estimate", res.estimate},
                {"stop_stage", res.stop_stage},
                {"total_samples", res.total_samples},
                {"total_count", res.total_count},
                {"trail", res.trail}};
}

json coverage_to_json(const CoverageReport& rpt) {
    return json{{"theta", rpt.theta},
                {"coverage", rpt.coverage},
                {"asn", rpt.asn},
                {"truncation_bound", rpt.truncation_bound},
                {"stage_mass", rpt.stage_mass},
                {"stage_lower_escape", rpt.stage_lower_escape},
                {"stage_upper_escape", rpt.stage_upper_escape}};
}

json montecarlo_to_json(const MonteCarloReport& rpt) {
    return json{{"theta", rpt.theta},
                {"trials", rpt.trials},
                {"coverage_hat", rpt.coverage_hat},
                {"coverage_stderr", rpt.coverage_stderr},
                {"asn_hat", rpt.asn_hat},
                {"asn_stderr", rpt.asn_stderr},
                {"seed", rpt.seed},
                {"failures", rpt.failures}};
}

json tune_to_json(const TuneResult& res) {
    json cert = json::array();
    for (const CoverageReport& r : res.certificate) cert.push_back(coverage_to_json(r));
    json steps = json::array();
    for (const TuneStep& s : res.transcript)
        steps.push_back(json{{"zeta", s.zeta}, {"min_coverage", s.min_coverage}, {"feasible", s.feasible}});
    return json{{"schema_version", kSchemaVersion},
                {"zeta_star", res.zeta_star},
                {"plan", plan_to_json(res.plan)},
                {"certificate", cert},
                {"transcript", steps}};
}

std::string coverage_csv(const std::vector<CoverageReport>& reports) {
    std::size_t width = 0;
    for (const CoverageReport& r : reports) width = std::max(width, r.stage_mass.size());
    std::ostringstream os;
    os << "theta,coverage,asn,truncation_bound";
    for (std::size_t i = 1; i <= width; ++i) os << ",stage_mass_" << i;
    os << "\n";
    for (const CoverageReport& r : reports) {
        os << csv_num(r.theta) << ',' << csv_num(r.coverage) << ',' << csv_num(r.asn) << ','
           << csv_num(r.truncation_bound);
        for (std::size_t i = 0; i < width; ++i)
            os << ',' << csv_num(i < r.stage_mass.size() ? r.stage_mass[i] : 0.0);
        os << "\n";
    }
    return os.str();
}

std::vector<std::int64_t> parse_observations(const std::string& path, bool binomial) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("seqest: cannot open observation file '" + path + "'");
    std::vector<std::int64_t> out;
    std::string line;
    for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
        const auto a = line.find_first_not_of(" \t\r");
        const auto b = line.find_last_not_of(" \t\r");
        if (a == std::string::npos)
            throw std::runtime_error("seqest: empty line " + std::to_string(lineno) + " in '" + path + "'");
        const std::string tok = line.substr(a, b - a + 1);
        std::int64_t v = 0;
        std::size_t used = 0;
        try {
            v = std::stoll(tok, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != tok.size())
            throw std::runtime_error("seqest: non-integer value '" + tok + "' at line " + std::to_string(lineno) +
                                     " in '" + path + "'");
        if (v < 0)
            throw std::runtime_error("seqest: negative value at line " + std::to_string(lineno) + " in '" + path +
                                     "'");
        if (binomial && v > 1)
            throw std::runtime_error("seqest: binomial observation must be 0 or 1 at line " +
                                     std::to_string(lineno) + " in '" + path + "'");
        out.push_back(v);
    }
    return out;
}

std::string montecarlo_csv(const std::vector<MonteCarloReport>& reports) {
    std::ostringstream os;
    os << "theta,trials,coverage_hat,coverage_stderr,asn_hat,asn_stderr,seed,failures\n";
    for (const MonteCarloReport& r : reports) {
        os << csv_num(r.theta) << ',' << r.trials << ',' << csv_num(r.coverage_hat) << ','
           << csv_num(r.coverage_stderr) << ',' << csv_num(r.asn_hat) << ',' << csv_num(r.asn_stderr) << ','
           << r.seed << ',' << r.failures << "\n";
    }
    return os.str();
}

}  // namespace seqest
