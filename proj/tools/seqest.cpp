// seqest — design, execute and certify multistage sampling plans for
// estimating a binomial proportion or a Poisson mean with guaranteed
// precision and confidence.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "seqest/coverage.hpp"
#include "seqest/kernels.hpp"
#include "seqest/montecarlo.hpp"
#include "seqest/plan.hpp"
#include "seqest/serialize.hpp"
#include "seqest/stopping.hpp"
#include "seqest/tuner.hpp"

namespace {

using nlohmann::json;
using namespace seqest;

int resolve_threads(int flag_value) {
    int n = flag_value;
    if (n <= 0) n = static_cast<int>(std::thread::hardware_concurrency());
    if (n <= 0) n = 1;
    if (const char* env = std::getenv("SEQEST_THREADS")) {
        const int cap = std::atoi(env);
        if (cap > 0) n = std::min(n, cap);
    }
    return n;
}

std::vector<double> parse_grid(const std::string& spec) {
    std::vector<double> pts;
    if (spec.rfind("logspace:", 0) == 0) {
        double a = 0, b = 0;
        int count = 0;
        if (std::sscanf(spec.c_str(), "logspace:%lf:%lf:%d", &a, &b, &count) != 3 || count < 2 || a <= 0 || b <= a)
            throw std::invalid_argument("grid spec must be logspace:<lo>:<hi>:<count> with 0 < lo < hi, count >= 2");
        for (int i = 0; i < count; ++i)
            pts.push_back(a * std::pow(b / a, static_cast<double>(i) / (count - 1)));
        return pts;
    }
    if (spec.find(':') != std::string::npos) {
        double a = 0, b = 0, step = 0;
        if (std::sscanf(spec.c_str(), "%lf:%lf:%lf", &a, &b, &step) != 3 || step <= 0 || b < a)
            throw std::invalid_argument("grid spec must be <lo>:<hi>:<step> with step > 0");
        for (double x = a; x <= b + 0.5 * step; x += step) pts.push_back(x);
        return pts;
    }
    std::stringstream ss(spec);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (!tok.empty()) pts.push_back(std::stod(tok));
    }
    if (pts.empty()) throw std::invalid_argument("empty grid spec");
    return pts;
}

void emit(const std::string& text, const std::string& path) {
    if (path.empty()) {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << '\n';
        return;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write output file '" + path + "'");
    out << text;
}

StageSchedule load_plan(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open plan file '" + path + "'");
    json j;
    in >> j;
    return plan_from_json(j);
}

struct GoalFlags {
    std::string mode;
    double eps = 0.0;
    double eps_a = 0.0;
    double eps_r = 0.0;
    double delta = 0.0;

    PrecisionGoal to_goal() const {
        PrecisionGoal g;
        g.mode = mode_from_name(mode);
        g.delta = delta;
        switch (g.mode) {
            case Mode::AbsoluteBinomial:
            case Mode::AbsolutePoissonOpen:
                g.eps_a = eps > 0.0 ? eps : eps_a;
                break;
            case Mode::RelativeBinomialInverse:
            case Mode::RelativeBinomialOpen:
            case Mode::RelativePoissonOpen:
                g.eps_r = eps > 0.0 ? eps : eps_r;
                break;
            case Mode::MixedBinomial:
            case Mode::MixedPoisson:
                g.eps_a = eps_a;
                g.eps_r = eps_r;
                break;
        }
        g.validate();
        return g;
    }
};

void add_goal_flags(CLI::App* cmd, GoalFlags& gf) {
    cmd->add_option("--mode", gf.mode,
                    "abs-binomial | rel-binomial-inverse | rel-binomial-open | mixed-binomial | mixed-poisson | "
                    "abs-poisson-open | rel-poisson-open")
        ->required();
    cmd->add_option("--eps", gf.eps, "tolerance for single-tolerance modes");
    cmd->add_option("--eps-a", gf.eps_a, "absolute tolerance (mixed modes)");
    cmd->add_option("--eps-r", gf.eps_r, "relative tolerance (mixed modes)");
    cmd->add_option("--delta", gf.delta, "risk level, coverage target is 1-delta")->required();
}

std::string plan_table(const StageSchedule& plan) {
    std::ostringstream os;
    os << "mode            " << mode_name(plan.mode) << "\n";
    os << "delta           " << plan.goal.delta << "\n";
    if (plan.goal.eps_a > 0) os << "eps_a           " << plan.goal.eps_a << "\n";
    if (plan.goal.eps_r > 0) os << "eps_r           " << plan.goal.eps_r << "\n";
    os << "zeta            " << plan.zeta << "\n";
    os << "tau             " << plan.tau << "\n";
    if (plan.is_open()) {
        os << "open-ended      n1=" << plan.open_ended->n1 << " growth=" << plan.open_ended->growth << "\n";
        os << "stages (first 8)";
        for (int ell = 1; ell <= 8; ++ell) os << ' ' << plan.stage_at(ell);
        os << " ...\n";
    } else {
        os << (plan.is_inverse() ? "success targets " : "sample sizes    ");
        for (std::int64_t v : plan.stages) os << v << ' ';
        os << "\n";
        os << "stage budget    " << plan.per_stage_budget.front() << "\n";
    }
    return os.str();
}

int cmd_design(const GoalFlags& gf, std::optional<double> zeta, double rho, int tau, std::int64_t n1, double growth,
               const std::string& format, const std::string& out) {
    const PrecisionGoal goal = gf.to_goal();
    const StageSchedule plan =
        mode_is_open(goal.mode) ? build_open_ended(goal, zeta, tau, n1, growth) : build_fixed(goal, zeta, rho);
    if (format == "table")
        emit(plan_table(plan), out);
    else
        emit(plan_to_json(plan).dump(2) + "\n", out);
    return 0;
}

int cmd_evaluate(const std::string& plan_path, const std::string& grid_spec, int stage_cap, int threads,
                 const std::string& format, const std::string& out) {
    const StageSchedule plan = load_plan(plan_path);
    const std::vector<double> grid = parse_grid(grid_spec);
    const std::vector<CoverageReport> reports = sweep_coverage(plan, grid, stage_cap, threads);
    if (format == "csv") {
        emit("# plan_hash=" + plan_hash(plan) + "\n" + coverage_csv(reports), out);
    } else if (format == "table") {
        std::ostringstream os;
        os << "theta        coverage     asn          truncation\n";
        for (const CoverageReport& r : reports) {
            os.precision(10);
            os << r.theta << "  " << r.coverage << "  " << r.asn << "  " << r.truncation_bound << "\n";
        }
        emit(os.str(), out);
    } else {
        json j;
        j["schema_version"] = kSchemaVersion;
        j["plan_hash"] = plan_hash(plan);
        j["reports"] = json::array();
        for (const CoverageReport& r : reports) j["reports"].push_back(coverage_to_json(r));
        emit(j.dump(2) + "\n", out);
    }
    return 0;
}

int cmd_simulate(const std::string& plan_path, const std::string& grid_spec, std::int64_t trials, std::uint64_t seed,
                 int stage_cap, std::int64_t draw_cap, int threads, const std::string& format,
                 const std::string& out) {
    const StageSchedule plan = load_plan(plan_path);
    const std::vector<double> grid = parse_grid(grid_spec);
    std::vector<MonteCarloReport> reports;
    reports.reserve(grid.size());
    for (double theta : grid)
        reports.push_back(simulate_coverage(plan, theta, trials, seed, threads, stage_cap, draw_cap));
    if (format == "csv") {
        emit("# plan_hash=" + plan_hash(plan) + "\n" + montecarlo_csv(reports), out);
    } else {
        json j;
        j["schema_version"] = kSchemaVersion;
        j["plan_hash"] = plan_hash(plan);
        j["reports"] = json::array();
        for (const MonteCarloReport& r : reports) j["reports"].push_back(montecarlo_to_json(r));
        emit(j.dump(2) + "\n", out);
    }
    return 0;
}

int cmd_tune(const GoalFlags& gf, double rho, const std::string& grid_spec, double tol, int threads,
             const std::string& out) {
    const PrecisionGoal goal = gf.to_goal();
    VerificationGrid grid;
    if (grid_spec == "auto") {
        grid = default_tuner_grid(goal, rho);
    } else {
        grid.points = parse_grid(grid_spec);
        grid.provenance = VerificationGrid::Provenance::UserSupplied;
    }
    const TuneResult res = tune_zeta(goal, rho, grid, tol, threads);
    emit(tune_to_json(res).dump(2) + "\n", out);
    std::cerr << "zeta_star = " << res.zeta_star << " (default " << default_zeta(res.plan.tau, goal.mode) << ", "
              << grid.points.size() << " grid points)\n";
    return 0;
}

int cmd_run(const std::string& plan_path, const std::string& data_path, double theta, std::uint64_t seed,
            int stage_cap, std::int64_t draw_cap, const std::string& out) {
    const StageSchedule plan = load_plan(plan_path);
    const bool binomial = mode_is_binomial(plan.mode);
    EstimationResult res;
    if (!data_path.empty()) {
        VectorSource src(parse_observations(data_path, binomial));
        res = run_plan(plan, src, stage_cap, draw_cap);
    } else {
        if (!(theta > 0.0)) throw std::invalid_argument("run requires --data FILE or --theta with a seed");
        if (binomial) {
            BernoulliSource src(theta, seed, 0);
            res = run_plan(plan, src, stage_cap, draw_cap);
        } else {
            PoissonSource src(theta, seed, 0);
            res = run_plan(plan, src, stage_cap, draw_cap);
        }
    }
    json j = result_to_json(res);
    j["plan_hash"] = plan_hash(plan);
    emit(j.dump(2) + "\n", out);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"multistage sequential estimation of binomial and Poisson parameters"};
    app.require_subcommand(1);

    GoalFlags gf;
    double zeta_flag = 0.0;
    double rho = 0.5;
    int tau_flag = 3;
    std::int64_t n1 = 10;
    double growth = 1.5;
    std::string format = "json";
    std::string out;
    std::string plan_path;
    std::string grid_spec = "auto";
    std::string data_path;
    double theta = 0.0;
    double tol = 1e-4;
    std::int64_t trials = 100000;
    std::uint64_t seed = 20080902;
    int stage_cap = 200;
    std::int64_t draw_cap = 1000000000;
    int threads_flag = 0;

    CLI::App* design = app.add_subcommand("design", "materialize a stage schedule for a precision goal");
    add_goal_flags(design, gf);
    design->add_option("--zeta", zeta_flag, "error-budget factor; default is the theorem bound");
    design->add_option("--rho", rho, "schedule coarseness (fixed schedules)")->capture_default_str();
    design->add_option("--tau", tau_flag, "budget-halving onset (open-ended)")->capture_default_str();
    design->add_option("--n1", n1, "first stage size (open-ended)")->capture_default_str();
    design->add_option("--growth", growth, "stage growth ratio > 1 (open-ended)")->capture_default_str();
    design->add_option("--format", format, "json | table")->capture_default_str();
    design->add_option("-o,--output", out, "output path (default stdout)");

    CLI::App* evaluate = app.add_subcommand("evaluate", "exact coverage / ASN sweep over a parameter grid");
    evaluate->add_option("--plan", plan_path, "plan JSON produced by design")->required();
    evaluate->add_option("--grid", grid_spec, "lo:hi:step, logspace:lo:hi:count, or comma list")->required();
    evaluate->add_option("--stage-cap", stage_cap, "stage cap for open-ended plans")->capture_default_str();
    evaluate->add_option("--threads", threads_flag, "worker threads (0 = auto, capped by SEQEST_THREADS)");
    evaluate->add_option("--format", format, "json | csv | table")->capture_default_str();
    evaluate->add_option("-o,--output", out, "output path (default stdout)");

    CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo coverage / ASN estimate");
    simulate->add_option("--plan", plan_path, "plan JSON produced by design")->required();
    simulate->add_option("--grid", grid_spec, "parameter grid or single value")->required();
    simulate->add_option("--trials", trials, "trials per grid point")->capture_default_str();
    simulate->add_option("--seed", seed, "base seed; trial substreams derive from (seed, trial)")->capture_default_str();
    simulate->add_option("--stage-cap", stage_cap, "stage cap for open-ended plans")->capture_default_str();
    simulate->add_option("--draw-cap", draw_cap, "draw cap for inverse sampling")->capture_default_str();
    simulate->add_option("--threads", threads_flag, "worker threads (0 = auto, capped by SEQEST_THREADS)");
    simulate->add_option("--format", format, "json | csv")->capture_default_str();
    simulate->add_option("-o,--output", out, "output path (default stdout)");

    CLI::App* tune = app.add_subcommand("tune", "bisection search for the largest certified zeta");
    add_goal_flags(tune, gf);
    tune->add_option("--rho", rho, "schedule coarseness")->capture_default_str();
    tune->add_option("--grid", grid_spec, "verification grid ('auto' = Q grids / default grid)")->capture_default_str();
    tune->add_option("--tol", tol, "relative bisection width")->capture_default_str();
    tune->add_option("--threads", threads_flag, "worker threads (0 = auto, capped by SEQEST_THREADS)");
    tune->add_option("-o,--output", out, "output path (default stdout)");

    CLI::App* run = app.add_subcommand("run", "execute one estimation on recorded or synthetic observations");
    run->add_option("--plan", plan_path, "plan JSON produced by design")->required();
    run->add_option("--data", data_path, "observation file, one integer per line");
    run->add_option("--theta", theta, "parameter for a synthetic seeded stream");
    run->add_option("--seed", seed, "seed for the synthetic stream")->capture_default_str();
    run->add_option("--stage-cap", stage_cap, "stage cap for open-ended plans")->capture_default_str();
    run->add_option("--draw-cap", draw_cap, "draw cap for inverse sampling")->capture_default_str();
    run->add_option("-o,--output", out, "output path (default stdout)");

    try {
        app.parse(argc, argv);
        const int threads = resolve_threads(threads_flag);
        std::optional<double> zeta;
        if (zeta_flag > 0.0) zeta = zeta_flag;
        if (design->parsed()) return cmd_design(gf, zeta, rho, tau_flag, n1, growth, format, out);
        if (evaluate->parsed()) return cmd_evaluate(plan_path, grid_spec, stage_cap, threads, format, out);
        if (simulate->parsed())
            return cmd_simulate(plan_path, grid_spec, trials, seed, stage_cap, draw_cap, threads, format, out);
        if (tune->parsed()) return cmd_tune(gf, rho, grid_spec, tol, threads, out);
        if (run->parsed()) return cmd_run(plan_path, data_path, theta, seed, stage_cap, draw_cap, out);
        return 1;
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const RunError& e) {
        std::cerr << "run failed: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
