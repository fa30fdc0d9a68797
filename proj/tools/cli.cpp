#include "cli.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "cascade/analytic.hpp"
#include "cascade/beams.hpp"
#include "cascade/montecarlo.hpp"

namespace cascade::cli {

namespace {

struct RunConfig {
    std::string command;
    std::string model = "basic";
    double lambda = 0.1;
    double R = 1.0;
    double p = 0.5;
    double K = 0.1;
    std::string stages = "5";
    std::string theta_db = "-10:30:1";
    std::string n_mode = "geometric";
    double tolerance = 1e-9;
    int max_iterations = 200;
    double gain = 1.0;
    std::string k_list = "1,2,3,4";
    int k = 4;
    int max_k = kDefaultMaxBestBeamK;
    std::string kind = "coverage";
    std::int64_t samples = 100000;
    std::uint64_t seed = 1;
    int mc_stages = 0;
    int threads = 0;
    std::string output;
};

std::string num(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

std::optional<int> parse_stages(const std::string& text) {
    if (text == "inf" || text == "infinite") return std::nullopt;
    try {
        std::size_t used = 0;
        const int n = std::stoi(text, &used);
        if (used == text.size()) return n;
    } catch (const std::exception&) {
    }
    throw ConfigError("--stages must be a positive integer or 'inf', got '" + text + "'");
}

double parse_double(const std::string& text, const char* what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used == text.size()) return v;
    } catch (const std::exception&) {
    }
    throw ConfigError(std::string(what) + ": cannot parse '" + text + "'");
}

/// "min:max:step" or a single value, in dB.
std::vector<double> parse_theta(const std::string& text) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
    if (parts.size() == 1) return {parse_double(parts[0], "--theta-db")};
    if (parts.size() != 3) throw ConfigError("--theta-db must be 'min:max:step' or a single value");
    return theta_grid_db(parse_double(parts[0], "--theta-db"), parse_double(parts[1], "--theta-db"),
                         parse_double(parts[2], "--theta-db"));
}

std::vector<int> parse_k_list(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ',');) {
        const double v = parse_double(item, "--k-list");
        if (v != std::floor(v) || v < 0) throw ConfigError("--k-list entries must be non-negative integers");
        out.push_back(static_cast<int>(v));
    }
    if (out.empty()) throw ConfigError("--k-list is empty");
    return out;
}

ModelParams model_params(const RunConfig& cfg) {
    ModelParams params;
    params.variant = parse_variant(cfg.model);
    params.lambda = cfg.lambda;
    params.base_radius = cfg.R;
    params.p = cfg.p;
    params.K = cfg.K;
    params.stages = parse_stages(cfg.stages);
    params.validate();
    return params;
}

SolverOptions solver_options(const RunConfig& cfg) {
    SolverOptions opts;
    opts.tolerance = cfg.tolerance;
    opts.max_iterations = cfg.max_iterations;
    opts.stage_mode = parse_stage_mode(cfg.n_mode);
    return opts;
}

McOptions mc_options(const RunConfig& cfg) {
    McOptions opts;
    opts.threads = cfg.threads;
    opts.stage_mode = parse_stage_mode(cfg.n_mode);
    if (cfg.mc_stages > 0) opts.truncation_stage = cfg.mc_stages;
    return opts;
}

BeamConfig beam_config(int k) {
    if (k < 0 || k > 30) throw ConfigError("beam exponent k must lie in 0..30");
    return BeamConfig::with_k(k);
}

std::unique_ptr<JointLTEvaluator> make_evaluator(const ModelParams& params, int k, const RunConfig& cfg) {
    if (params.variant != Variant::basic) throw ConfigError("beam commands require --model basic");
    auto ev = std::make_unique<JointLTEvaluator>(params, beam_config(k), solver_options(cfg));
    ev->set_max_best_beam_k(cfg.max_k);
    return ev;
}

// Every flag that influences the output, in a fixed order, so the header
// line can be fed back to reproduce the file.
std::string canonical_args(const RunConfig& cfg) {
    std::ostringstream os;
    os << cfg.command << " --model " << cfg.model << " --lambda " << num(cfg.lambda) << " --R " << num(cfg.R)
       << " --p " << num(cfg.p) << " --K " << num(cfg.K) << " --stages " << cfg.stages << " --theta-db "
       << cfg.theta_db << " --n-mode " << cfg.n_mode << " --tolerance " << num(cfg.tolerance)
       << " --max-iterations " << cfg.max_iterations << " --gain " << num(cfg.gain) << " --k-list "
       << cfg.k_list << " --k " << cfg.k << " --max-k " << cfg.max_k;
    if (cfg.command == "simulate" || cfg.command == "compare")
        os << " --kind " << cfg.kind << " --samples " << cfg.samples << " --seed " << cfg.seed
           << " --mc-stages " << cfg.mc_stages;
    return os.str();
}

void write_header(std::ostream& os, const RunConfig& cfg, const ModelParams& params) {
    os << "# cascade-cli " << kToolVersion << "\n";
    os << "# command: " << cfg.command << "\n";
    os << "# args: " << canonical_args(cfg) << "\n";
    os << "# model: " << to_string(params.variant) << ", lambda=" << num(params.lambda)
       << ", R=" << num(params.base_radius) << ", p=" << num(params.effective_p()) << ", K=" << num(params.K)
       << ", N=" << (params.stages ? std::to_string(*params.stages) : std::string("inf")) << "\n";
    if (params.variant == Variant::independent)
        os << "# n(r) mode: " << cfg.n_mode
           << (cfg.n_mode == "unit_floor" ? " (unbounded sums cut at 1e-12 relative increment)" : "") << "\n";
    if ((cfg.command == "simulate" || cfg.command == "compare") && params.infinite()) {
        os << "# mc truncation stage: " << cfg.mc_stages;
        if (params.variant == Variant::basic)
            os << ", tail mean interference bound: " << num(tail_mean_bound(params, cfg.mc_stages));
        os << "\n";
    }
}

std::string zscore(double mc, double analytic, double se, std::int64_t n) {
    const double diff = mc - analytic;
    // A degenerate MC proportion (all or none covered) has zero sample
    // variance; fall back to the binomial error implied by the analytic value.
    if (!(se > 0.0)) se = std::sqrt(std::max(0.0, analytic * (1.0 - analytic)) / static_cast<double>(n));
    if (!(se > 0.0)) return diff == 0.0 ? "0" : (diff > 0 ? "inf" : "-inf");
    return num(diff / se);
}

bool z_exceeds(const std::string& z, double limit) {
    if (z == "inf" || z == "-inf" || z == "nan") return true;
    return std::abs(std::stod(z)) > limit;
}

int cmd_coverage(const RunConfig& cfg, std::ostream& os) {
    const ModelParams params = model_params(cfg);
    if (!(cfg.gain > 0.0)) throw ConfigError("--gain must be positive");
    const AnalyticSolver solver(params, solver_options(cfg));
    const auto grid = parse_theta(cfg.theta_db);
    write_header(os, cfg, params);
    os << "theta_db,p_cov\n";
    for (double db : grid) os << num(db) << "," << num(solver.coverage(db_to_linear(db), cfg.gain)) << "\n";
    return kOk;
}

int cmd_best_beam(const RunConfig& cfg, std::ostream& os) {
    const ModelParams params = model_params(cfg);
    const auto grid = parse_theta(cfg.theta_db);
    std::vector<std::unique_ptr<JointLTEvaluator>> evs;
    for (int k : parse_k_list(cfg.k_list)) evs.push_back(make_evaluator(params, k, cfg));
    std::ostringstream body;
    for (double db : grid) {
        const double theta = db_to_linear(db);
        for (const auto& ev : evs)
            body << num(db) << "," << ev->beams().k << "," << num(ev->best_beam_coverage(theta)) << ","
                 << num(ev->random_beam_coverage(theta)) << "\n";
    }
    write_header(os, cfg, params);
    os << "theta_db,k,p_best,p_random\n" << body.str();
    return kOk;
}

double single_theta(const RunConfig& cfg) {
    const auto grid = parse_theta(cfg.theta_db);
    if (grid.size() != 1) throw ConfigError("beam-switch needs a single --theta-db value");
    return grid[0];
}

int cmd_beam_switch(const RunConfig& cfg, std::ostream& os) {
    const ModelParams params = model_params(cfg);
    if (cfg.k < 1) throw ConfigError("beam-switch needs --k >= 1");
    const auto ev = make_evaluator(params, cfg.k, cfg);
    const double theta = db_to_linear(single_theta(cfg));
    std::ostringstream body;
    for (int l = 1; l < ev->beams().beam_count(); ++l)
        body << l + 1 << "," << shared_depth(0, l, cfg.k) << "," << num(ev->conditional_switch_coverage(theta, l))
             << "," << num(ev->conditional_given_outage(theta, l)) << "\n";
    write_header(os, cfg, params);
    os << "l,shared_depth,p_conditional,p_conditional_given_outage\n" << body.str();
    return kOk;
}

std::vector<int> switch_targets(int k) {
    std::vector<int> targets;
    for (int l = 1; l < (1 << k); ++l) targets.push_back(l);
    return targets;
}

int cmd_simulate(const RunConfig& cfg, std::ostream& os) {
    const ModelParams params = model_params(cfg);
    const McOptions mc = mc_options(cfg);
    std::ostringstream body;
    std::string columns;
    const std::string tail = "," + std::to_string(cfg.samples) + "," + std::to_string(cfg.seed) + "\n";

    if (cfg.kind == "coverage") {
        const auto grid = parse_theta(cfg.theta_db);
        std::vector<double> lin;
        for (double db : grid) lin.push_back(db_to_linear(db));
        const auto est = estimate_coverage(params, BeamConfig{}, lin, Strategy::omni, cfg.samples, cfg.seed, mc);
        columns = "theta_db,p_cov,std_error,n_samples,seed";
        for (std::size_t i = 0; i < grid.size(); ++i)
            body << num(grid[i]) << "," << num(est.points[i].mean) << "," << num(est.points[i].std_error) << tail;
    } else if (cfg.kind == "best-beam") {
        const auto grid = parse_theta(cfg.theta_db);
        std::vector<double> lin;
        for (double db : grid) lin.push_back(db_to_linear(db));
        columns = "theta_db,k,p_best,p_random,std_error_best,std_error_random,n_samples,seed";
        std::vector<std::pair<McCoverage, McCoverage>> runs;
        const auto ks = parse_k_list(cfg.k_list);
        for (int k : ks) {
            const BeamConfig beams = beam_config(k);
            runs.emplace_back(estimate_coverage(params, beams, lin, Strategy::best_beam, cfg.samples, cfg.seed, mc),
                              estimate_coverage(params, beams, lin, Strategy::random_beam, cfg.samples, cfg.seed, mc));
        }
        for (std::size_t i = 0; i < grid.size(); ++i)
            for (std::size_t j = 0; j < ks.size(); ++j) {
                const auto& best = runs[j].first.points[i];
                const auto& rnd = runs[j].second.points[i];
                body << num(grid[i]) << "," << ks[j] << "," << num(best.mean) << "," << num(rnd.mean) << ","
                     << num(best.std_error) << "," << num(rnd.std_error) << tail;
            }
    } else if (cfg.kind == "beam-switch") {
        if (cfg.k < 1) throw ConfigError("beam-switch needs --k >= 1");
        const double theta = db_to_linear(single_theta(cfg));
        const auto est =
            estimate_conditional(params, beam_config(cfg.k), theta, switch_targets(cfg.k), cfg.samples, cfg.seed, mc);
        columns = "l,shared_depth,p_conditional,p_conditional_given_outage,std_error,std_error_given_outage,n_samples,seed";
        for (const auto& c : est)
            body << c.target + 1 << "," << shared_depth(0, c.target, cfg.k) << "," << num(c.given_coverage.mean) << ","
                 << num(c.given_outage.mean) << "," << num(c.given_coverage.std_error) << ","
                 << num(c.given_outage.std_error) << tail;
    } else {
        throw ConfigError("--kind must be coverage, best-beam or beam-switch");
    }
    write_header(os, cfg, params);
    os << columns << "\n" << body.str();
    return kOk;
}

int cmd_compare(const RunConfig& cfg, std::ostream& os) {
    const ModelParams params = model_params(cfg);
    const McOptions mc = mc_options(cfg);
    constexpr double kZLimit = 4.0;
    bool disagree = false;
    std::ostringstream body;

    auto row = [&](double theta_db, std::optional<int> k, std::optional<int> l, const char* quantity,
                   double analytic, const Estimate& est) {
        const std::string z = zscore(est.mean, analytic, est.std_error, est.sample_count);
        disagree = disagree || z_exceeds(z, kZLimit);
        body << (std::isnan(theta_db) ? std::string() : num(theta_db)) << ","
             << (k ? std::to_string(*k) : std::string()) << "," << (l ? std::to_string(*l) : std::string()) << ","
             << quantity << "," << num(analytic) << "," << num(est.mean) << "," << num(est.std_error) << ","
             << est.sample_count << "," << est.seed << "," << z << "\n";
    };

    if (cfg.kind == "coverage") {
        const AnalyticSolver solver(params, solver_options(cfg));
        const auto grid = parse_theta(cfg.theta_db);
        std::vector<double> lin;
        for (double db : grid) lin.push_back(db_to_linear(db));
        const auto est = estimate_coverage(params, BeamConfig{}, lin, Strategy::omni, cfg.samples, cfg.seed, mc);
        for (std::size_t i = 0; i < grid.size(); ++i)
            row(grid[i], std::nullopt, std::nullopt, "p_cov", solver.coverage(lin[i]), est.points[i]);
    } else if (cfg.kind == "best-beam") {
        const auto grid = parse_theta(cfg.theta_db);
        std::vector<double> lin;
        for (double db : grid) lin.push_back(db_to_linear(db));
        for (int k : parse_k_list(cfg.k_list)) {
            const auto ev = make_evaluator(params, k, cfg);
            const auto best = estimate_coverage(params, ev->beams(), lin, Strategy::best_beam, cfg.samples, cfg.seed, mc);
            const auto rnd = estimate_coverage(params, ev->beams(), lin, Strategy::random_beam, cfg.samples, cfg.seed, mc);
            for (std::size_t i = 0; i < grid.size(); ++i) {
                row(grid[i], k, std::nullopt, "p_best", ev->best_beam_coverage(lin[i]), best.points[i]);
                row(grid[i], k, std::nullopt, "p_random", ev->random_beam_coverage(lin[i]), rnd.points[i]);
            }
        }
    } else if (cfg.kind == "beam-switch") {
        if (cfg.k < 1) throw ConfigError("beam-switch needs --k >= 1");
        const auto ev = make_evaluator(params, cfg.k, cfg);
        const double db = single_theta(cfg);
        const double theta = db_to_linear(db);
        const auto est =
            estimate_conditional(params, ev->beams(), theta, switch_targets(cfg.k), cfg.samples, cfg.seed, mc);
        for (const auto& c : est) {
            row(db, cfg.k, c.target + 1, "p_conditional", ev->conditional_switch_coverage(theta, c.target),
                c.given_coverage);
            row(db, cfg.k, c.target + 1, "p_conditional_given_outage", ev->conditional_given_outage(theta, c.target),
                c.given_outage);
        }
    } else {
        throw ConfigError("--kind must be coverage, best-beam or beam-switch");
    }
    write_header(os, cfg, params);
    os << "# oracle check: |z| <= " << num(kZLimit) << (disagree ? " FAILED" : " passed") << "\n";
    os << "theta_db,k,l,quantity,analytic,mc,std_error,n_samples,seed,z_score\n" << body.str();
    return disagree ? kOracleDisagreement : kOk;
}

void add_flags(CLI::App* sub, RunConfig& cfg, bool monte_carlo) {
    sub->add_option("--model", cfg.model, "basic | less_correlated | periodic | independent")->capture_default_str();
    sub->add_option("--lambda", cfg.lambda, "BS density per unit area")->capture_default_str();
    sub->add_option("--R", cfg.R, "first circle radius")->capture_default_str();
    sub->add_option("--p", cfg.p, "arc blockage probability")->capture_default_str();
    sub->add_option("--K", cfg.K, "penetration loss factor per blocked arc")->capture_default_str();
    sub->add_option("--stages", cfg.stages, "cascade depth N, or 'inf'")->capture_default_str();
    sub->add_option("--theta-db", cfg.theta_db, "SIR thresholds min:max:step in dB (or one value)")
        ->capture_default_str();
    sub->add_option("--n-mode", cfg.n_mode, "independent model obstacle count: geometric | unit_floor")
        ->capture_default_str();
    sub->add_option("--tolerance", cfg.tolerance, "infinite-cascade fixed-point tolerance")->capture_default_str();
    sub->add_option("--max-iterations", cfg.max_iterations, "infinite-cascade sweep budget")->capture_default_str();
    sub->add_option("--gain", cfg.gain, "receive gain G (omnidirectional coverage)")->capture_default_str();
    sub->add_option("--k-list", cfg.k_list, "beam exponents, comma separated")->capture_default_str();
    sub->add_option("--k", cfg.k, "beam exponent for beam switching (2^k beams)")->capture_default_str();
    sub->add_option("--max-k", cfg.max_k, "ceiling on k for best-beam inclusion-exclusion")->capture_default_str();
    sub->add_option("--output,-o", cfg.output, "output CSV path ('-' for stdout)");
    if (monte_carlo) {
        sub->add_option("--kind", cfg.kind, "coverage | best-beam | beam-switch")->capture_default_str();
        sub->add_option("--samples", cfg.samples, "Monte Carlo realizations")->capture_default_str();
        sub->add_option("--seed", cfg.seed, "Monte Carlo seed")->capture_default_str();
        sub->add_option("--mc-stages", cfg.mc_stages, "truncation stage for simulating an infinite cascade")
            ->capture_default_str();
        sub->add_option("--threads", cfg.threads, "worker threads (0 = all)")->capture_default_str();
    }
}

int emit(const RunConfig& cfg, const std::string& csv, std::ostream& out) {
    std::string path = cfg.output;
    if (path.empty()) {
        if (const char* dir = std::getenv(kOutputDirEnv); dir && *dir)
            path = (std::filesystem::path(dir) / (cfg.command + ".csv")).string();
    }
    if (path.empty() || path == "-") {
        out << csv;
        return kOk;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) throw ConfigError("cannot open output file '" + path + "'");
    file << csv;
    return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    CLI::App app{"Cascade blockage model: analytic coverage solvers and Monte Carlo oracle", "cascade-cli"};
    app.set_version_flag("--version", kToolVersion);
    app.require_subcommand(1);
    struct Sub {
        const char* name;
        const char* help;
        bool mc;
        int (*fn)(const RunConfig&, std::ostream&);
    };
    const Sub subs[] = {
        {"coverage", "analytic SIR coverage curve (omnidirectional UE)", false, cmd_coverage},
        {"best-beam", "analytic best-beam and random-beam coverage", false, cmd_best_beam},
        {"beam-switch", "analytic conditional coverage after a beam switch from beam 1", false, cmd_beam_switch},
        {"simulate", "Monte Carlo estimates with standard errors", true, cmd_simulate},
        {"compare", "analytic vs Monte Carlo with z-scores (exit 2 if any |z| > 4)", true, cmd_compare},
    };
    std::vector<CLI::App*> handles;
    for (const auto& s : subs) {
        auto* sub = app.add_subcommand(s.name, s.help);
        add_flags(sub, cfg, s.mc);
        handles.push_back(sub);
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kInvalidConfig;
    }

    try {
        for (std::size_t i = 0; i < handles.size(); ++i) {
            if (!handles[i]->parsed()) continue;
            cfg.command = subs[i].name;
            std::ostringstream csv;
            const int code = subs[i].fn(cfg, csv);
            emit(cfg, csv.str(), out);
            if (code == kOracleDisagreement) err << "error: Monte Carlo and analytic results disagree (|z| > 4)\n";
            return code;
        }
    } catch (const DivergentRegime& e) {
        err << "error: " << e.what() << "\n";
        return kDivergent;
    } catch (const IterationBudgetExhausted& e) {
        err << "error: " << e.what() << "\n";
        return kDivergent;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kInvalidConfig;
    }
    return kInvalidConfig;
}

}  // namespace cascade::cli
