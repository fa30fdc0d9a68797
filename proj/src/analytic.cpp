#include "cascade/analytic.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

namespace cascade {

namespace {

// Annulus count ceiling for the independent model's unbounded sums.
constexpr int kMaxAnnuli = 100000;
constexpr double kTailRelative = 1e-12;

double binomial_pmf(int n, int l, double p) {
    const double log_choose = std::lgamma(n + 1.0) - std::lgamma(l + 1.0) - std::lgamma(n - l + 1.0);
    return std::exp(log_choose) * std::pow(p, l) * std::pow(1.0 - p, n - l);
}

// E[s S / (1 + s S)] with S = K^L, L ~ Binomial(n, p): the per-point void
// probability defect of the independent-blockage shot noise.
double independent_defect(int n, double p, double K, double s) {
    double acc = 0.0;
    for (int l = 0; l <= n; ++l) {
        const double w = binomial_pmf(n, l, p);
        if (w == 0.0) continue;
        const double x = s * std::pow(K, l);
        acc += w * x / (1.0 + x);
    }
    return acc;
}

}  // namespace

double box_lt(double s, double volume, double lambda) {
    return std::exp(-lambda * volume * s / (1.0 + s));
}

std::size_t AnalyticSolver::KeyHash::operator()(const Key& k) const noexcept {
    auto h = std::bit_cast<std::uint64_t>(k.point);
    h ^= (static_cast<std::uint64_t>(k.stage) << 8 | static_cast<std::uint64_t>(k.rule)) * 0x9E3779B97F4A7C15ULL;
    h ^= h >> 29;
    return static_cast<std::size_t>(h * 0xBF58476D1CE4E5B9ULL);
}

AnalyticSolver::AnalyticSolver(ModelParams params, SolverOptions options)
    : params_(params), geometry_(CascadeGeometry::from(params)), options_(options) {
    params_.validate();
    if (!(options_.tolerance > 0.0)) throw ConfigError("solver tolerance must be positive");
    if (options_.max_iterations < 1) throw ConfigError("max_iterations must be at least 1");
}

double AnalyticSolver::rule_volume(Rule rule) const {
    return geometry_.box_volume(rule == Rule::half_arc ? ArcWidth::half : ArcWidth::full);
}

double AnalyticSolver::combine(Rule rule, double scaled, double plain, double local) const {
    if (rule == Rule::periodic) return scaled * plain * local;
    const double p = params_.p;
    return (p * (scaled * scaled) + (1.0 - p) * (plain * plain)) * local;
}

bool AnalyticSolver::lookup(const Key& key, double& out) const {
    std::lock_guard lock(memo_mutex_);
    auto it = memo_.find(key);
    if (it == memo_.end()) return false;
    out = it->second;
    return true;
}

void AnalyticSolver::store(const Key& key, double value) const {
    std::lock_guard lock(memo_mutex_);
    memo_.emplace(key, value);
}

void AnalyticSolver::clear_memo() const {
    std::lock_guard lock(memo_mutex_);
    memo_.clear();
}

std::size_t AnalyticSolver::memo_size() const {
    std::lock_guard lock(memo_mutex_);
    return memo_.size();
}

double AnalyticSolver::recursive_value(Rule rule, int stage, double x) const {
    if (x == 0.0) return 1.0;
    const double local = box_lt(x, rule_volume(rule), params_.lambda);
    if (stage == *params_.stages) return local;
    const Key key{rule, stage, x};
    double out = 0.0;
    if (lookup(key, out)) return out;
    const double scaled = recursive_value(rule, stage + 1, params_.K * x);
    const double plain = recursive_value(rule, stage + 1, x);
    out = combine(rule, scaled, plain, local);
    store(key, out);
    return out;
}

// Same recursion evaluated bottom-up on the point set {s, Ks, K(Ks), ...}
// without the memo.
double AnalyticSolver::dense_value(Rule rule, int stage, double s) const {
    const int last = *params_.stages;
    const auto depth = static_cast<std::size_t>(last - stage);
    std::vector<double> points(depth + 1);
    points[0] = s;
    for (std::size_t m = 1; m <= depth; ++m) points[m] = params_.K * points[m - 1];

    const double volume = rule_volume(rule);
    std::vector<double> local(depth + 1);
    std::vector<double> values(depth + 1);
    for (std::size_t m = 0; m <= depth; ++m) {
        local[m] = box_lt(points[m], volume, params_.lambda);
        values[m] = points[m] == 0.0 ? 1.0 : local[m];
    }
    for (std::size_t level = depth; level-- > 0;) {
        for (std::size_t m = 0; m <= level; ++m)
            values[m] = points[m] == 0.0 ? 1.0 : combine(rule, values[m + 1], values[m], local[m]);
    }
    return values[0];
}

double AnalyticSolver::finite_value(Rule rule, int stage, double s) const {
    if (params_.infinite()) throw ConfigError("finite-stage recursion needs a finite stage count");
    if (stage < 1 || stage > *params_.stages)
        throw ConfigError("stage " + std::to_string(stage) + " outside 1..N");
    if (!(s >= 0.0)) throw ConfigError("transform argument must be non-negative");
    return options_.memoize ? recursive_value(rule, stage, s) : dense_value(rule, stage, s);
}

void AnalyticSolver::check_convergent() const {
    const double growth = 2.0 * (params_.q() + params_.p * params_.K);
    if (!(growth < 1.0))
        throw DivergentRegime("divergent regime: 2(q + pK) = " + std::to_string(growth) +
                              " must be < 1 for the infinite cascade");
}

FixedPointResult AnalyticSolver::fixed_point(Rule rule, double s) const {
    if (rule == Rule::periodic) throw ConfigError("the periodic model requires a finite stage count");
    if (!(s >= 0.0)) throw ConfigError("transform argument must be non-negative");
    check_convergent();

    // Iterate on {K^m s : m <= max_iterations}; each sweep consumes the top point.
    const auto span = static_cast<std::size_t>(options_.max_iterations) + 1;
    const double volume = rule_volume(rule);
    std::vector<double> points(span + 1);
    points[0] = s;
    for (std::size_t m = 1; m <= span; ++m) points[m] = params_.K * points[m - 1];
    std::vector<double> local(span + 1);
    std::vector<double> current(span + 1);
    for (std::size_t m = 0; m <= span; ++m) {
        local[m] = box_lt(points[m], volume, params_.lambda);
        current[m] = points[m] == 0.0 ? 1.0 : local[m];
    }

    std::vector<double> next;
    for (int it = 1; it <= options_.max_iterations; ++it) {
        const std::size_t len = current.size() - 1;
        next.assign(len, 0.0);
        double sup = 0.0;
        for (std::size_t m = 0; m < len; ++m) {
            next[m] = points[m] == 0.0 ? 1.0 : combine(rule, current[m + 1], current[m], local[m]);
            sup = std::max(sup, std::abs(next[m] - current[m]));
        }
        current.swap(next);
        if (sup < options_.tolerance) return {current[0], it};
    }
    throw IterationBudgetExhausted("iteration budget exhausted after " +
                                   std::to_string(options_.max_iterations) + " sweeps");
}

double AnalyticSolver::stage_lt(int n, double s) const { return finite_value(Rule::basic, n, s); }

FixedPointResult AnalyticSolver::half_plane_lt_infinite(double s) const {
    return fixed_point(Rule::basic, s);
}

double AnalyticSolver::half_plane_lt(double s) const {
    return params_.infinite() ? half_plane_lt_infinite(s).value : half_plane_lt_finite(s);
}

double AnalyticSolver::lc_lt(double s) const {
    return params_.infinite() ? lc_lt_infinite(s).value : finite_value(Rule::half_arc, 1, s);
}

FixedPointResult AnalyticSolver::lc_lt_infinite(double s) const { return fixed_point(Rule::half_arc, s); }

double AnalyticSolver::periodic_lt(double s) const { return finite_value(Rule::periodic, 1, s); }

double AnalyticSolver::independent_lt(double s) const {
    if (!(s >= 0.0)) throw ConfigError("transform argument must be non-negative");
    if (s == 0.0) return 1.0;
    const double lambda = params_.lambda;
    const double p = params_.p;
    const double K = params_.K;
    if (params_.infinite()) check_convergent();

    double exponent = 0.0;
    if (options_.stage_mode == StageMode::geometric) {
        // Annulus n lies between circles n-1 and n, has area pi 2^(n-1) R^2 and
        // n-1 obstacles in front of it.
        const double r2 = geometry_.base_radius() * geometry_.base_radius();
        for (int n = 1;; ++n) {
            if (params_.stages && n > *params_.stages) break;
            if (n > kMaxAnnuli) throw IterationBudgetExhausted("independent-model annulus sum did not settle");
            const double area = std::numbers::pi * std::ldexp(r2, n - 1);
            const double increment = lambda * area * independent_defect(n - 1, p, K, s);
            exponent += increment;
            if (params_.infinite() && increment <= kTailRelative * exponent) break;
        }
    } else {
        const double outer = params_.stages ? geometry_.radius(*params_.stages) : 0.0;
        for (int j = 0;; ++j) {
            if (params_.stages && j >= outer) break;
            if (j > kMaxAnnuli) throw IterationBudgetExhausted("independent-model annulus sum did not settle");
            const double hi = params_.stages ? std::min(j + 1.0, outer) : j + 1.0;
            const double area = std::numbers::pi * (hi * hi - static_cast<double>(j) * j);
            const double increment = lambda * area * independent_defect(j, p, K, s);
            exponent += increment;
            if (params_.infinite() && increment <= kTailRelative * exponent) break;
        }
    }
    return std::exp(-exponent);
}

double AnalyticSolver::total_lt(double s) const {
    switch (params_.variant) {
    case Variant::basic: {
        const double half = half_plane_lt(s);
        return half * half;
    }
    case Variant::less_correlated: {
        const double quarter = lc_lt(s);
        const double sq = quarter * quarter;
        return sq * sq;
    }
    case Variant::periodic: {
        const double half = periodic_lt(s);
        return half * half;
    }
    case Variant::independent: return independent_lt(s);
    }
    return 1.0;
}

std::vector<double> theta_grid_db(double min_db, double max_db, double step_db) {
    if (!(step_db > 0.0)) throw ConfigError("theta grid step must be positive");
    if (!(max_db >= min_db)) throw ConfigError("theta grid max must not be below min");
    const auto count = static_cast<long long>(std::floor((max_db - min_db) / step_db + 1e-9)) + 1;
    if (count > 1000000) throw ConfigError("theta grid has too many points");
    std::vector<double> grid;
    grid.reserve(static_cast<std::size_t>(count));
    for (long long i = 0; i < count; ++i) grid.push_back(min_db + static_cast<double>(i) * step_db);
    return grid;
}

CoverageCurve coverage_curve(const AnalyticSolver& solver, const std::vector<double>& theta_db,
                             double gain) {
    CoverageCurve curve;
    curve.params = solver.params();
    curve.gain = gain;
    curve.theta_db = theta_db;
    for (double db : theta_db) {
        const double theta = db_to_linear(db);
        curve.theta_linear.push_back(theta);
        curve.values.push_back(solver.coverage(theta, gain));
    }
    return curve;
}

}  // namespace cascade
