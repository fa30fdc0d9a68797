#pragma once

#include <cmath>
#include <cstdint>
#include <mutex>
#include <unordered_map>
#include <vector>

#include "cascade/geometry.hpp"
#include "cascade/params.hpp"

namespace cascade {

/// Laplace transform of the Rayleigh-faded shot noise of a PPP box:
/// exp(-lambda * volume * s / (1 + s)).
double box_lt(double s, double volume, double lambda);

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }

struct SolverOptions {
    double tolerance = 1e-9;    ///< infinite cascade only
    int max_iterations = 200;   ///< infinite cascade only
    StageMode stage_mode = StageMode::geometric;
    bool memoize = true;
};

struct FixedPointResult {
    double value = 1.0;
    int iterations = 0;
};

/// Evaluates interference Laplace transforms of the cascade models.
///
/// Finite cascades are evaluated by the backward stage recursion
///   M_n(x) = (p M_{n+1}(Kx)^2 + q M_{n+1}(x)^2) A(x, V),   M_N(x) = A(x, V)
/// (product rule M_{n+1}(Kx) M_{n+1}(x) A(x, V) for the periodic model). Every
/// evaluation point reachable from a root s is K^m s, so the memo is keyed by
/// (rule, stage, point). Infinite cascades iterate the same map to a fixed point.
///
/// The per-variant entry points (half_plane_lt_finite, lc_lt, periodic_lt,
/// independent_lt) use the shared (lambda, R, p, K, N) regardless of
/// params().variant; total_lt and coverage dispatch on the variant.
///
/// Thread-safe: the memo is a mutex-guarded pure cache.
class AnalyticSolver {
public:
    explicit AnalyticSolver(ModelParams params, SolverOptions options = {});

    const ModelParams& params() const { return params_; }
    const CascadeGeometry& geometry() const { return geometry_; }
    const SolverOptions& options() const { return options_; }

    /// Basic cascade, finite N: M_n(s) for 1 <= n <= N.
    double stage_lt(int n, double s) const;
    double half_plane_lt_finite(double s) const { return stage_lt(1, s); }
    /// Basic cascade, infinite: fixed point of the stage map.
    FixedPointResult half_plane_lt_infinite(double s) const;
    /// Finite or infinite according to params().stages.
    double half_plane_lt(double s) const;

    /// Less-correlated cascade: quarter-plane transform (half-arc boxes).
    double lc_lt(double s) const;
    FixedPointResult lc_lt_infinite(double s) const;

    /// Periodic cascade, stage-1 (half-plane) transform.
    double periodic_lt(double s) const;

    /// Independent blockage: full-plane transform of the shot noise.
    double independent_lt(double s) const;

    /// Full-plane transform for params().variant.
    double total_lt(double s) const;

    /// P(SIR >= theta) with Rayleigh serving fade and gain G: total_lt(theta / G).
    double coverage(double theta, double gain = 1.0) const { return total_lt(theta / gain); }

    /// Throws DivergentRegime unless 2(q + pK) < 1.
    void check_convergent() const;

    void clear_memo() const;
    std::size_t memo_size() const;

private:
    enum class Rule : std::uint8_t { basic, half_arc, periodic };

    struct Key {
        Rule rule;
        int stage;
        double point;
        bool operator==(const Key&) const = default;
    };
    struct KeyHash {
        std::size_t operator()(const Key& k) const noexcept;
    };

    double rule_volume(Rule rule) const;
    double combine(Rule rule, double scaled, double plain, double local) const;
    double recursive_value(Rule rule, int stage, double x) const;
    double dense_value(Rule rule, int stage, double s) const;
    double finite_value(Rule rule, int stage, double s) const;
    FixedPointResult fixed_point(Rule rule, double s) const;

    bool lookup(const Key& key, double& out) const;
    void store(const Key& key, double value) const;

    ModelParams params_;
    CascadeGeometry geometry_;
    SolverOptions options_;
    mutable std::mutex memo_mutex_;
    mutable std::unordered_map<Key, double, KeyHash> memo_;
};

/// Coverage probability over a threshold grid.
struct CoverageCurve {
    std::vector<double> theta_db;
    std::vector<double> theta_linear;
    std::vector<double> values;
    ModelParams params;
    double gain = 1.0;
};

/// Inclusive grid min, min+step, ..., max (dB). Rejects step <= 0 or max < min.
std::vector<double> theta_grid_db(double min_db, double max_db, double step_db);

CoverageCurve coverage_curve(const AnalyticSolver& solver, const std::vector<double>& theta_db,
                             double gain = 1.0);

}  // namespace cascade
