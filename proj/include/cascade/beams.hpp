#pragma once

#include <cstdint>
#include <mutex>
#include <span>
#include <unordered_map>
#include <vector>

#include "cascade/analytic.hpp"
#include "cascade/params.hpp"

namespace cascade {

/// 2^k ideal sector beams aligned with the stage-k obstacle arcs. Beam l
/// (0-based) covers [2*pi*l/2^k, 2*pi*(l+1)/2^k).
struct BeamConfig {
    int k = 0;
    double gain = 1.0;

    /// Gain defaults to 2^k (ideal sector of width 2*pi/2^k).
    static BeamConfig with_k(int k);

    int beam_count() const { return 1 << k; }
    double beam_width() const { return kTwoPi / beam_count(); }
    int beam_of(double phi) const;
    void validate() const;
};

/// Stages 1..k whose arc holds both beams (k for l1 == l2, 0 for opposite halves).
int shared_depth(int l1, int l2, int k);

/// Default ceiling on k for best-beam inclusion-exclusion (2^(2^k) subsets).
inline constexpr int kDefaultMaxBestBeamK = 4;

/// Joint Laplace transform of the per-beam interference vector (basic cascade).
///
/// The level-l function H_l takes the 2^(k-l) beams sharing one stage-l arc:
///   H_l(t) = { p H_{l+1}(K t_lo) H_{l+1}(K t_hi) + q H_{l+1}(t_lo) H_{l+1}(t_hi) }
///            * prod_i A(t_i, V / 2^(k-l)),
/// bottoming out at H_k = M_k (stage-k iterate of the omnidirectional recursion,
/// or its fixed point for the infinite cascade). Levels beyond the last stage
/// hold no base stations and evaluate to 1. The full-plane transform is the
/// product of the two independent half-plane factors H_1.
///
/// Arguments of the form c * K^m on a support set are memoized on
/// (c, level, support mask, m); arbitrary vectors go through the unmemoized
/// recursion (joint_lt / h_level).
class JointLTEvaluator {
public:
    JointLTEvaluator(ModelParams params, BeamConfig beams, SolverOptions options = {});

    const ModelParams& params() const { return solver_.params(); }
    const BeamConfig& beams() const { return beams_; }
    const AnalyticSolver& solver() const { return solver_; }

    void set_max_best_beam_k(int k) { max_best_k_ = k; }

    double h_base(double s) const;
    /// Level in 1..k, args of length 2^(k-level).
    double h_level(int level, std::span<const double> args) const;
    /// Full 2^k-vector transform.
    double joint_lt(std::span<const double> s) const;
    /// joint_lt with c on the beams of `mask` (bit l = beam l) and 0 elsewhere.
    double joint_lt_masked(double c, std::uint64_t mask) const;

    /// Inclusion-exclusion sum for best-beam coverage, unclamped.
    double best_beam_sum(double theta) const;
    /// P(max_l G h^l / I^l >= theta), clamped to [0, 1].
    double best_beam_coverage(double theta) const;
    double random_beam_coverage(double theta) const;

    /// P(SIR_target > theta | SIR_0 > theta), target 0-based.
    double conditional_switch_coverage(double theta, int target) const;
    /// P(SIR_target > theta | SIR_0 <= theta).
    double conditional_given_outage(double theta, int target) const;

    void clear_memo() const;

private:
    struct Key {
        double root;
        int level;
        std::uint64_t mask;
        int m;
        bool operator==(const Key&) const = default;
    };
    struct KeyHash {
        std::size_t operator()(const Key& k) const noexcept;
    };

    bool level_empty(int level) const;
    double level_volume(int level) const;
    double masked_level(double root, int level, std::uint64_t mask, int m) const;
    void check_target(int target) const;

    AnalyticSolver solver_;
    BeamConfig beams_;
    int max_best_k_ = kDefaultMaxBestBeamK;
    mutable std::mutex memo_mutex_;
    mutable std::unordered_map<Key, double, KeyHash> memo_;
};

/// Error-free (Neumaier) running sum.
class CompensatedSum {
public:
    void add(double x);
    double value() const { return sum_ + compensation_; }

private:
    double sum_ = 0.0;
    double compensation_ = 0.0;
};

}  // namespace cascade
