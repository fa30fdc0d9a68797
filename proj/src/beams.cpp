#include "cascade/beams.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

namespace cascade {

BeamConfig BeamConfig::with_k(int k) {
    BeamConfig cfg;
    cfg.k = k;
    cfg.gain = std::ldexp(1.0, k);
    cfg.validate();
    return cfg;
}

void BeamConfig::validate() const {
    if (k < 0 || k > 30) throw ConfigError("beam exponent k must lie in 0..30");
    if (!(gain > 0.0)) throw ConfigError("beam gain G must be positive");
}

int BeamConfig::beam_of(double phi) const {
    if (k == 0) return 0;
    return static_cast<int>(CascadeGeometry::arc_index(k, normalize_angle(phi)));
}

int shared_depth(int l1, int l2, int k) {
    const int beams = 1 << k;
    if (l1 < 0 || l2 < 0 || l1 >= beams || l2 >= beams)
        throw ConfigError("beam index outside 0..2^k-1");
    const auto diff = static_cast<unsigned>(l1 ^ l2);
    return k - static_cast<int>(std::bit_width(diff));
}

void CompensatedSum::add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
        compensation_ += (sum_ - t) + x;
    else
        compensation_ += (x - t) + sum_;
    sum_ = t;
}

std::size_t JointLTEvaluator::KeyHash::operator()(const Key& k) const noexcept {
    std::uint64_t h = std::bit_cast<std::uint64_t>(k.root);
    h ^= k.mask * 0x9E3779B97F4A7C15ULL;
    h ^= (static_cast<std::uint64_t>(k.level) << 32 | static_cast<std::uint32_t>(k.m)) * 0xC2B2AE3D27D4EB4FULL;
    h ^= h >> 31;
    return static_cast<std::size_t>(h * 0xBF58476D1CE4E5B9ULL);
}

JointLTEvaluator::JointLTEvaluator(ModelParams params, BeamConfig beams, SolverOptions options)
    : solver_(params, options), beams_(beams) {
    if (params.variant != Variant::basic)
        throw ConfigError("beam analysis is defined for the basic cascade only");
    beams_.validate();
}

void JointLTEvaluator::clear_memo() const {
    std::lock_guard lock(memo_mutex_);
    memo_.clear();
}

bool JointLTEvaluator::level_empty(int level) const {
    const auto& stages = solver_.params().stages;
    return stages && level > *stages;
}

double JointLTEvaluator::level_volume(int level) const {
    return solver_.geometry().box_volume(ArcWidth::full, beams_.k - level);
}

double JointLTEvaluator::h_base(double s) const {
    if (!(s >= 0.0)) throw ConfigError("transform argument must be non-negative");
    if (s == 0.0 || level_empty(beams_.k)) return 1.0;
    const int level = std::max(beams_.k, 1);
    if (solver_.params().infinite()) return solver_.half_plane_lt_infinite(s).value;
    return solver_.stage_lt(level, s);
}

double JointLTEvaluator::h_level(int level, std::span<const double> args) const {
    if (level < 1 || level > beams_.k) throw ConfigError("H level outside 1..k");
    const std::size_t width = std::size_t{1} << (beams_.k - level);
    if (args.size() != width)
        throw ConfigError("H level " + std::to_string(level) + " takes " + std::to_string(width) + " arguments");
    if (std::all_of(args.begin(), args.end(), [](double t) { return t == 0.0; })) return 1.0;
    if (level_empty(level)) return 1.0;
    if (level == beams_.k) return h_base(args[0]);

    const auto& prm = solver_.params();
    const std::size_t half = width / 2;
    std::vector<double> scaled(args.begin(), args.end());
    for (auto& t : scaled) t *= prm.K;
    const std::span<const double> s_all(scaled);
    const double blocked = h_level(level + 1, s_all.first(half)) * h_level(level + 1, s_all.last(half));
    const double clear = h_level(level + 1, args.first(half)) * h_level(level + 1, args.last(half));
    const double volume = level_volume(level);
    double local = 1.0;
    for (double t : args) local *= box_lt(t, volume, prm.lambda);
    return (prm.p * blocked + (1.0 - prm.p) * clear) * local;
}

double JointLTEvaluator::joint_lt(std::span<const double> s) const {
    if (s.size() != static_cast<std::size_t>(beams_.beam_count()))
        throw ConfigError("joint transform takes one argument per beam");
    for (double t : s)
        if (!(t >= 0.0)) throw ConfigError("transform argument must be non-negative");
    if (beams_.k == 0) {
        const double half = solver_.half_plane_lt(s[0]);
        return half * half;
    }
    const std::size_t half = s.size() / 2;
    return h_level(1, s.first(half)) * h_level(1, s.last(half));
}

double JointLTEvaluator::masked_level(double root, int level, std::uint64_t mask, int m) const {
    if (mask == 0 || level_empty(level)) return 1.0;
    const auto& prm = solver_.params();
    double t = root;
    for (int i = 0; i < m; ++i) t *= prm.K;
    if (t == 0.0) return 1.0;
    if (level == beams_.k) return h_base(t);

    const Key key{root, level, mask, m};
    {
        std::lock_guard lock(memo_mutex_);
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    }
    const int half = 1 << (beams_.k - level - 1);
    const std::uint64_t lo = mask & ((std::uint64_t{1} << half) - 1);
    const std::uint64_t hi = mask >> half;
    const double blocked = masked_level(root, level + 1, lo, m + 1) * masked_level(root, level + 1, hi, m + 1);
    const double clear = masked_level(root, level + 1, lo, m) * masked_level(root, level + 1, hi, m);
    const double a = box_lt(t, level_volume(level), prm.lambda);
    double local = 1.0;
    for (int i = std::popcount(mask); i > 0; --i) local *= a;
    const double out = (prm.p * blocked + (1.0 - prm.p) * clear) * local;

    std::lock_guard lock(memo_mutex_);
    memo_.emplace(key, out);
    return out;
}

double JointLTEvaluator::joint_lt_masked(double c, std::uint64_t mask) const {
    if (!(c >= 0.0)) throw ConfigError("transform argument must be non-negative");
    const int beams = beams_.beam_count();
    if (beams < 64 && (mask >> beams) != 0) throw ConfigError("support mask names a beam beyond 2^k");
    if (beams_.k == 0) {
        if ((mask & 1) == 0) return 1.0;
        const double half = solver_.half_plane_lt(c);
        return half * half;
    }
    const int half = beams / 2;
    const std::uint64_t lo = mask & ((std::uint64_t{1} << half) - 1);
    const std::uint64_t hi = mask >> half;
    return masked_level(c, 1, lo, 0) * masked_level(c, 1, hi, 0);
}

double JointLTEvaluator::best_beam_sum(double theta) const {
    if (beams_.k > max_best_k_)
        throw ConfigError("best-beam inclusion-exclusion refused for k = " + std::to_string(beams_.k) +
                          " (ceiling " + std::to_string(max_best_k_) + ")");
    if (beams_.k > 5) throw ConfigError("best-beam inclusion-exclusion supports k <= 5");
    const double s = theta / beams_.gain;
    const int beams = beams_.beam_count();
    const std::uint64_t limit = std::uint64_t{1} << beams;
    CompensatedSum total;
    // Subsets by increasing size (Gosper's hack enumerates equal-popcount masks).
    for (int size = 1; size <= beams; ++size) {
        const double sign = (size % 2 == 1) ? 1.0 : -1.0;
        std::uint64_t mask = (std::uint64_t{1} << size) - 1;
        while (mask < limit) {
            total.add(sign * joint_lt_masked(s, mask));
            const std::uint64_t low = mask & (~mask + 1);
            const std::uint64_t ripple = mask + low;
            mask = (((ripple ^ mask) >> 2) / low) | ripple;
        }
    }
    return total.value();
}

double JointLTEvaluator::best_beam_coverage(double theta) const {
    return std::clamp(best_beam_sum(theta), 0.0, 1.0);
}

double JointLTEvaluator::random_beam_coverage(double theta) const {
    return joint_lt_masked(theta / beams_.gain, 1);
}

void JointLTEvaluator::check_target(int target) const {
    if (target < 0 || target >= beams_.beam_count()) throw ConfigError("target beam outside 0..2^k-1");
}

double JointLTEvaluator::conditional_switch_coverage(double theta, int target) const {
    check_target(target);
    const double s = theta / beams_.gain;
    const double marginal = joint_lt_masked(s, 1);
    if (marginal < 1e-300) throw NegligibleProbability("conditioning event has negligible probability");
    if (target == 0) return 1.0;
    return joint_lt_masked(s, 1 | (std::uint64_t{1} << target)) / marginal;
}

double JointLTEvaluator::conditional_given_outage(double theta, int target) const {
    check_target(target);
    const double s = theta / beams_.gain;
    const double outage = 1.0 - joint_lt_masked(s, 1);
    if (outage < 1e-300) throw NegligibleProbability("conditioning event has negligible probability");
    if (target == 0) return 0.0;
    const double target_cov = joint_lt_masked(s, std::uint64_t{1} << target);
    const double both = joint_lt_masked(s, 1 | (std::uint64_t{1} << target));
    return (target_cov - both) / outage;
}

}  // namespace cascade
