#include "cascade/geometry.hpp"

#include <cmath>
#include <string>

namespace cascade {

double normalize_angle(double phi) {
    double a = std::fmod(phi, kTwoPi);
    if (a < 0.0) a += kTwoPi;
    // fmod of a tiny negative angle can round back up to 2*pi
    if (a >= kTwoPi) a = 0.0;
    return a;
}

CascadeGeometry::CascadeGeometry(double base_radius, std::optional<int> max_stage)
    : base_radius_(base_radius), max_stage_(max_stage) {
    if (!(base_radius > 0.0)) throw ConfigError("base radius R must be positive");
    if (max_stage && *max_stage < 1) throw ConfigError("stage count N must be at least 1");
}

double CascadeGeometry::radius(int n) const {
    if (n < 0) throw ConfigError("stage index must be non-negative");
    if (n == 0) return 0.0;
    return base_radius_ * std::sqrt(std::ldexp(1.0, n) - 1.0);
}

double CascadeGeometry::box_volume(ArcWidth width, int beam_split) const {
    if (beam_split < 0) throw ConfigError("beam split must be non-negative");
    const double v = std::numbers::pi * base_radius_ * base_radius_ / 2.0;
    if (width == ArcWidth::half) return std::ldexp(v, -1 - beam_split);
    return std::ldexp(v, -beam_split);
}

long long CascadeGeometry::arc_index(int n, double phi, ArcWidth width) {
    if (n < 1) throw ConfigError("arc stage must be at least 1");
    if (!(phi >= 0.0 && phi < kTwoPi))
        throw ConfigError("angle " + std::to_string(phi) + " outside [0, 2*pi)");
    const long long count = arc_count(n, width);
    auto idx = static_cast<long long>(std::floor(phi * static_cast<double>(count) / kTwoPi));
    return idx >= count ? count - 1 : idx;
}

int CascadeGeometry::stage_of_radius(double r, StageMode mode) const {
    if (!(r > 0.0)) throw ConfigError("distance must be positive");
    if (mode == StageMode::unit_floor) {
        return static_cast<int>(std::floor(r));
    }
    int n = 0;
    while ((!max_stage_ || n < *max_stage_) && radius(n + 1) < r) ++n;
    return n;
}

}  // namespace cascade
