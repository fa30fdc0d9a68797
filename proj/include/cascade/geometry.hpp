#pragma once

#include <numbers>
#include <optional>

#include "cascade/params.hpp"

namespace cascade {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Width of the obstacle arcs at a stage: whole arcs, or the halves used by
/// the less-correlated cascade.
enum class ArcWidth { full, half };

inline ArcWidth arc_width_of(Variant v) {
    return v == Variant::less_correlated ? ArcWidth::half : ArcWidth::full;
}

/// Wraps any finite angle into [0, 2*pi).
double normalize_angle(double phi);

/// Radial cascade: circle n has radius R*sqrt(2^n - 1), so every box between
/// consecutive circles (bounded by two stage-n arcs) has area pi*R^2/2.
class CascadeGeometry {
public:
    /// `max_stage` empty means the unbounded cascade.
    explicit CascadeGeometry(double base_radius, std::optional<int> max_stage = std::nullopt);

    static CascadeGeometry from(const ModelParams& params) {
        return CascadeGeometry(params.base_radius, params.stages);
    }

    double base_radius() const { return base_radius_; }
    std::optional<int> max_stage() const { return max_stage_; }

    double radius(int n) const;

    /// Box area V/2^beam_split in the basic cascade (V = pi*R^2/2); V/2 for half arcs.
    double box_volume(ArcWidth width = ArcWidth::full, int beam_split = 0) const;

    /// Number of obstacle arcs on circle n.
    static long long arc_count(int n, ArcWidth width) {
        return 1LL << (width == ArcWidth::full ? n : n + 1);
    }

    /// Index of the half-open arc [lo, hi) on circle n containing phi in [0, 2*pi).
    static long long arc_index(int n, double phi, ArcWidth width = ArcWidth::full);

    /// Obstacle count between the origin and distance r.
    int stage_of_radius(double r, StageMode mode = StageMode::geometric) const;

private:
    double base_radius_;
    std::optional<int> max_stage_;
};

}  // namespace cascade
