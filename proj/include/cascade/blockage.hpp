#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "cascade/geometry.hpp"
#include "cascade/params.hpp"

namespace cascade {

using Rng = std::mt19937_64;

/// Position relative to the user at the origin; phi in [0, 2*pi).
struct Polar {
    double r = 0.0;
    double phi = 0.0;
};

/// Largest stage count for which a dense tree is materialized.
inline constexpr int kMaxTreeStages = 24;

/// One realization of the obstacle arcs. Stage n (1-based) stores one byte
/// per arc on circle n; 1 means blocked.
class BlockageTree {
public:
    BlockageTree(Variant variant, CascadeGeometry geometry, std::vector<std::vector<std::uint8_t>> bits);

    Variant variant() const { return variant_; }
    const CascadeGeometry& geometry() const { return geometry_; }
    ArcWidth arc_width() const { return arc_width_of(variant_); }
    int stage_count() const { return static_cast<int>(bits_.size()); }

    std::span<const std::uint8_t> stage_bits(int n) const { return bits_.at(static_cast<std::size_t>(n - 1)); }
    bool blocked(int n, long long arc) const { return stage_bits(n)[static_cast<std::size_t>(arc)] != 0; }

    /// Text rendering: one line per stage, arcs as '0'/'1'.
    std::string dump() const;

private:
    Variant variant_;
    CascadeGeometry geometry_;
    std::vector<std::vector<std::uint8_t>> bits_;
};

/// Draws a tree for the variant. The independent model has no tree (blockage
/// is drawn per link), so it yields nullopt.
std::optional<BlockageTree> sample_tree(const ModelParams& params, Rng& rng);

/// Blocked arcs on the radial segment from the origin to `x`.
int blockage_count(const BlockageTree& tree, Polar x);

/// K^count with 0^0 = 1.
double penetration_power(double K, int count);

double attenuation(const BlockageTree& tree, Polar x, double K);

/// Independent model: K^L with L ~ Binomial(n(r), p).
double independent_penetration(const ModelParams& params, double r, Rng& rng,
                               StageMode mode = StageMode::geometric);

}  // namespace cascade
