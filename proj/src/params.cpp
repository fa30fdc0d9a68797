#include "cascade/params.hpp"

#include <cmath>

namespace cascade {

std::string_view to_string(Variant v) {
    switch (v) {
    case Variant::basic: return "basic";
    case Variant::less_correlated: return "less_correlated";
    case Variant::periodic: return "periodic";
    case Variant::independent: return "independent";
    }
    return "?";
}

std::string_view to_string(StageMode m) {
    return m == StageMode::geometric ? "geometric" : "unit_floor";
}

Variant parse_variant(std::string_view name) {
    if (name == "basic") return Variant::basic;
    if (name == "less_correlated" || name == "lc") return Variant::less_correlated;
    if (name == "periodic") return Variant::periodic;
    if (name == "independent") return Variant::independent;
    throw ConfigError("unknown model variant '" + std::string(name) + "'");
}

StageMode parse_stage_mode(std::string_view name) {
    if (name == "geometric") return StageMode::geometric;
    if (name == "unit_floor") return StageMode::unit_floor;
    throw ConfigError("unknown n(r) mode '" + std::string(name) + "'");
}

void ModelParams::validate() const {
    if (!(std::isfinite(lambda) && lambda >= 0.0))
        throw ConfigError("lambda must be a finite non-negative density");
    if (!(std::isfinite(base_radius) && base_radius > 0.0))
        throw ConfigError("base radius R must be positive");
    // p = 0 is admitted as a degenerate (no obstacles) configuration.
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("blockage probability p must lie in [0, 1]");
    if (!(K >= 0.0 && K <= 1.0)) throw ConfigError("penetration factor K must lie in [0, 1]");
    if (stages && *stages < 1) throw ConfigError("stage count N must be at least 1");
    if (!stages) {
        if (variant == Variant::periodic)
            throw ConfigError("the periodic model requires a finite stage count");
        if (!(p > 0.5)) throw ConfigError("the infinite cascade requires p > 1/2");
    }
}

}  // namespace cascade
