#include "cascade/blockage.hpp"

#include <cmath>

namespace cascade {

BlockageTree::BlockageTree(Variant variant, CascadeGeometry geometry,
                           std::vector<std::vector<std::uint8_t>> bits)
    : variant_(variant), geometry_(geometry), bits_(std::move(bits)) {
    if (variant_ == Variant::independent)
        throw ConfigError("the independent model has no blockage tree");
    const ArcWidth width = arc_width();
    for (std::size_t i = 0; i < bits_.size(); ++i) {
        const int n = static_cast<int>(i) + 1;
        if (static_cast<long long>(bits_[i].size()) != CascadeGeometry::arc_count(n, width))
            throw ConfigError("stage " + std::to_string(n) + " bit count does not match the variant");
        if (variant_ == Variant::periodic) {
            for (std::size_t j = 0; j + 1 < bits_[i].size(); j += 2)
                if ((bits_[i][j] != 0) == (bits_[i][j + 1] != 0))
                    throw ConfigError("periodic tree needs exactly one blocked arc per sibling pair");
        }
    }
}

std::string BlockageTree::dump() const {
    std::string out;
    for (const auto& stage : bits_) {
        for (auto b : stage) out.push_back(b ? '1' : '0');
        out.push_back('\n');
    }
    return out;
}

std::optional<BlockageTree> sample_tree(const ModelParams& params, Rng& rng) {
    if (params.infinite())
        throw ConfigError("tree sampling needs a finite truncation stage");
    if (params.variant == Variant::independent) return std::nullopt;
    const int n_stages = *params.stages;
    if (n_stages > kMaxTreeStages)
        throw ConfigError("tree sampling supports at most " + std::to_string(kMaxTreeStages) + " stages");

    const ArcWidth width = arc_width_of(params.variant);
    std::vector<std::vector<std::uint8_t>> bits(static_cast<std::size_t>(n_stages));
    std::bernoulli_distribution blocked(params.p);
    std::bernoulli_distribution coin(0.5);
    for (int n = 1; n <= n_stages; ++n) {
        auto& stage = bits[static_cast<std::size_t>(n - 1)];
        stage.resize(static_cast<std::size_t>(CascadeGeometry::arc_count(n, width)));
        if (params.variant == Variant::periodic) {
            for (std::size_t j = 0; j < stage.size(); j += 2) {
                const bool first = coin(rng);
                stage[j] = first ? 1 : 0;
                stage[j + 1] = first ? 0 : 1;
            }
        } else {
            for (auto& b : stage) b = blocked(rng) ? 1 : 0;
        }
    }
    return BlockageTree(params.variant, CascadeGeometry::from(params), std::move(bits));
}

int blockage_count(const BlockageTree& tree, Polar x) {
    const auto& geo = tree.geometry();
    const ArcWidth width = tree.arc_width();
    const double phi = normalize_angle(x.phi);
    int count = 0;
    for (int n = 1; n <= tree.stage_count() && geo.radius(n) < x.r; ++n)
        count += tree.blocked(n, CascadeGeometry::arc_index(n, phi, width)) ? 1 : 0;
    return count;
}

double penetration_power(double K, int count) {
    if (count == 0) return 1.0;
    double out = 1.0;
    for (int i = 0; i < count; ++i) out *= K;
    return out;
}

double attenuation(const BlockageTree& tree, Polar x, double K) {
    return penetration_power(K, blockage_count(tree, x));
}

double independent_penetration(const ModelParams& params, double r, Rng& rng, StageMode mode) {
    const int obstacles = CascadeGeometry::from(params).stage_of_radius(r, mode);
    if (obstacles == 0) return 1.0;
    std::binomial_distribution<int> blocked(obstacles, params.p);
    return penetration_power(params.K, blocked(rng));
}

}  // namespace cascade
