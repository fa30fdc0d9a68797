#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cascade/beams.hpp"
#include "cascade/blockage.hpp"
#include "cascade/params.hpp"

namespace cascade {

/// One snapshot of the network seen from the origin: PPP base stations in the
/// disk of radius R_N with their Rayleigh fades and link attenuations, plus one
/// serving fade per beam for the virtual LOS serving BS.
struct Realization {
    std::vector<Polar> bs;
    std::vector<double> fades;
    std::vector<double> link_gain;       ///< K^{N_x} per BS
    std::vector<double> serving_fades;   ///< one per beam
    std::optional<BlockageTree> tree;    ///< empty for the independent model
};

/// Mean of i.i.d. samples with its standard error (sample sd / sqrt(n)).
struct Estimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::int64_t sample_count = 0;
    std::uint64_t seed = 0;
};

enum class Strategy { omni, best_beam, random_beam };
enum class Execution { serial, parallel };

struct McOptions {
    Execution execution = Execution::parallel;
    int threads = 0;                      ///< 0: OpenMP default
    std::optional<int> truncation_stage;  ///< required for infinite cascades
    StageMode stage_mode = StageMode::geometric;
};

inline constexpr std::int64_t kMinSamples = 100;

/// Independent per-realization stream derived from (seed, index).
Rng substream(std::uint64_t seed, std::uint64_t index);

/// Finite-stage parameters actually simulated (substitutes the truncation
/// stage for an infinite cascade).
ModelParams simulated_params(const ModelParams& params, const McOptions& options);

/// Mean interference beyond stage `stage` of an infinite basic cascade:
/// lambda * sum_{n > stage} 2^n V (pK + q)^(n-1).
double tail_mean_bound(const ModelParams& params, int stage);

/// Draw order: BS count, then (r, phi, fade) per BS, then the tree, then
/// per-link independent penetrations, then serving fades.
Realization sample_realization(const ModelParams& params, int beam_count, Rng& rng,
                               StageMode mode = StageMode::geometric);

/// Total interference, or only the BSs inside `beam` when given.
double interference(const Realization& real, std::optional<int> beam = std::nullopt,
                    const BeamConfig& beams = {});

/// Interference per beam, beams in index order.
std::vector<double> beam_interference(const Realization& real, const BeamConfig& beams);

struct McCoverage {
    Strategy strategy = Strategy::omni;
    std::vector<double> theta_linear;
    std::vector<Estimate> points;
};

/// Empirical P(SIR >= theta) per threshold. Omni uses h/J; random beam uses
/// G h^1 / I^1; best beam uses max_l G h^l / I^l.
McCoverage estimate_coverage(const ModelParams& params, const BeamConfig& beams,
                             const std::vector<double>& theta_linear, Strategy strategy,
                             std::int64_t n_samples, std::uint64_t seed, const McOptions& options = {});

struct McConditional {
    int target = 0;
    Estimate given_coverage;  ///< P(SIR_target > theta | SIR_0 > theta)
    Estimate given_outage;    ///< P(SIR_target > theta | SIR_0 <= theta)
};

/// Ratio estimators for a beam switch from beam 0 to each target (0-based);
/// standard errors by the delta method, which reduces to sqrt(r(1-r)/n_cond).
std::vector<McConditional> estimate_conditional(const ModelParams& params, const BeamConfig& beams,
                                                double theta, const std::vector<int>& targets,
                                                std::int64_t n_samples, std::uint64_t seed,
                                                const McOptions& options = {});

struct InterferenceMoments {
    Estimate total;
    std::vector<Estimate> per_stage;  ///< annulus n in slot n-1
};

/// Sample mean of the total interference and of each annulus' contribution.
InterferenceMoments estimate_interference(const ModelParams& params, std::int64_t n_samples,
                                          std::uint64_t seed, const McOptions& options = {});

}  // namespace cascade
