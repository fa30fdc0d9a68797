#include "cascade/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <span>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace cascade {

namespace {

constexpr std::int64_t kMomentBlock = 1024;

int resolve_threads(const McOptions& options) {
#ifdef _OPENMP
    return options.threads > 0 ? options.threads : omp_get_max_threads();
#else
    (void)options;
    return 1;
#endif
}

// Runs body(rng, counts) once per realization and sums the integer counts.
// Integer addition is exact, so the parallel result matches the serial one
// for any schedule.
template <class Body>
std::vector<std::int64_t> count_realizations(std::int64_t n, std::uint64_t seed, std::size_t width,
                                             const McOptions& options, Body&& body) {
    std::vector<std::int64_t> totals(width, 0);
    if (options.execution == Execution::serial) {
        for (std::int64_t i = 0; i < n; ++i) {
            Rng rng = substream(seed, static_cast<std::uint64_t>(i));
            body(rng, std::span<std::int64_t>(totals));
        }
        return totals;
    }
    const int threads = resolve_threads(options);
#pragma omp parallel num_threads(threads)
    {
        std::vector<std::int64_t> local(width, 0);
#pragma omp for schedule(dynamic, 256)
        for (std::int64_t i = 0; i < n; ++i) {
            Rng rng = substream(seed, static_cast<std::uint64_t>(i));
            body(rng, std::span<std::int64_t>(local));
        }
#pragma omp critical
        for (std::size_t j = 0; j < width; ++j) totals[j] += local[j];
    }
    return totals;
}

struct MomentSums {
    std::vector<double> sum;
    std::vector<double> sum_sq;
};

// Real-valued sums are accumulated per fixed block of realizations and the
// block partials reduced in block order, so the result does not depend on
// the thread count.
template <class Body>
MomentSums moment_realizations(std::int64_t n, std::uint64_t seed, std::size_t width,
                               const McOptions& options, Body&& body) {
    const std::int64_t blocks = (n + kMomentBlock - 1) / kMomentBlock;
    std::vector<MomentSums> partial(static_cast<std::size_t>(blocks));
    auto run_block = [&](std::int64_t b) {
        auto& out = partial[static_cast<std::size_t>(b)];
        out.sum.assign(width, 0.0);
        out.sum_sq.assign(width, 0.0);
        std::vector<double> values(width);
        const std::int64_t end = std::min(n, (b + 1) * kMomentBlock);
        for (std::int64_t i = b * kMomentBlock; i < end; ++i) {
            Rng rng = substream(seed, static_cast<std::uint64_t>(i));
            std::fill(values.begin(), values.end(), 0.0);
            body(rng, std::span<double>(values));
            for (std::size_t j = 0; j < width; ++j) {
                out.sum[j] += values[j];
                out.sum_sq[j] += values[j] * values[j];
            }
        }
    };
    if (options.execution == Execution::serial) {
        for (std::int64_t b = 0; b < blocks; ++b) run_block(b);
    } else {
        const int threads = resolve_threads(options);
#pragma omp parallel for num_threads(threads) schedule(dynamic, 1)
        for (std::int64_t b = 0; b < blocks; ++b) run_block(b);
    }
    MomentSums total{std::vector<double>(width, 0.0), std::vector<double>(width, 0.0)};
    for (const auto& part : partial) {
        for (std::size_t j = 0; j < width; ++j) {
            total.sum[j] += part.sum[j];
            total.sum_sq[j] += part.sum_sq[j];
        }
    }
    return total;
}

Estimate proportion(std::int64_t hits, std::int64_t n, std::uint64_t seed) {
    Estimate e;
    e.sample_count = n;
    e.seed = seed;
    const double p = static_cast<double>(hits) / static_cast<double>(n);
    e.mean = p;
    const double nd = static_cast<double>(n);
    e.std_error = n > 1 ? std::sqrt(nd / (nd - 1.0) * p * (1.0 - p) / nd) : 0.0;
    return e;
}

Estimate ratio(std::int64_t hits, std::int64_t given, std::int64_t n, std::uint64_t seed) {
    Estimate e;
    e.sample_count = n;
    e.seed = seed;
    if (given == 0) {
        e.mean = std::numeric_limits<double>::quiet_NaN();
        e.std_error = std::numeric_limits<double>::quiet_NaN();
        return e;
    }
    const double r = static_cast<double>(hits) / static_cast<double>(given);
    e.mean = r;
    e.std_error = std::sqrt(r * (1.0 - r) / static_cast<double>(given));
    return e;
}

void check_run(const ModelParams& params, const BeamConfig& beams, std::int64_t n_samples) {
    params.validate();
    beams.validate();
    if (n_samples < kMinSamples)
        throw ConfigError("at least " + std::to_string(kMinSamples) + " samples are required");
}

double sir(double gain, double fade, double interf) {
    return interf > 0.0 ? gain * fade / interf : std::numeric_limits<double>::infinity();
}

}  // namespace

Rng substream(std::uint64_t seed, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    return Rng(seq);
}

ModelParams simulated_params(const ModelParams& params, const McOptions& options) {
    ModelParams out = params;
    if (params.infinite()) {
        if (!options.truncation_stage)
            throw ConfigError("simulating an infinite cascade needs a truncation stage");
        out.stages = *options.truncation_stage;
    }
    out.validate();
    return out;
}

double tail_mean_bound(const ModelParams& params, int stage) {
    const double x = params.p * params.K + params.q();
    if (!(2.0 * x < 1.0)) return std::numeric_limits<double>::infinity();
    const double v = CascadeGeometry(params.base_radius).box_volume();
    return params.lambda * v * std::ldexp(1.0, stage + 1) * std::pow(x, stage) / (1.0 - 2.0 * x);
}

Realization sample_realization(const ModelParams& params, int beam_count, Rng& rng, StageMode mode) {
    if (params.infinite()) throw ConfigError("realizations need a finite stage count");
    if (beam_count < 1) throw ConfigError("at least one serving beam is required");
    const CascadeGeometry geometry = CascadeGeometry::from(params);
    const double outer = geometry.radius(*params.stages);
    const double mean_count = params.lambda * std::numbers::pi * outer * outer;

    Realization real;
    std::int64_t count = 0;
    if (mean_count > 0.0) count = std::poisson_distribution<std::int64_t>(mean_count)(rng);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::exponential_distribution<double> fade(1.0);
    real.bs.reserve(static_cast<std::size_t>(count));
    real.fades.reserve(static_cast<std::size_t>(count));
    for (std::int64_t i = 0; i < count; ++i) {
        const double r = outer * std::sqrt(unit(rng));
        const double phi = normalize_angle(kTwoPi * unit(rng));
        real.bs.push_back({r, phi});
        real.fades.push_back(fade(rng));
    }

    real.tree = sample_tree(params, rng);
    real.link_gain.reserve(real.bs.size());
    for (const auto& x : real.bs) {
        if (real.tree)
            real.link_gain.push_back(attenuation(*real.tree, x, params.K));
        else
            real.link_gain.push_back(x.r > 0.0 ? independent_penetration(params, x.r, rng, mode) : 1.0);
    }
    real.serving_fades.resize(static_cast<std::size_t>(beam_count));
    for (auto& h : real.serving_fades) h = fade(rng);
    return real;
}

double interference(const Realization& real, std::optional<int> beam, const BeamConfig& beams) {
    double total = 0.0;
    for (std::size_t i = 0; i < real.bs.size(); ++i) {
        if (beam && beams.beam_of(real.bs[i].phi) != *beam) continue;
        total += real.fades[i] * real.link_gain[i];
    }
    return total;
}

std::vector<double> beam_interference(const Realization& real, const BeamConfig& beams) {
    std::vector<double> out(static_cast<std::size_t>(beams.beam_count()), 0.0);
    for (std::size_t i = 0; i < real.bs.size(); ++i)
        out[static_cast<std::size_t>(beams.beam_of(real.bs[i].phi))] += real.fades[i] * real.link_gain[i];
    return out;
}

McCoverage estimate_coverage(const ModelParams& params, const BeamConfig& beams,
                             const std::vector<double>& theta_linear, Strategy strategy,
                             std::int64_t n_samples, std::uint64_t seed, const McOptions& options) {
    check_run(params, beams, n_samples);
    const ModelParams sim = simulated_params(params, options);
    const int serving = strategy == Strategy::omni ? 1 : beams.beam_count();

    auto body = [&](Rng& rng, std::span<std::int64_t> counts) {
        const Realization real = sample_realization(sim, serving, rng, options.stage_mode);
        double best = 0.0;
        if (strategy == Strategy::omni) {
            best = sir(1.0, real.serving_fades[0], interference(real));
        } else {
            const auto per_beam = beam_interference(real, beams);
            const std::size_t used = strategy == Strategy::random_beam ? 1 : per_beam.size();
            for (std::size_t l = 0; l < used; ++l)
                best = std::max(best, sir(beams.gain, real.serving_fades[l], per_beam[l]));
        }
        for (std::size_t t = 0; t < theta_linear.size(); ++t)
            if (best >= theta_linear[t]) ++counts[t];
    };
    const auto counts = count_realizations(n_samples, seed, theta_linear.size(), options, body);

    McCoverage out;
    out.strategy = strategy;
    out.theta_linear = theta_linear;
    for (auto c : counts) out.points.push_back(proportion(c, n_samples, seed));
    return out;
}

std::vector<McConditional> estimate_conditional(const ModelParams& params, const BeamConfig& beams,
                                                double theta, const std::vector<int>& targets,
                                                std::int64_t n_samples, std::uint64_t seed,
                                                const McOptions& options) {
    check_run(params, beams, n_samples);
    for (int t : targets)
        if (t < 0 || t >= beams.beam_count()) throw ConfigError("target beam outside 0..2^k-1");
    const ModelParams sim = simulated_params(params, options);

    // counts[0]: source covered; then per target (covered & target, outage & target).
    const std::size_t width = 1 + 2 * targets.size();
    auto body = [&](Rng& rng, std::span<std::int64_t> counts) {
        const Realization real = sample_realization(sim, beams.beam_count(), rng, options.stage_mode);
        const auto per_beam = beam_interference(real, beams);
        const bool source = sir(beams.gain, real.serving_fades[0], per_beam[0]) > theta;
        if (source) ++counts[0];
        for (std::size_t j = 0; j < targets.size(); ++j) {
            const auto l = static_cast<std::size_t>(targets[j]);
            if (!(sir(beams.gain, real.serving_fades[l], per_beam[l]) > theta)) continue;
            ++counts[source ? 1 + 2 * j : 2 + 2 * j];
        }
    };
    const auto counts = count_realizations(n_samples, seed, width, options, body);
    if (counts[0] == 0) throw NegligibleProbability("conditioning event has negligible probability");

    std::vector<McConditional> out;
    for (std::size_t j = 0; j < targets.size(); ++j) {
        McConditional c;
        c.target = targets[j];
        c.given_coverage = ratio(counts[1 + 2 * j], counts[0], n_samples, seed);
        c.given_outage = ratio(counts[2 + 2 * j], n_samples - counts[0], n_samples, seed);
        out.push_back(c);
    }
    return out;
}

InterferenceMoments estimate_interference(const ModelParams& params, std::int64_t n_samples,
                                          std::uint64_t seed, const McOptions& options) {
    check_run(params, BeamConfig{}, n_samples);
    const ModelParams sim = simulated_params(params, options);
    const CascadeGeometry geometry = CascadeGeometry::from(sim);
    const auto stages = static_cast<std::size_t>(*sim.stages);

    auto body = [&](Rng& rng, std::span<double> values) {
        const Realization real = sample_realization(sim, 1, rng, options.stage_mode);
        for (std::size_t i = 0; i < real.bs.size(); ++i) {
            const double contribution = real.fades[i] * real.link_gain[i];
            const double r = real.bs[i].r;
            const auto annulus = r > 0.0 ? static_cast<std::size_t>(geometry.stage_of_radius(r)) : 0;
            values[0] += contribution;
            values[1 + annulus] += contribution;
        }
    };
    const auto sums = moment_realizations(n_samples, seed, 1 + stages, options, body);

    auto to_estimate = [&](std::size_t j) {
        const double nd = static_cast<double>(n_samples);
        Estimate e;
        e.sample_count = n_samples;
        e.seed = seed;
        e.mean = sums.sum[j] / nd;
        const double var = std::max(0.0, (sums.sum_sq[j] - nd * e.mean * e.mean) / (nd - 1.0));
        e.std_error = std::sqrt(var / nd);
        return e;
    };
    InterferenceMoments out;
    out.total = to_estimate(0);
    for (std::size_t n = 0; n < stages; ++n) out.per_stage.push_back(to_estimate(1 + n));
    return out;
}

}  // namespace cascade
