#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace cascade {

/// Invalid model or run configuration. The message names the violated constraint.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Infinite-cascade parameters for which the fixed-point iteration has no
/// finite limit (mean interference grows geometrically with the stage).
class DivergentRegime : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IterationBudgetExhausted : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NegligibleProbability : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

enum class Variant { basic, less_correlated, periodic, independent };

/// How the independent model counts obstacles between the user and a BS at distance r.
enum class StageMode {
    geometric,   ///< number of cascade circles strictly inside r
    unit_floor  ///< floor(r), unit-spaced obstacles
};

std::string_view to_string(Variant v);
std::string_view to_string(StageMode m);
Variant parse_variant(std::string_view name);
StageMode parse_stage_mode(std::string_view name);

/// Blockage environment. `stages` empty means the infinite cascade.
struct ModelParams {
    double lambda = 0.1;
    double base_radius = 1.0;
    double p = 0.5;
    double K = 0.1;
    std::optional<int> stages = 5;
    Variant variant = Variant::basic;

    double q() const { return 1.0 - p; }
    bool infinite() const { return !stages.has_value(); }

    /// Blockage probability actually used by the variant (periodic pins it to 1/2).
    double effective_p() const { return variant == Variant::periodic ? 0.5 : p; }

    /// Throws ConfigError naming the first violated constraint.
    void validate() const;
};

}  // namespace cascade
