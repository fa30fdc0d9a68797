#pragma once

// Independent reference computations used only by the tests. None of these
// call into the recursion code under test.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

namespace oracle {

inline double shot_noise_lt(double s, double volume, double lambda) {
    return std::exp(-lambda * volume * s / (1.0 + s));
}

inline double half_volume(double R) { return std::numbers::pi * R * R / 2.0; }

inline double outer_radius(double R, int N) { return R * std::sqrt(std::pow(2.0, N) - 1.0); }

/// exp(-lambda pi R_N^2 s/(1+s)): full disk with every link unobstructed.
inline double open_disk_lt(double lambda, double R, int N, double s) {
    const double rn = outer_radius(R, N);
    return shot_noise_lt(s, std::numbers::pi * rn * rn, lambda);
}

inline double int_pow(double K, int e) {
    double out = 1.0;
    for (int i = 0; i < e; ++i) out *= K;
    return out;
}

/// Exhaustive expectation over every blockage configuration of a cone whose
/// stage-n boxes number 2^(n-1) (half plane for the basic cascade, quarter
/// plane for half arcs). Each stage-n box sits behind its n-1 ancestor arcs.
inline double enumerate_cone(double lambda, double volume, double p, double K, int N, double s) {
    const int bits = (1 << (N - 1)) - 1;  // arcs on circles 1..N-1 inside the cone
    double total = 0.0;
    for (std::uint64_t cfg = 0; cfg < (std::uint64_t{1} << bits); ++cfg) {
        double weight = 1.0;
        for (int b = 0; b < bits; ++b) weight *= ((cfg >> b) & 1) ? p : 1.0 - p;
        if (weight == 0.0) continue;
        double value = 1.0;
        for (int n = 1; n <= N; ++n) {
            for (int box = 0; box < (1 << (n - 1)); ++box) {
                int e = 0;
                for (int j = 1; j < n; ++j) {
                    const int arc = box >> (n - j);
                    const int offset = (1 << (j - 1)) - 1;
                    e += static_cast<int>((cfg >> (offset + arc)) & 1);
                }
                value *= shot_noise_lt(s * int_pow(K, e), volume, lambda);
            }
        }
        total += weight * value;
    }
    return total;
}

/// Exhaustive joint transform E exp(-sum_l s_l I^l) over the full plane with
/// 2^k in-phase beams. Feasible for N <= 4.
inline double enumerate_joint(double lambda, double R, double p, double K, int N, int k,
                              std::span<const double> s) {
    const double V = half_volume(R);
    const int bits = (1 << N) - 2;  // circles 1..N-1, 2^j arcs each
    double total = 0.0;
    for (std::uint64_t cfg = 0; cfg < (std::uint64_t{1} << bits); ++cfg) {
        double weight = 1.0;
        for (int b = 0; b < bits; ++b) weight *= ((cfg >> b) & 1) ? p : 1.0 - p;
        if (weight == 0.0) continue;
        double value = 1.0;
        for (int n = 1; n <= N; ++n) {
            for (int box = 0; box < (1 << n); ++box) {
                int e = 0;
                for (int j = 1; j < n; ++j) {
                    const int arc = box >> (n - j);
                    const int offset = (1 << j) - 2;
                    e += static_cast<int>((cfg >> (offset + arc)) & 1);
                }
                const double att = int_pow(K, e);
                if (n <= k) {
                    const int per = 1 << (k - n);
                    for (int l = box * per; l < (box + 1) * per; ++l)
                        value *= shot_noise_lt(s[l] * att, V / per, lambda);
                } else {
                    value *= shot_noise_lt(s[box >> (n - k)] * att, V, lambda);
                }
            }
        }
        total += weight * value;
    }
    return total;
}

inline double choose(int n, int r) {
    double out = 1.0;
    for (int i = 1; i <= r; ++i) out = out * (n - r + i) / i;
    return out;
}

/// Periodic cascade, full plane: exactly one arc of every sibling pair is
/// blocked, so stage m holds 2*C(m-1, e) boxes behind e obstacles whatever
/// the realization.
inline double periodic_total(double lambda, double R, double K, int N, double s) {
    const double V = half_volume(R);
    double out = 1.0;
    for (int m = 1; m <= N; ++m)
        for (int e = 0; e < m; ++e)
            out *= std::pow(shot_noise_lt(s * int_pow(K, e), V, lambda), 2.0 * choose(m - 1, e));
    return out;
}

/// exp(-2 pi lambda int_0^rmax (1 - E[1/(1 + s S(r))]) r dr) by composite
/// Simpson on each interval where n(r) is constant.
template <class CountFn>
double independent_quadrature(double lambda, double p, double K, double s, std::vector<double> breaks,
                              CountFn obstacles) {
    auto integrand = [&](double r, int n) {
        double mean = 0.0;
        for (int l = 0; l <= n; ++l)
            mean += choose(n, l) * std::pow(p, l) * std::pow(1.0 - p, n - l) / (1.0 + s * int_pow(K, l));
        return (1.0 - mean) * r;
    };
    double integral = 0.0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        const double a = breaks[i];
        const double b = breaks[i + 1];
        const int n = obstacles(0.5 * (a + b));
        const int panels = 2000;
        const double h = (b - a) / panels;
        double acc = integrand(a, n) + integrand(b, n);
        for (int j = 1; j < panels; ++j) acc += (j % 2 ? 4.0 : 2.0) * integrand(a + j * h, n);
        integral += acc * h / 3.0;
    }
    return std::exp(-2.0 * std::numbers::pi * lambda * integral);
}

/// Shared log-spaced grid s in [1e-2, 1e3].
inline std::vector<double> log_grid(int points = 50) {
    std::vector<double> out;
    for (int i = 0; i < points; ++i) out.push_back(std::pow(10.0, -2.0 + 5.0 * i / (points - 1)));
    return out;
}

}  // namespace oracle
