#pragma once

#include "fracspec/grid.hpp"

#include <cstdint>
#include <random>

namespace fracspec {

/// Deterministic test-function generators.
struct ProbeSpec {
    enum class Kind { Mode, Bump, RandomBandlimited, Constant };
    Kind kind = Kind::Mode;
    std::vector<int> mode;        // Mode: per-axis integer frequencies
    std::vector<double> center;   // Bump
    double width = 1.0;           // Bump
    std::uint64_t seed = 0;       // RandomBandlimited
    int cutoff = 8;               // RandomBandlimited: |m|_inf <= cutoff
};

namespace detail {

// Portable uniform in [-1, 1): fixed mapping of raw mt19937_64 output so the
// probe is bit-identical across platforms.
inline double signed_uniform(std::mt19937_64& rng) {
    return 2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1.0;
}

} // namespace detail

inline GridFunction make_probe(const ProbeSpec& spec, const SpatialGrid& grid) {
    const int dim = grid.dim;
    switch (spec.kind) {
    case ProbeSpec::Kind::Constant:
        return GridFunction(grid, std::vector<cplx>(grid.size(), cplx{1.0, 0.0}));
    case ProbeSpec::Kind::Mode: {
        if (static_cast<int>(spec.mode.size()) != dim)
            throw std::invalid_argument("make_probe: mode needs one integer per axis");
        return sample_closure(grid, [&](std::span<const double> x) {
            double v = 1.0;
            for (int a = 0; a < dim; ++a) v *= std::cos(spec.mode[static_cast<std::size_t>(a)] * x[static_cast<std::size_t>(a)]);
            return cplx{v, 0.0};
        });
    }
    case ProbeSpec::Kind::Bump: {
        if (static_cast<int>(spec.center.size()) != dim)
            throw std::invalid_argument("make_probe: bump center needs one coordinate per axis");
        if (!(spec.width > 0.0)) throw std::invalid_argument("make_probe: bump width must be positive");
        for (int a = 0; a < dim; ++a) {
            const double c = spec.center[static_cast<std::size_t>(a)];
            if (std::abs(c) + spec.width > 0.9 * grid.radius)
                throw std::invalid_argument("make_probe: bump support violates the 10% box margin");
        }
        return sample_closure(grid, [&](std::span<const double> x) {
            double r2 = 0.0;
            for (int a = 0; a < dim; ++a) {
                const double d = (x[static_cast<std::size_t>(a)] - spec.center[static_cast<std::size_t>(a)]) / spec.width;
                r2 += d * d;
            }
            if (r2 >= 1.0) return cplx{0.0, 0.0};
            return cplx{std::exp(-1.0 / (1.0 - r2)), 0.0};
        });
    }
    case ProbeSpec::Kind::RandomBandlimited: {
        if (spec.cutoff < 1 || spec.cutoff >= grid.points / 2)
            throw std::invalid_argument("make_probe: cutoff must lie in [1, N/2)");
        std::mt19937_64 rng(spec.seed);
        // Iterate modes in a fixed row-major order so the probe is a pure
        // function of (seed, cutoff, grid).
        const int c = spec.cutoff;
        std::vector<std::vector<double>> amps; // {a, b} per mode
        std::vector<std::array<int, 3>> modes;
        std::array<int, 3> m{};
        const int lo = -c, hi = c;
        std::function<void(int)> rec = [&](int axis) {
            if (axis == dim) {
                modes.push_back(m);
                amps.push_back({detail::signed_uniform(rng), detail::signed_uniform(rng)});
                return;
            }
            for (int v = lo; v <= hi; ++v) {
                m[static_cast<std::size_t>(axis)] = v;
                rec(axis + 1);
            }
        };
        rec(0);
        const double w = grid.freq_spacing();
        return sample_closure(grid, [&](std::span<const double> x) {
            double v = 0.0;
            for (std::size_t i = 0; i < modes.size(); ++i) {
                double phase = 0.0;
                for (int a = 0; a < dim; ++a) phase += w * modes[i][static_cast<std::size_t>(a)] * x[static_cast<std::size_t>(a)];
                v += amps[i][0] * std::cos(phase) + amps[i][1] * std::sin(phase);
            }
            return cplx{v, 0.0};
        });
    }
    }
    throw std::invalid_argument("make_probe: unknown probe kind");
}

} // namespace fracspec
