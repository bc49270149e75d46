#pragma once

#include "fracspec/grid.hpp"

#include <fftw3.h>

#include <mutex>

namespace fracspec {
namespace detail {

// FFTW planning is not thread safe; execution of distinct plans is.
inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

inline void run_fftw(const SpatialGrid& g, std::vector<cplx>& data, int sign) {
    int n[3] = {g.points, g.points, g.points};
    fftw_plan plan = nullptr;
    {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        plan = fftw_plan_dft(g.dim, n, reinterpret_cast<fftw_complex*>(data.data()),
                             reinterpret_cast<fftw_complex*>(data.data()), sign, FFTW_ESTIMATE);
    }
    if (!plan) throw std::runtime_error("dft: FFTW plan creation failed");
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        fftw_destroy_plan(plan);
    }
}

// Map a flat lattice-order index (per-axis t, frequency (pi/R)(t - N/2)) to
// the FFTW standard-order flat index, and report the phase (-1)^{sum m_a}
// that converts between e^{-2 pi i jk/N} sums and plane waves anchored at
// x = -R. N even makes parity of t - N/2 equal parity of t + N/2.
inline std::size_t lattice_to_std(const SpatialGrid& g, std::size_t flat, double& phase) {
    std::array<int, 3> idx{};
    decode_index(g, flat, idx);
    int parity = 0;
    std::size_t out = 0;
    const int n = g.points;
    for (int a = 0; a < g.dim; ++a) {
        const int t = idx[static_cast<std::size_t>(a)];
        const int k = (t + n / 2) % n;
        parity += t + n / 2;
        out = out * static_cast<std::size_t>(n) + static_cast<std::size_t>(k);
    }
    phase = (parity % 2 == 0) ? 1.0 : -1.0;
    return out;
}

} // namespace detail

/// Unitary forward transform: coefficients sample N^{-n/2} sum_j f(x_j) e^{-i xi.x_j}
/// on the lattice xi_t = (pi/R)(t - N/2).
inline SpectrumFunction dft_forward(const GridFunction& f) {
    if (f.values.size() != f.grid.size())
        throw std::invalid_argument("dft_forward: shape mismatch");
    std::vector<cplx> buf = f.values;
    detail::run_fftw(f.grid, buf, FFTW_FORWARD);
    SpectrumFunction s = SpectrumFunction::zero(f.grid);
    const double scale = 1.0 / std::sqrt(static_cast<double>(f.grid.size()));
    for (std::size_t t = 0; t < s.coefficients.size(); ++t) {
        double phase = 1.0;
        const std::size_t k = detail::lattice_to_std(f.grid, t, phase);
        s.coefficients[t] = phase * scale * buf[k];
    }
    return s;
}

/// Inverse of dft_forward; round trip is the identity to round-off.
inline GridFunction dft_inverse(const SpectrumFunction& s) {
    if (s.coefficients.size() != s.grid.size())
        throw std::invalid_argument("dft_inverse: shape mismatch");
    std::vector<cplx> buf(s.grid.size(), cplx{0.0, 0.0});
    const double scale = 1.0 / std::sqrt(static_cast<double>(s.grid.size()));
    for (std::size_t t = 0; t < s.coefficients.size(); ++t) {
        double phase = 1.0;
        const std::size_t k = detail::lattice_to_std(s.grid, t, phase);
        buf[k] = phase * scale * s.coefficients[t];
    }
    detail::run_fftw(s.grid, buf, FFTW_BACKWARD);
    return GridFunction(s.grid, std::move(buf));
}

/// Apply a frequency-space multiplier xi -> psi(xi).
inline SpectrumFunction map_spectrum(const SpectrumFunction& s,
                                     const std::function<cplx(std::span<const double>)>& psi) {
    SpectrumFunction out = s;
    std::array<double, 3> xi{};
    for (std::size_t t = 0; t < out.coefficients.size(); ++t) {
        detail::freq_coords(out.grid, t, xi);
        out.coefficients[t] *= psi(std::span<const double>(xi.data(), static_cast<std::size_t>(out.grid.dim)));
    }
    return out;
}

/// f -> F^{-1}[psi F f].
inline GridFunction apply_multiplier(const GridFunction& f,
                                     const std::function<cplx(std::span<const double>)>& psi) {
    return dft_inverse(map_spectrum(dft_forward(f), psi));
}

/// Trigonometric resampling onto a grid with new_points per axis (same box).
/// Exact for functions band-limited below the coarser Nyquist index.
inline GridFunction resample(const GridFunction& f, int new_points) {
    if (new_points == f.grid.points) return f;
    const SpatialGrid fine = make_grid(f.grid.dim, f.grid.radius, new_points);
    const SpectrumFunction s = dft_forward(f);
    SpectrumFunction sf = SpectrumFunction::zero(fine);
    const int n = f.grid.points, nf = fine.points;
    const int half = std::min(n, nf) / 2;
    std::array<int, 3> idx{};
    for (std::size_t t = 0; t < s.coefficients.size(); ++t) {
        detail::decode_index(f.grid, t, idx);
        std::array<int, 3> fidx{};
        bool keep = true;
        for (int a = 0; a < f.grid.dim; ++a) {
            const int m = idx[static_cast<std::size_t>(a)] - n / 2;
            if (m < -half || m > half - 1) { keep = false; break; }
            fidx[static_cast<std::size_t>(a)] = m + nf / 2;
        }
        if (keep) sf.coefficients[detail::encode_index(fine, fidx)] = s.coefficients[t];
    }
    const double scale = std::pow(static_cast<double>(nf) / n, 0.5 * f.grid.dim);
    for (cplx& c : sf.coefficients) c *= scale;
    return dft_inverse(sf);
}

} // namespace fracspec
