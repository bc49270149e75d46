#pragma once

#include "fracspec/besov.hpp"
#include "fracspec/elliptic.hpp"
#include "fracspec/symbol.hpp"

namespace fracspec {

namespace detail {

// phi_1(w) = (e^w - 1)/w, phi_2(w) = (e^w - 1 - w)/w^2, series near 0 to
// avoid cancellation.
inline cplx phi1_fn(cplx w) {
    if (std::abs(w) < 0.1) {
        cplx acc{1.0, 0.0}, term{1.0, 0.0};
        for (int k = 1; k <= 12; ++k) {
            term *= w / static_cast<double>(k + 1);
            acc += term;
        }
        return acc;
    }
    return (std::exp(w) - 1.0) / w;
}

inline cplx phi2_fn(cplx w) {
    if (std::abs(w) < 0.1) {
        cplx acc{0.5, 0.0}, term{0.5, 0.0};
        for (int k = 1; k <= 12; ++k) {
            term *= w / static_cast<double>(k + 2);
            acc += term;
        }
        return acc;
    }
    return (std::exp(w) - 1.0 - w) / (w * w);
}

inline void check_parabolic_sector(const KernelSet& k, const SpatialGrid& g, double horizon) {
    if (!(k.sector_angle < kPi / 2.0))
        throw std::invalid_argument("parabolic: kernel sector angle must satisfy phi1 < pi/2");
    std::array<double, 3> xi{};
    for (std::size_t t = 0; t < g.size(); ++t) {
        freq_coords(g, t, xi);
        const std::span<const double> sp(xi.data(), static_cast<std::size_t>(g.dim));
        const cplx L = eval_L(sp, k);
        if (!sector_membership(L, k.sector_angle, 1e-12))
            throw std::invalid_argument("parabolic: L(xi) leaves the sector on the lattice");
        if (L.real() < 0.0 && -L.real() * horizon > 600.0) {
            std::ostringstream os;
            os << "parabolic: Re L < 0 would overflow e^{-tL} at xi = (";
            for (int a = 0; a < g.dim; ++a) os << (a ? "," : "") << xi[static_cast<std::size_t>(a)];
            os << ")";
            throw std::runtime_error(os.str());
        }
    }
}

} // namespace detail

/// Cauchy problem du/dt + sum a_alpha * D^alpha u = f, u(0) = 0 on [0, T]
/// with M uniform steps; the forcing is sampled on the M+1 step nodes.
struct ParabolicProblem {
    KernelSet kernels;
    MixedFunction forcing;
    double horizon = 1.0;
    int steps = 128;

    void validate() const {
        kernels.validate();
        forcing.validate();
        if (!(horizon > 0.0) || steps < 1)
            throw std::invalid_argument("ParabolicProblem: need T > 0 and steps >= 1");
        if (static_cast<int>(forcing.slices.size()) != steps + 1)
            throw std::invalid_argument("ParabolicProblem: forcing must have steps + 1 slices");
        if (std::abs(forcing.dt * steps - horizon) > 1e-10 * horizon)
            throw std::invalid_argument("ParabolicProblem: forcing step does not match T / steps");
        if (forcing.slices.front().grid.dim != kernels.dim)
            throw std::invalid_argument("ParabolicProblem: grid/kernel dimension mismatch");
        detail::check_parabolic_sector(kernels, forcing.slices.front().grid, horizon);
    }
};

struct ParabolicSolution {
    MixedFunction u;
    std::vector<double> residual_norms; // midpoint residuals per step, relative
};

/// Per-frequency Duhamel integration, exact for forcing spectra that are
/// piecewise linear in time (exponential trapezoid rule, second order):
///   u^_{j+1} = e^{-dt L} u^_j + dt [ phi_1(-dt L) f^_j + phi_2(-dt L) (f^_{j+1} - f^_j) ].
inline ParabolicSolution duhamel_solve(const ParabolicProblem& p) {
    p.validate();
    const SpatialGrid& g = p.forcing.slices.front().grid;
    const int M = p.steps;
    const double dt = p.horizon / M;
    const std::size_t total = g.size();

    std::vector<SpectrumFunction> fhat;
    fhat.reserve(static_cast<std::size_t>(M) + 1);
    for (const GridFunction& s : p.forcing.slices) fhat.push_back(dft_forward(s));

    std::vector<cplx> L(total), E(total), W1(total), W2(total);
    std::array<double, 3> xi{};
    double fmax = 0.0;
    for (std::size_t t = 0; t < total; ++t) {
        detail::freq_coords(g, t, xi);
        L[t] = eval_L(std::span<const double>(xi.data(), static_cast<std::size_t>(g.dim)), p.kernels);
        const cplx z = -dt * L[t];
        E[t] = std::exp(z);
        W1[t] = dt * detail::phi1_fn(z);
        W2[t] = dt * detail::phi2_fn(z);
    }
    for (const SpectrumFunction& s : fhat)
        for (const cplx& c : s.coefficients) fmax = std::max(fmax, std::abs(c));

    ParabolicSolution sol;
    sol.u.dt = dt;
    sol.u.slices.reserve(static_cast<std::size_t>(M) + 1);
    sol.residual_norms.reserve(static_cast<std::size_t>(M));

    std::vector<cplx> uh(total, cplx{0.0, 0.0});
    SpectrumFunction cur = SpectrumFunction::zero(g);
    sol.u.slices.push_back(dft_inverse(cur)); // u(0) = 0 exactly
    sol.u.slices.front().values.assign(total, cplx{0.0, 0.0});
    for (int j = 0; j < M; ++j) {
        const std::vector<cplx>& fj = fhat[static_cast<std::size_t>(j)].coefficients;
        const std::vector<cplx>& fj1 = fhat[static_cast<std::size_t>(j) + 1].coefficients;
        double res = 0.0;
        for (std::size_t t = 0; t < total; ++t) {
            const cplx next = E[t] * uh[t] + W1[t] * fj[t] + W2[t] * (fj1[t] - fj[t]);
            const cplx mid = (next - uh[t]) / dt + L[t] * 0.5 * (uh[t] + next) - 0.5 * (fj[t] + fj1[t]);
            res += std::norm(mid);
            uh[t] = next;
        }
        sol.residual_norms.push_back(fmax > 0.0 ? std::sqrt(res) / fmax : std::sqrt(res));
        cur.coefficients = uh;
        sol.u.slices.push_back(dft_inverse(cur));
    }
    return sol;
}

/// F^{-1}[e^{-t L(xi)} g^(xi)], the semigroup generated by -O.
inline GridFunction semigroup_apply(double t, const GridFunction& g, const KernelSet& k) {
    if (!(t >= 0.0)) throw std::invalid_argument("semigroup_apply: t must be >= 0");
    k.validate();
    detail::check_parabolic_sector(k, g.grid, t == 0.0 ? 1.0 : t);
    return apply_multiplier(g, [t, &k](std::span<const double> xi) {
        return std::exp(-t * eval_L(xi, k));
    });
}

namespace detail {

/// 2nd-order time derivative of the slices (central, one-sided at the ends).
inline MixedFunction time_derivative(const MixedFunction& u) {
    const int n = static_cast<int>(u.slices.size());
    if (n < 3) throw std::invalid_argument("time_derivative: need at least 3 slices");
    MixedFunction out;
    out.dt = u.dt;
    out.slices.resize(static_cast<std::size_t>(n), GridFunction::zero(u.slices.front().grid));
    const double inv2 = 1.0 / (2.0 * u.dt);
    for (std::size_t i = 0; i < u.slices.front().values.size(); ++i) {
        out.slices[0].values[i] =
            (-3.0 * u.slices[0].values[i] + 4.0 * u.slices[1].values[i] - u.slices[2].values[i]) * inv2;
        for (int j = 1; j + 1 < n; ++j)
            out.slices[static_cast<std::size_t>(j)].values[i] =
                (u.slices[static_cast<std::size_t>(j + 1)].values[i] -
                 u.slices[static_cast<std::size_t>(j - 1)].values[i]) * inv2;
        out.slices[static_cast<std::size_t>(n - 1)].values[i] =
            (3.0 * u.slices[static_cast<std::size_t>(n - 1)].values[i] -
             4.0 * u.slices[static_cast<std::size_t>(n - 2)].values[i] +
             u.slices[static_cast<std::size_t>(n - 3)].values[i]) * inv2;
    }
    return out;
}

inline MixedFunction map_slices(const MixedFunction& u,
                                const std::function<GridFunction(const GridFunction&)>& op) {
    MixedFunction out;
    out.dt = u.dt;
    out.slices.reserve(u.slices.size());
    for (const GridFunction& s : u.slices) out.slices.push_back(op(s));
    return out;
}

} // namespace detail

/// Maximal-regularity report for the Cauchy problem: mixed Y^s norms of
/// du/dt, of every term a_alpha * D^alpha u, and of u, against ||f||_{Y^s}.
/// Rows carry lambda = 0; alpha_index -1 is the du/dt row. PASS iff the total
/// ratio is bounded by `bound`.
inline CoercivityReport parabolic_coercivity_report(const ParabolicProblem& p,
                                                    const BesovParams& bp_space,
                                                    const BesovParams& bp_time,
                                                    double bound = 50.0) {
    p.validate();
    const double fnorm = mixed_norm(p.forcing, bp_space, bp_time);
    if (!(fnorm > 0.0)) throw std::invalid_argument("parabolic_coercivity_report: f must be nonzero");

    const ParabolicSolution sol = duhamel_solve(p);
    const double unorm = mixed_norm(sol.u, bp_space, bp_time);
    const double utnorm = mixed_norm(detail::time_derivative(sol.u), bp_space, bp_time);
    double total = utnorm + unorm;

    CoercivityReport rep;
    rep.norm_descriptor = "Y^s (outer time Besov of spatial Besov slices)";
    std::vector<double> term_norms(p.kernels.terms.size());
    for (std::size_t ti = 0; ti < p.kernels.terms.size(); ++ti) {
        const MixedFunction term = detail::map_slices(
            sol.u, [&](const GridFunction& s) { return term_apply(s, p.kernels.terms[ti], true); });
        term_norms[ti] = mixed_norm(term, bp_space, bp_time);
        total += term_norms[ti];
    }
    const double ratio = total / fnorm;
    rep.rows.push_back({cplx{0.0, 0.0}, -1, utnorm, unorm, ratio, true});
    for (std::size_t ti = 0; ti < term_norms.size(); ++ti)
        rep.rows.push_back({cplx{0.0, 0.0}, static_cast<int>(ti), term_norms[ti], unorm, ratio, true});
    rep.max_ratio = rep.min_ratio = ratio;
    rep.uniform = std::isfinite(ratio) && ratio <= bound;
    std::ostringstream os;
    os << "||du/dt|| = " << utnorm << ", ||u|| = " << unorm << ", ||f|| = " << fnorm
       << ", bound " << bound;
    rep.detail = os.str();
    return rep;
}

} // namespace fracspec
