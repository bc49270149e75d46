#pragma once

#include "fracspec/dft.hpp"
#include "fracspec/fractional.hpp"
#include "fracspec/grid.hpp"
#include "fracspec/report.hpp"

#include <cstdint>
#include <sstream>

namespace fracspec {

/// Parameters of the difference-quotient Besov norm B^s_{p,q}: per-axis
/// smoothness s_i, integrability p, summability q, difference orders m_i,
/// derivative offsets k_i (realized spectrally) and the upper limit h0 of
/// the y-integral. Requires m_i > s_i - k_i > 0.
struct BesovParams {
    std::vector<double> s;
    double p = 2.0;
    double q = 2.0;
    std::vector<int> m;
    std::vector<int> k;
    double h0 = 1.0;
    int quad_points = 64;

    /// Canonical admissible pair: k_i = floor(s_i), m_i = 2. Integer s is
    /// rejected (it breaks s_i - k_i > 0).
    static BesovParams standard(int dim, double s, double p, double q, double h0 = 1.0) {
        if (s == std::floor(s))
            throw std::invalid_argument("BesovParams: integer smoothness not admissible with the canonical pair");
        BesovParams bp;
        bp.s.assign(static_cast<std::size_t>(dim), s);
        bp.k.assign(static_cast<std::size_t>(dim), static_cast<int>(std::floor(s)));
        bp.m.assign(static_cast<std::size_t>(dim), 2);
        bp.p = p;
        bp.q = q;
        bp.h0 = h0;
        bp.validate(dim);
        return bp;
    }

    void validate(int dim) const {
        const std::size_t n = static_cast<std::size_t>(dim);
        if (s.size() != n || m.size() != n || k.size() != n)
            throw std::invalid_argument("BesovParams: per-axis parameter count does not match dim");
        if (!(p >= 1.0) || !(q >= 1.0))
            throw std::invalid_argument("BesovParams: p, q must lie in [1, inf]");
        if (!(h0 > 0.0) || std::isinf(h0))
            throw std::invalid_argument("BesovParams: h0 must be positive and finite");
        if (quad_points < 2)
            throw std::invalid_argument("BesovParams: need at least 2 quadrature points");
        for (std::size_t i = 0; i < n; ++i) {
            if (k[i] < 0 || m[i] < 1)
                throw std::invalid_argument("BesovParams: k_i >= 0 and m_i >= 1 required");
            const double gap = s[i] - k[i];
            if (!(gap > 0.0) || !(static_cast<double>(m[i]) > gap))
                throw std::invalid_argument("BesovParams: need m_i > s_i - k_i > 0");
        }
    }
};

namespace detail {

inline double binom(int n, int r) {
    double v = 1.0;
    for (int i = 1; i <= r; ++i) v = v * (n - r + i) / i;
    return v;
}

/// Cubic Lagrange interpolation on a uniformly indexed row; exact at nodes
/// and for cubic polynomials. Stencils shift one-sided near the edges.
inline cplx cubic_interp_row(std::span<const cplx> row, double pos) {
    const int n = static_cast<int>(row.size());
    int base = static_cast<int>(std::floor(pos)) - 1;
    base = std::clamp(base, 0, n - 4);
    const double u = pos - base;
    const double w0 = -(u - 1.0) * (u - 2.0) * (u - 3.0) / 6.0;
    const double w1 = u * (u - 2.0) * (u - 3.0) / 2.0;
    const double w2 = -u * (u - 1.0) * (u - 3.0) / 2.0;
    const double w3 = u * (u - 1.0) * (u - 2.0) / 6.0;
    const std::size_t b = static_cast<std::size_t>(base);
    return w0 * row[b] + w1 * row[b + 1] + w2 * row[b + 2] + w3 * row[b + 3];
}

/// Integer-order spectral derivative along one axis; the unpaired Nyquist
/// mode is zeroed for odd orders.
inline GridFunction spectral_axis_derivative(const GridFunction& f, int axis, int order) {
    if (order == 0) return f;
    SpectrumFunction s = dft_forward(f);
    const int n = f.grid.points;
    std::array<int, 3> idx{};
    for (std::size_t t = 0; t < s.coefficients.size(); ++t) {
        decode_index(f.grid, t, idx);
        const int m = idx[static_cast<std::size_t>(axis)] - n / 2;
        if (m == -n / 2 && order % 2 != 0) {
            s.coefficients[t] = cplx{0.0, 0.0};
            continue;
        }
        const cplx ix{0.0, f.grid.freq_spacing() * m};
        cplx pw{1.0, 0.0};
        for (int r = 0; r < order; ++r) pw *= ix;
        s.coefficients[t] *= pw;
    }
    return dft_inverse(s);
}

} // namespace detail

/// Domain-restricted forward difference of order m with step y along an axis:
///   (Delta_i^m(y) f)(x) = sum_j (-1)^{m-j} C(m,j) f(x + j y e_i),
/// off-grid points by cubic interpolation, no periodic wrap. The mask marks
/// nodes whose farthest evaluation point x + m y e_i stays inside the box.
struct FiniteDifferenceResult {
    GridFunction diff;
    std::vector<std::uint8_t> mask;
    std::size_t count = 0;
};

inline FiniteDifferenceResult finite_difference(const GridFunction& f, int axis, int order, double step) {
    const SpatialGrid& g = f.grid;
    if (axis < 0 || axis >= g.dim) throw std::invalid_argument("finite_difference: bad axis");
    if (order < 1) throw std::invalid_argument("finite_difference: order must be >= 1");
    if (!(step > 0.0)) throw std::invalid_argument("finite_difference: step must be positive");
    const double h = g.spacing();
    const double shift = step / h; // one step, in index units
    const int n = g.points;
    const double last = static_cast<double>(n - 1) + 1e-9;

    FiniteDifferenceResult out;
    out.diff = GridFunction::zero(g);
    out.mask.assign(g.size(), 0);
    std::vector<double> coeff(static_cast<std::size_t>(order) + 1);
    for (int r = 0; r <= order; ++r)
        coeff[static_cast<std::size_t>(r)] = ((order - r) % 2 == 0 ? 1.0 : -1.0) * detail::binom(order, r);

    std::vector<cplx> row(static_cast<std::size_t>(n));
    detail::for_each_line(g, axis, [&](std::size_t base, std::size_t stride) {
        for (int j = 0; j < n; ++j) row[static_cast<std::size_t>(j)] = f.values[base + static_cast<std::size_t>(j) * stride];
        for (int j = 0; j < n; ++j) {
            const double far = j + order * shift;
            if (far > last) break; // farther nodes only get worse
            cplx acc{0.0, 0.0};
            for (int r = 0; r <= order; ++r)
                acc += coeff[static_cast<std::size_t>(r)] * detail::cubic_interp_row(row, j + r * shift);
            const std::size_t at = base + static_cast<std::size_t>(j) * stride;
            out.diff.values[at] = acc;
            out.mask[at] = 1;
            ++out.count;
        }
    });
    if (out.count == 0)
        throw std::runtime_error("finite_difference: step too large, empty mask");
    return out;
}

namespace detail {

inline double masked_lp(const GridFunction& f, std::span<const std::uint8_t> mask, double p) {
    if (std::isinf(p)) {
        double m = 0.0;
        for (std::size_t i = 0; i < f.values.size(); ++i)
            if (mask[i]) m = std::max(m, std::abs(f.values[i]));
        return m;
    }
    const double vol = std::pow(f.grid.spacing(), f.grid.dim);
    double acc = 0.0;
    for (std::size_t i = 0; i < f.values.size(); ++i)
        if (mask[i]) acc += std::pow(std::abs(f.values[i]), p);
    return std::pow(acc * vol, 1.0 / p);
}

/// Log-spaced samples on [ymin, h0], endpoints included.
inline std::vector<double> log_ygrid(double ymin, double h0, int count) {
    std::vector<double> y;
    if (!(h0 > ymin)) return y;
    y.resize(static_cast<std::size_t>(count));
    const double ratio = std::log(h0 / ymin) / (count - 1);
    for (int i = 0; i < count; ++i) y[static_cast<std::size_t>(i)] = ymin * std::exp(ratio * i);
    y.back() = h0;
    return y;
}

/// Weighted q-integral over a log-spaced y grid:
///   q < inf : ( int y^{-[(s-k)q+1]} normy(y)^q dy )^{1/q}, log-trapezoid rule
///   q = inf : sup_y y^{-(s-k)} normy(y)
/// Entries with normy < 0 mark skipped (empty-mask) samples.
inline double y_quadrature(std::span<const double> ys, std::span<const double> normy,
                           double sk, double q) {
    if (std::isinf(q)) {
        double sup = 0.0;
        for (std::size_t i = 0; i < ys.size(); ++i)
            if (normy[i] >= 0.0) sup = std::max(sup, std::pow(ys[i], -sk) * normy[i]);
        return sup;
    }
    double acc = 0.0;
    const std::size_t n = ys.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (normy[i] < 0.0) continue;
        const double integrand = std::pow(ys[i], -(sk * q + 1.0)) * std::pow(normy[i], q) * ys[i];
        double du = 0.0;
        if (i > 0) du += 0.5 * std::log(ys[i] / ys[i - 1]);
        if (i + 1 < n) du += 0.5 * std::log(ys[i + 1] / ys[i]);
        acc += integrand * du;
    }
    return std::pow(acc, 1.0 / q);
}

} // namespace detail

/// The L_p part and the per-axis difference-quotient seminorms of the Besov
/// norm; besov_norm is their sum.
struct BesovComponents {
    double lp_part = 0.0;
    std::vector<double> seminorms;
    std::vector<std::string> warnings;
    double total() const {
        double t = lp_part;
        for (double s : seminorms) t += s;
        return t;
    }
};

inline BesovComponents besov_components(const GridFunction& f, const BesovParams& bp) {
    const SpatialGrid& g = f.grid;
    bp.validate(g.dim);
    for (const cplx& v : f.values)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw std::invalid_argument("besov_components: non-finite samples");

    BesovComponents out;
    out.lp_part = lp_norm(f, bp.p);
    const double ymin = g.spacing(); // below one lattice cell the quotient is interpolation noise
    for (int axis = 0; axis < g.dim; ++axis) {
        const std::size_t ai = static_cast<std::size_t>(axis);
        const GridFunction der = detail::spectral_axis_derivative(f, axis, bp.k[ai]);
        const std::vector<double> ys = detail::log_ygrid(ymin, bp.h0, bp.quad_points);
        if (ys.empty()) {
            out.seminorms.push_back(0.0);
            out.warnings.push_back("axis " + std::to_string(axis) + ": h0 at or below lattice resolution, seminorm skipped");
            continue;
        }
        std::vector<double> normy(ys.size(), -1.0);
        const double max_step = (g.points - 1) * g.spacing() / bp.m[ai];
        for (std::size_t i = 0; i < ys.size(); ++i) {
            if (ys[i] > max_step * (1.0 + 1e-12)) {
                out.warnings.push_back("axis " + std::to_string(axis) + ": empty mask at y = " +
                                       std::to_string(ys[i]) + ", sample skipped");
                continue;
            }
            const FiniteDifferenceResult fd = finite_difference(der, axis, bp.m[ai], ys[i]);
            normy[i] = detail::masked_lp(fd.diff, fd.mask, bp.p);
        }
        out.seminorms.push_back(detail::y_quadrature(ys, normy, bp.s[ai] - bp.k[ai], bp.q));
    }
    return out;
}

inline double besov_norm(const GridFunction& f, const BesovParams& bp) {
    return besov_components(f, bp).total();
}

/// Sobolev-Besov norm: ||u||_B + sum over the problem's multi-index set of
/// ||D^alpha u||_B, the derivatives realized spectrally.
inline double sobolev_besov_norm(const GridFunction& u, const BesovParams& bp,
                                 const std::vector<FractionalMultiIndex>& orders, double l) {
    double total = besov_norm(u, bp);
    for (const FractionalMultiIndex& alpha : orders) {
        if (alpha.total() > l + 1e-12)
            throw std::invalid_argument("sobolev_besov_norm: order exceeds l");
        total += besov_norm(spectral_fractional_derivative(u, alpha), bp);
    }
    return total;
}

// ---------------------------------------------------------------------------
// Mixed time-space norm Y^s.
// ---------------------------------------------------------------------------

/// Uniformly sampled time slices t_j = j dt, all sharing one spatial grid.
struct MixedFunction {
    double dt = 0.0;
    std::vector<GridFunction> slices;

    double horizon() const { return dt * static_cast<double>(slices.size() - 1); }
    void validate() const {
        if (slices.empty()) throw std::invalid_argument("MixedFunction: no slices");
        if (!(dt > 0.0)) throw std::invalid_argument("MixedFunction: dt must be positive");
        for (const GridFunction& s : slices)
            if (!(s.grid == slices.front().grid))
                throw std::invalid_argument("MixedFunction: slices must share one grid");
    }
};

/// Sample a closure f(t, x) on M+1 uniform steps over [0, T].
inline MixedFunction sample_forcing(const SpatialGrid& grid, double horizon, int steps,
                                    const std::function<cplx(double, std::span<const double>)>& rule) {
    if (steps < 1 || !(horizon > 0.0)) throw std::invalid_argument("sample_forcing: need steps >= 1, T > 0");
    MixedFunction mf;
    mf.dt = horizon / steps;
    mf.slices.reserve(static_cast<std::size_t>(steps) + 1);
    for (int j = 0; j <= steps; ++j) {
        const double t = mf.dt * j;
        mf.slices.push_back(sample_closure(grid, [&](std::span<const double> x) { return rule(t, x); }));
    }
    return mf;
}

namespace detail {

/// Cubic interpolation across slices at time index position `pos`.
inline GridFunction slice_interp(const MixedFunction& u, double pos) {
    const int n = static_cast<int>(u.slices.size());
    int base = static_cast<int>(std::floor(pos)) - 1;
    base = std::clamp(base, 0, n - 4);
    const double t = pos - base;
    const double w0 = -(t - 1.0) * (t - 2.0) * (t - 3.0) / 6.0;
    const double w1 = t * (t - 2.0) * (t - 3.0) / 2.0;
    const double w2 = -t * (t - 1.0) * (t - 3.0) / 2.0;
    const double w3 = t * (t - 1.0) * (t - 2.0) / 6.0;
    const std::size_t b = static_cast<std::size_t>(base);
    GridFunction out = GridFunction::zero(u.slices.front().grid);
    for (std::size_t i = 0; i < out.values.size(); ++i)
        out.values[i] = w0 * u.slices[b].values[i] + w1 * u.slices[b + 1].values[i] +
                        w2 * u.slices[b + 2].values[i] + w3 * u.slices[b + 3].values[i];
    return out;
}

inline double weighted_lp(std::span<const double> vals, double p, double weight) {
    if (std::isinf(p)) {
        double m = 0.0;
        for (double v : vals) m = std::max(m, v);
        return m;
    }
    double acc = 0.0;
    for (double v : vals) acc += std::pow(v, p);
    return std::pow(acc * weight, 1.0 / p);
}

} // namespace detail

/// Y^s norm: outer Besov norm in t (L_{p1} in time of X0-valued slices plus
/// the m_t-th time-difference seminorm, slices interpolated cubically,
/// differences measured in the spatial Besov norm X0).
/// bp_time is a 1-axis parameter set with k = 0.
inline double mixed_norm(const MixedFunction& u, const BesovParams& bp_space,
                         const BesovParams& bp_time) {
    u.validate();
    bp_time.validate(1);
    if (bp_time.k[0] != 0)
        throw std::invalid_argument("mixed_norm: time derivative offset k must be 0");
    const int m_t = bp_time.m[0];
    const int nodes = static_cast<int>(u.slices.size());
    if (nodes < m_t + 1)
        throw std::invalid_argument("mixed_norm: fewer than m_time + 1 time nodes");
    if (nodes < 4)
        throw std::invalid_argument("mixed_norm: need at least 4 time nodes for interpolation");

    std::vector<double> slice_norms(static_cast<std::size_t>(nodes));
    for (int j = 0; j < nodes; ++j)
        slice_norms[static_cast<std::size_t>(j)] = besov_norm(u.slices[static_cast<std::size_t>(j)], bp_space);
    const double lp1_part = detail::weighted_lp(slice_norms, bp_time.p, u.dt);

    const std::vector<double> ys = detail::log_ygrid(u.dt, bp_time.h0, bp_time.quad_points);
    if (ys.empty()) return lp1_part;

    std::vector<double> coeff(static_cast<std::size_t>(m_t) + 1);
    for (int r = 0; r <= m_t; ++r)
        coeff[static_cast<std::size_t>(r)] = ((m_t - r) % 2 == 0 ? 1.0 : -1.0) * detail::binom(m_t, r);

    std::vector<double> normy(ys.size(), -1.0);
    const double last = static_cast<double>(nodes - 1) + 1e-9;
    for (std::size_t i = 0; i < ys.size(); ++i) {
        const double shift = ys[i] / u.dt;
        std::vector<double> vals;
        for (int j = 0; j < nodes; ++j) {
            if (j + m_t * shift > last) break;
            GridFunction d = GridFunction::zero(u.slices.front().grid);
            for (int r = 0; r <= m_t; ++r) {
                const GridFunction s = detail::slice_interp(u, j + r * shift);
                const double c = coeff[static_cast<std::size_t>(r)];
                for (std::size_t n2 = 0; n2 < d.values.size(); ++n2) d.values[n2] += c * s.values[n2];
            }
            vals.push_back(besov_norm(d, bp_space));
        }
        if (vals.empty()) continue;
        normy[i] = detail::weighted_lp(vals, bp_time.p, u.dt);
    }
    const double sem = detail::y_quadrature(ys, normy, bp_time.s[0], bp_time.q);
    return lp1_part + sem;
}

// ---------------------------------------------------------------------------
// Embedding inequality report.
// ---------------------------------------------------------------------------

/// Empirical constants of the lower-order-derivative embedding: for each h,
///   C(h) = ||D^alpha u||_{B^s_{p1,q}} /
///          ( h^mu ||u||_{B^{s,l}_{p,q}} + h^{-(1-mu)} ||u||_{B^s_{p,q}} ),
/// with the Sobolev-Besov norm built over the principal orders plus alpha.
/// PASS iff the sup over the h sweep is finite and stable under trigonometric
/// grid refinement.
inline SymbolReport embedding_report(const GridFunction& u, const FractionalMultiIndex& alpha,
                                     double l, const BesovParams& bp, double p1, double mu,
                                     const std::vector<double>& h_sweep,
                                     double stability_tol = 0.10) {
    const int dim = u.grid.dim;
    bp.validate(dim);
    if (alpha.dim() != dim) throw std::invalid_argument("embedding_report: alpha dimension mismatch");
    const double inv_p = std::isinf(bp.p) ? 0.0 : 1.0 / bp.p;
    const double inv_p1 = std::isinf(p1) ? 0.0 : 1.0 / p1;
    const double kappa = (alpha.total() + dim * (inv_p - inv_p1)) / l;
    if (kappa > 1.0 + 1e-12)
        throw std::domain_error("embedding_report: kappa = (|alpha| + n(1/p - 1/p1))/l exceeds 1");
    if (mu < -1e-12 || mu > 1.0 - kappa + 1e-12)
        throw std::domain_error("embedding_report: need 0 <= mu <= 1 - kappa");
    if (h_sweep.empty()) throw std::invalid_argument("embedding_report: empty h sweep");
    for (double h : h_sweep)
        if (!(h > 0.0 && h <= bp.h0))
            throw std::invalid_argument("embedding_report: h values must lie in (0, h0]");

    SymbolReport rep;
    rep.quantity = "embedding_constant";
    bool zero = true;
    for (const cplx& v : u.values) if (v != cplx{0.0, 0.0}) { zero = false; break; }
    if (zero) {
        rep.pass = true;
        rep.detail = "degenerate zero probe, skipped";
        return rep;
    }

    std::vector<FractionalMultiIndex> orders;
    for (int a = 0; a < dim; ++a) orders.push_back(FractionalMultiIndex::axis_order(dim, a, l));
    bool have_alpha = false;
    for (const FractionalMultiIndex& o : orders) have_alpha = have_alpha || o == alpha;
    if (!have_alpha && alpha.total() > 0.0) orders.push_back(alpha);

    BesovParams bp1 = bp;
    bp1.p = p1;

    auto sup_for = [&](const GridFunction& probe, std::vector<double>* per_h) {
        const double num = besov_norm(spectral_fractional_derivative(probe, alpha), bp1);
        const double sobolev = sobolev_besov_norm(probe, bp, orders, l);
        const double plain = besov_norm(probe, bp);
        double sup = 0.0;
        for (double h : h_sweep) {
            const double c = num / (std::pow(h, mu) * sobolev + std::pow(h, -(1.0 - mu)) * plain);
            if (per_h) per_h->push_back(c);
            sup = std::max(sup, c);
        }
        return sup;
    };

    std::vector<double> per_h;
    const double sup1 = sup_for(u, &per_h);
    const double sup2 = sup_for(resample(u, 2 * u.grid.points), nullptr);
    for (std::size_t i = 0; i < h_sweep.size(); ++i) {
        std::ostringstream os;
        os << "h=" << h_sweep[i];
        rep.rows.push_back({os.str(), per_h[i], std::isfinite(per_h[i])});
    }
    rep.rows.push_back({"sup@2N", sup2, true});
    rep.value = sup1;
    const bool stable = std::abs(sup2 - sup1) <= stability_tol * std::max(sup1, 1e-300);
    rep.pass = std::isfinite(sup1) && std::isfinite(sup2) && stable;
    std::ostringstream os;
    os << "mu=" << mu << ", kappa=" << kappa << ", refinement drift "
       << (sup1 > 0.0 ? std::abs(sup2 - sup1) / sup1 : 0.0);
    rep.detail = os.str();
    return rep;
}

} // namespace fracspec
