#pragma once

#include "fracspec/kernel.hpp"
#include "fracspec/report.hpp"

#include <limits>
#include <sstream>

namespace fracspec {

/// L(xi) = sum_alpha a^_alpha(xi) (i xi)^alpha.
inline cplx eval_L(std::span<const double> xi, const KernelSet& k) {
    cplx sum{0.0, 0.0};
    for (const KernelTerm& t : k.terms) {
        const cplx v = t.symbol(xi) * frac_power_symbol(xi, t.alpha);
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw std::runtime_error("eval_L: non-finite symbol value");
        sum += v;
    }
    return sum;
}

/// z = 0 or |arg z| <= phi (principal argument); tol absorbs round-off on
/// lattice sweeps.
inline bool sector_membership(cplx z, double phi, double tol = 0.0) {
    if (!(phi >= 0.0 && phi < kPi)) throw std::invalid_argument("sector_membership: phi must lie in [0, pi)");
    if (z == cplx{0.0, 0.0}) return true;
    return std::abs(std::arg(z)) <= phi + tol;
}

/// Operator functions of the elliptic symbol:
///   sigma_0 = (L + lambda)^{-1},  sigma_1 = lambda sigma_0,
///   sigma_2 = sum_alpha |lambda|^{1-|alpha|/l} a^_alpha (i xi)^alpha sigma_0.
inline cplx eval_sigma(int i, std::span<const double> xi, const SectorParameter& lam,
                       const KernelSet& k) {
    if (i < 0 || i > 2) throw std::invalid_argument("eval_sigma: i must be 0, 1 or 2");
    const cplx L = eval_L(xi, k);
    const cplx den = L + lam.lambda;
    const double scale = std::abs(L) + std::abs(lam.lambda);
    if (std::abs(den) <= 1e-14 * std::max(1.0, scale)) {
        std::ostringstream os;
        os << "eval_sigma: degenerate denominator L + lambda ~ 0 at xi = (";
        for (std::size_t a = 0; a < xi.size(); ++a) os << (a ? "," : "") << xi[a];
        os << "), lambda = " << lam.lambda.real() << "+" << lam.lambda.imag() << "i";
        throw std::runtime_error(os.str());
    }
    const cplx s0 = 1.0 / den;
    if (i == 0) return s0;
    if (i == 1) return lam.lambda * s0;
    const double absl = std::abs(lam.lambda);
    cplx acc{0.0, 0.0};
    for (const KernelTerm& t : k.terms) {
        const double w = std::pow(absl, 1.0 - t.alpha.total() / k.order_l);
        acc += w * t.symbol(xi) * frac_power_symbol(xi, t.alpha);
    }
    return acc * s0;
}

// ---------------------------------------------------------------------------
// Lambda sweeps.
// ---------------------------------------------------------------------------

struct LambdaSweep {
    std::vector<double> moduli;    // ascending
    std::vector<double> arguments; // radians, |arg| <= phi2
    double phi2 = 0.0;

    std::vector<SectorParameter> points() const {
        std::vector<SectorParameter> out;
        out.reserve(moduli.size() * arguments.size());
        for (double r : moduli)
            for (double th : arguments)
                out.push_back(SectorParameter{std::polar(r, th), phi2});
        return out;
    }
};

/// Default sweep: moduli 10^{dec_min}..10^{dec_max} one per decade, arguments
/// {0, +-phi2/2, +-phi2}.
inline LambdaSweep default_lambda_sweep(double phi2, int dec_min = -2, int dec_max = 4) {
    LambdaSweep s;
    s.phi2 = phi2;
    for (int d = dec_min; d <= dec_max; ++d) s.moduli.push_back(std::pow(10.0, d));
    s.arguments = {0.0};
    if (phi2 > 0.0) {
        s.arguments = {-phi2, -phi2 / 2.0, 0.0, phi2 / 2.0, phi2};
    }
    return s;
}

// ---------------------------------------------------------------------------
// Differentiable scalar symbol targets (for the Mikhlin-type checks).
// ---------------------------------------------------------------------------

/// A scalar function of xi with an optional analytic first partial.
struct SymbolTarget {
    std::string name;
    SymbolFn value;
    SymbolPartialFn partial; // may be empty
};

inline SymbolTarget term_target(const KernelTerm& t) {
    return SymbolTarget{"a^[" + t.describe + "]", t.symbol, t.partial};
}

namespace detail {

inline cplx d_L(std::span<const double> xi, const KernelSet& k, int axis) {
    // D_a L = sum [ D_a a^ (i xi)^alpha + a^ alpha_a / xi_a (i xi)^alpha ]
    cplx acc{0.0, 0.0};
    for (const KernelTerm& t : k.terms) {
        const cplx pw = frac_power_symbol(xi, t.alpha);
        const double aa = t.alpha.orders[static_cast<std::size_t>(axis)];
        const double xa = xi[static_cast<std::size_t>(axis)];
        if (t.partial) acc += t.partial(xi, axis) * pw;
        else return cplx{std::numeric_limits<double>::quiet_NaN(), 0.0};
        if (aa != 0.0) {
            if (xa != 0.0) {
                acc += t.symbol(xi) * (aa / xa) * pw;
            } else if (aa == 1.0) {
                // d/dxi_a (i xi_a) = i; the remaining factors at xi_a = 0
                FractionalMultiIndex rest = t.alpha;
                rest.orders[static_cast<std::size_t>(axis)] = 0.0;
                acc += t.symbol(xi) * cplx{0.0, 1.0} * frac_power_symbol(xi, rest);
            } else if (aa > 1.0) {
                // derivative ~ alpha_a (i xi_a)^{alpha_a - 1} -> 0
            } else {
                acc += cplx{std::numeric_limits<double>::quiet_NaN(), 0.0};
            }
        }
    }
    return acc;
}

} // namespace detail

/// sigma_i at fixed lambda as a differentiable target. The analytic partial
/// is available when every kernel term carries one.
inline SymbolTarget sigma_target(int i, const SectorParameter& lam, const KernelSet& k) {
    SymbolTarget t;
    {
        std::ostringstream os;
        os << "sigma_" << i << "(lambda=" << lam.lambda.real() << "+" << lam.lambda.imag() << "i)";
        t.name = os.str();
    }
    t.value = [i, lam, k](std::span<const double> xi) { return eval_sigma(i, xi, lam, k); };
    bool all_partials = true;
    for (const KernelTerm& term : k.terms)
        if (!term.partial) { all_partials = false; break; }
    if (all_partials) {
        t.partial = [i, lam, k](std::span<const double> xi, int axis) -> cplx {
            const cplx s0 = eval_sigma(0, xi, lam, k);
            const cplx dL = detail::d_L(xi, k, axis);
            const cplx ds0 = -s0 * s0 * dL;
            if (i == 0) return ds0;
            if (i == 1) return lam.lambda * ds0;
            // sigma_2 = P(xi) sigma_0 with P = sum w a^ (i xi)^alpha
            const double absl = std::abs(lam.lambda);
            cplx P{0.0, 0.0}, dP{0.0, 0.0};
            for (const KernelTerm& term : k.terms) {
                const double w = std::pow(absl, 1.0 - term.alpha.total() / k.order_l);
                const cplx pw = frac_power_symbol(xi, term.alpha);
                P += w * term.symbol(xi) * pw;
                const double aa = term.alpha.orders[static_cast<std::size_t>(axis)];
                const double xa = xi[static_cast<std::size_t>(axis)];
                dP += w * term.partial(xi, axis) * pw;
                if (aa != 0.0) {
                    if (xa != 0.0) {
                        dP += w * term.symbol(xi) * (aa / xa) * pw;
                    } else if (aa == 1.0) {
                        FractionalMultiIndex rest = term.alpha;
                        rest.orders[static_cast<std::size_t>(axis)] = 0.0;
                        dP += w * term.symbol(xi) * cplx{0.0, 1.0} * frac_power_symbol(xi, rest);
                    } else if (aa < 1.0) {
                        dP += cplx{std::numeric_limits<double>::quiet_NaN(), 0.0};
                    }
                }
            }
            return dP * s0 + P * ds0;
        };
    }
    return t;
}

namespace detail {

/// Evaluate D^beta target at xi (beta components in {0,1}). The innermost
/// axis uses the analytic partial when available; everything else falls back
/// to 4th-order central differences with step h per axis.
inline cplx symbol_derivative(const SymbolTarget& t, std::array<double, 3> xi, int dim,
                              std::array<int, 3> beta, double h) {
    int axis = -1;
    int remaining = 0;
    for (int a = 0; a < dim; ++a)
        if (beta[static_cast<std::size_t>(a)] != 0) { ++remaining; if (axis < 0) axis = a; }
    if (remaining == 0) return t.value(std::span<const double>(xi.data(), static_cast<std::size_t>(dim)));
    if (remaining == 1 && t.partial)
        return t.partial(std::span<const double>(xi.data(), static_cast<std::size_t>(dim)), axis);
    std::array<int, 3> rest = beta;
    rest[static_cast<std::size_t>(axis)] = 0;
    auto at = [&](double offset) {
        std::array<double, 3> p = xi;
        p[static_cast<std::size_t>(axis)] += offset;
        return symbol_derivative(t, p, dim, rest, h);
    };
    return (-at(2.0 * h) + 8.0 * at(h) - 8.0 * at(-h) + at(-2.0 * h)) / (12.0 * h);
}

inline std::string beta_label(std::array<int, 3> beta, int dim) {
    std::ostringstream os;
    os << "beta=(";
    for (int a = 0; a < dim; ++a) os << (a ? "," : "") << beta[static_cast<std::size_t>(a)];
    os << ")";
    return os.str();
}

} // namespace detail

// ---------------------------------------------------------------------------
// Verification sweeps.
// ---------------------------------------------------------------------------

/// Ellipticity check on the frequency lattice of `grid`: (a) L(xi) stays in
/// the sector S_{phi1}, (b) the empirical lower-bound constant
///   C* = min_{xi != 0} |L(xi)| / sum_k |a^_{alpha(l,k)}(xi)| |xi_k|^l
/// is positive. An explicit frequency list may override the lattice.
inline SymbolReport check_ellipticity(const KernelSet& k, const SpatialGrid& grid,
                                        bool include_zero = true,
                                        const std::vector<std::vector<double>>* freq_override = nullptr) {
    k.validate();
    if (grid.dim != k.dim) throw std::invalid_argument("check_ellipticity: dimension mismatch");
    std::vector<std::array<double, 3>> pts;
    if (freq_override) {
        for (const auto& v : *freq_override) {
            if (static_cast<int>(v.size()) != k.dim)
                throw std::invalid_argument("check_ellipticity: frequency point dimension mismatch");
            std::array<double, 3> p{};
            std::copy(v.begin(), v.end(), p.begin());
            pts.push_back(p);
        }
    } else {
        std::array<double, 3> xi{};
        for (std::size_t t = 0; t < grid.size(); ++t) {
            detail::freq_coords(grid, t, xi);
            bool zero = true;
            for (int a = 0; a < grid.dim; ++a) zero = zero && xi[static_cast<std::size_t>(a)] == 0.0;
            if (zero && !include_zero) continue;
            pts.push_back(xi);
        }
    }
    if (pts.empty()) throw std::invalid_argument("check_ellipticity: empty frequency set");

    bool sector_ok = true;
    std::array<double, 3> sector_fail{};
    double cstar = std::numeric_limits<double>::infinity();
    std::array<double, 3> argmin{};
    bool have_ratio = false;
    for (const auto& xi : pts) {
        const std::span<const double> sp(xi.data(), static_cast<std::size_t>(k.dim));
        const cplx L = eval_L(sp, k);
        if (sector_ok && !sector_membership(L, k.sector_angle, 1e-12)) {
            sector_ok = false;
            sector_fail = xi;
        }
        double denom = 0.0;
        bool zero_pt = true;
        for (int a = 0; a < k.dim; ++a) {
            const double xa = std::abs(xi[static_cast<std::size_t>(a)]);
            if (xa != 0.0) zero_pt = false;
            denom += std::abs(k.principal_symbol(a, sp)) * std::pow(xa, k.order_l);
        }
        if (zero_pt || denom == 0.0) continue;
        const double ratio = std::abs(L) / denom;
        have_ratio = true;
        if (ratio < cstar) { cstar = ratio; argmin = xi; }
    }

    SymbolReport rep;
    rep.quantity = "ellipticity";
    rep.value = have_ratio ? cstar : 0.0;
    rep.arg_xi.assign(argmin.begin(), argmin.begin() + k.dim);
    rep.pass = sector_ok && have_ratio && cstar > 0.0;
    rep.rows.push_back({"sector(phi1=" + std::to_string(k.sector_angle) + ")", sector_ok ? 1.0 : 0.0, sector_ok});
    rep.rows.push_back({"lower_bound_C*", rep.value, have_ratio && cstar > 0.0});
    {
        std::ostringstream os;
        os << pts.size() << " frequency points";
        if (!sector_ok) {
            os << "; sector violated at xi = (";
            for (int a = 0; a < k.dim; ++a) os << (a ? "," : "") << sector_fail[static_cast<std::size_t>(a)];
            os << ")";
        }
        rep.detail = os.str();
    }
    return rep;
}

namespace detail {

inline double lower_bound_min(const KernelSet& k, std::span<const SectorParameter> sweep,
                              const SpatialGrid& grid, std::array<double, 3>& argmin, cplx& arglam) {
    double cmin = std::numeric_limits<double>::infinity();
    std::array<double, 3> xi{};
    for (std::size_t t = 0; t < grid.size(); ++t) {
        freq_coords(grid, t, xi);
        const std::span<const double> sp(xi.data(), static_cast<std::size_t>(k.dim));
        const cplx L = eval_L(sp, k);
        const double absL = std::abs(L);
        for (const SectorParameter& lam : sweep) {
            const double scale = absL + std::abs(lam.lambda);
            if (scale == 0.0) continue; // degenerate (xi, lambda) = (0, 0)
            const double ratio = std::abs(L + lam.lambda) / scale;
            if (ratio < cmin) { cmin = ratio; argmin = xi; arglam = lam.lambda; }
        }
    }
    return cmin;
}

} // namespace detail

/// Empirical constant of |lambda + L(xi)| >= C (|lambda| + |L(xi)|) over the
/// sweep x lattice; PASS iff C > 0 and stable within 10% under doubling the
/// lattice point count.
inline SymbolReport lower_bound_constant(const KernelSet& k,
                                         const std::vector<SectorParameter>& sweep,
                                         const SpatialGrid& grid,
                                         double stability_tol = 0.10) {
    k.validate();
    for (const SectorParameter& lam : sweep) {
        lam.validate();
        if (k.sector_angle + lam.angle_bound >= kPi)
            throw std::invalid_argument("lower_bound_constant: phi1 + phi2 must be < pi");
    }
    if (sweep.empty()) throw std::invalid_argument("lower_bound_constant: empty sweep");

    std::array<double, 3> argmin{};
    cplx arglam{0.0, 0.0};
    const double c1 = detail::lower_bound_min(k, sweep, grid, argmin, arglam);
    const SpatialGrid fine = make_grid(grid.dim, grid.radius, 2 * grid.points);
    std::array<double, 3> argmin2{};
    cplx arglam2{0.0, 0.0};
    const double c2 = detail::lower_bound_min(k, sweep, fine, argmin2, arglam2);

    SymbolReport rep;
    rep.quantity = "lower_bound_constant";
    rep.value = c1;
    rep.arg_xi.assign(argmin.begin(), argmin.begin() + k.dim);
    rep.arg_lambda = arglam;
    const bool stable = std::abs(c2 - c1) <= stability_tol * std::max(c1, 1e-300);
    rep.pass = c1 > 0.0 && stable;
    rep.rows.push_back({"C(N)", c1, c1 > 0.0});
    rep.rows.push_back({"C(2N)", c2, stable});
    std::ostringstream os;
    os << sweep.size() << " lambda points; refinement drift "
       << (c1 > 0.0 ? std::abs(c2 - c1) / c1 : 0.0);
    rep.detail = os.str();
    return rep;
}

/// Mikhlin-type sups: for every beta with components in {0,1},
///   sup over the punctured lattice of |xi|^{|beta|} |D^beta target(xi)|,
/// reported together with the value on the range-doubled lattice (2N, same
/// spacing); PASS iff all sups are finite and drift less than `stability_tol`.
/// A punctured ball of one lattice cell around xi = 0 is excluded.
inline SymbolReport mikhlin_sup(const SymbolTarget& target, const SpatialGrid& grid,
                                double stability_tol = 0.05) {
    const int dim = grid.dim;
    const double h_fd = grid.freq_spacing() / 4.0;
    const double excl = grid.freq_spacing() * (1.0 + 1e-12);

    auto sup_on = [&](const SpatialGrid& g, std::array<int, 3> beta, std::array<double, 3>& arg) {
        double sup = 0.0;
        int nb = 0;
        for (int a = 0; a < dim; ++a) nb += beta[static_cast<std::size_t>(a)];
        std::array<double, 3> xi{};
        for (std::size_t t = 0; t < g.size(); ++t) {
            detail::freq_coords(g, t, xi);
            double r2 = 0.0;
            for (int a = 0; a < dim; ++a) r2 += xi[static_cast<std::size_t>(a)] * xi[static_cast<std::size_t>(a)];
            const double r = std::sqrt(r2);
            if (r <= excl) continue;
            const cplx d = detail::symbol_derivative(target, xi, dim, beta, h_fd);
            const double v = std::pow(r, nb) * std::abs(d);
            if (std::isnan(v)) return std::numeric_limits<double>::quiet_NaN();
            if (v > sup) { sup = v; arg = xi; }
        }
        return sup;
    };

    const SpatialGrid wide = make_grid(dim, grid.radius, 2 * grid.points);
    SymbolReport rep;
    rep.quantity = "mikhlin[" + target.name + "]";
    rep.pass = true;
    double overall = 0.0;
    std::array<double, 3> overall_arg{};
    const int nbetas = 1 << dim;
    for (int mask = 0; mask < nbetas; ++mask) {
        std::array<int, 3> beta{};
        for (int a = 0; a < dim; ++a) beta[static_cast<std::size_t>(a)] = (mask >> a) & 1;
        std::array<double, 3> arg1{}, arg2{};
        const double s1 = sup_on(grid, beta, arg1);
        const double s2 = sup_on(wide, beta, arg2);
        const bool finite = std::isfinite(s1) && std::isfinite(s2);
        const bool stable = finite && std::abs(s2 - s1) <= stability_tol * std::max({s1, s2, 1e-12});
        rep.rows.push_back({detail::beta_label(beta, dim), s1, finite && stable});
        rep.rows.push_back({detail::beta_label(beta, dim) + " @2N", s2, finite && stable});
        rep.pass = rep.pass && finite && stable;
        if (finite && s1 > overall) { overall = s1; overall_arg = arg1; }
    }
    rep.value = overall;
    rep.arg_xi.assign(overall_arg.begin(), overall_arg.begin() + dim);
    std::ostringstream os;
    os << "fd step " << h_fd << ", excluded |xi| <= " << excl;
    rep.detail = os.str();
    return rep;
}

/// Uniformity of the multiplier bounds in lambda: for each sigma_i and each
/// sweep argument, the per-decade lattice sups of |sigma_i| must be finite
/// and must not increase by more than `increase_tol` from one decade to the
/// next. For sigma_1 and sigma_2 the total variation across decades is also
/// reported (sigma_0 decays like 1/|lambda| near xi = 0, so only the
/// non-increase form is meaningful for it).
inline SymbolReport multiplier_uniformity(const KernelSet& k, const SpatialGrid& grid,
                                          const LambdaSweep& sweep, double increase_tol = 0.01,
                                          double variation_tol = 0.01) {
    k.validate();
    if (grid.dim != k.dim) throw std::invalid_argument("multiplier_uniformity: dimension mismatch");
    if (sweep.moduli.size() < 2) throw std::invalid_argument("multiplier_uniformity: need at least two decades");
    SymbolReport rep;
    rep.quantity = "multiplier_uniformity";
    rep.pass = true;
    double global_sup = 0.0;
    std::array<double, 3> xi{};
    for (int i = 0; i <= 2; ++i) {
        for (double th : sweep.arguments) {
            std::vector<double> sups;
            for (double r : sweep.moduli) {
                const SectorParameter lam{std::polar(r, th), sweep.phi2};
                double sup = 0.0;
                for (std::size_t t = 0; t < grid.size(); ++t) {
                    detail::freq_coords(grid, t, xi);
                    const std::span<const double> sp(xi.data(), static_cast<std::size_t>(k.dim));
                    sup = std::max(sup, std::abs(eval_sigma(i, sp, lam, k)));
                }
                sups.push_back(sup);
            }
            bool line_ok = std::isfinite(sups.front());
            for (std::size_t d = 1; d < sups.size(); ++d)
                line_ok = line_ok && std::isfinite(sups[d]) && sups[d] <= sups[d - 1] * (1.0 + increase_tol);
            for (std::size_t d = 0; d < sups.size(); ++d) {
                std::ostringstream os;
                os << "sigma_" << i << " arg=" << th << " |lambda|=" << sweep.moduli[d];
                rep.rows.push_back({os.str(), sups[d], line_ok});
            }
            if (i >= 1) {
                const double vmax = *std::max_element(sups.begin(), sups.end());
                const double vmin = *std::min_element(sups.begin(), sups.end());
                const double var = vmin > 0.0 ? vmax / vmin - 1.0 : std::numeric_limits<double>::infinity();
                std::ostringstream os;
                os << "sigma_" << i << " arg=" << th << " variation";
                rep.rows.push_back({os.str(), var, var <= variation_tol});
                line_ok = line_ok && var <= variation_tol;
            }
            rep.pass = rep.pass && line_ok;
            global_sup = std::max(global_sup, *std::max_element(sups.begin(), sups.end()));
        }
    }
    rep.value = global_sup;
    std::ostringstream os;
    os << sweep.moduli.size() - 1 << " decades x " << sweep.arguments.size()
       << " arguments; increase tol " << increase_tol << ", variation tol " << variation_tol;
    rep.detail = os.str();
    return rep;
}

/// Empirical constant of y1^a1...yn^an <= C (1 + sum y_k^l) over the given
/// nonnegative samples.
inline SymbolReport young_inequality_constant(double l, const FractionalMultiIndex& alpha,
                                              const std::vector<std::vector<double>>& y_samples) {
    if (alpha.total() > l + 1e-12)
        throw std::invalid_argument("young_inequality_constant: |alpha| must be <= l");
    SymbolReport rep;
    rep.quantity = "young_constant";
    double cmax = 0.0;
    std::vector<double> argmax;
    for (const std::vector<double>& y : y_samples) {
        if (static_cast<int>(y.size()) != alpha.dim())
            throw std::invalid_argument("young_inequality_constant: sample dimension mismatch");
        double num = 1.0, den = 1.0;
        for (std::size_t a = 0; a < y.size(); ++a) {
            if (!(y[a] >= 0.0)) throw std::invalid_argument("young_inequality_constant: samples must be >= 0");
            num *= std::pow(y[a], alpha.orders[a]);
            den += std::pow(y[a], l);
        }
        const double c = num / den;
        if (c > cmax) { cmax = c; argmax = y; }
    }
    rep.value = cmax;
    rep.arg_xi = argmax;
    rep.pass = std::isfinite(cmax);
    rep.detail = std::to_string(y_samples.size()) + " samples";
    return rep;
}

/// Log-spaced nonnegative sample tuples (including zeros) for the Young check.
inline std::vector<std::vector<double>> default_young_samples(int dim, int per_axis = 25) {
    std::vector<double> axis{0.0};
    for (int i = 0; i < per_axis; ++i)
        axis.push_back(std::pow(10.0, -2.0 + 8.0 * i / (per_axis - 1.0)));
    std::vector<std::vector<double>> out;
    const std::size_t n = axis.size();
    std::size_t total = 1;
    for (int a = 0; a < dim; ++a) total *= n;
    for (std::size_t flat = 0; flat < total; ++flat) {
        std::vector<double> y(static_cast<std::size_t>(dim));
        std::size_t rest = flat;
        for (int a = dim - 1; a >= 0; --a) {
            y[static_cast<std::size_t>(a)] = axis[rest % n];
            rest /= n;
        }
        out.push_back(std::move(y));
    }
    return out;
}

} // namespace fracspec
