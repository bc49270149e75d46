#pragma once

#include "fracspec/besov.hpp"
#include "fracspec/parallel.hpp"
#include "fracspec/symbol.hpp"

#include <algorithm>
#include <sstream>

namespace fracspec {

/// Norm used by the verification reports: the Besov norm by default, or a
/// plain discrete L_p norm as a fast mode.
struct NormSpec {
    enum class Kind { Lp, Besov };
    Kind kind = Kind::Besov;
    double p = 2.0;      // Lp mode
    BesovParams besov{}; // Besov mode

    static NormSpec lp(double p) {
        NormSpec n;
        n.kind = Kind::Lp;
        n.p = p;
        return n;
    }
    static NormSpec besov_norm_spec(const BesovParams& bp) {
        NormSpec n;
        n.kind = Kind::Besov;
        n.besov = bp;
        return n;
    }
    std::string describe() const {
        std::ostringstream os;
        if (kind == Kind::Lp) {
            os << "L_" << p;
        } else {
            os << "B^(";
            for (std::size_t i = 0; i < besov.s.size(); ++i) os << (i ? "," : "") << besov.s[i];
            os << ")_{" << besov.p << "," << besov.q << "} (m=" << (besov.m.empty() ? 0 : besov.m[0])
               << ", k=" << (besov.k.empty() ? 0 : besov.k[0]) << ", h0=" << besov.h0 << ")";
        }
        return os.str();
    }
};

inline double x_norm(const GridFunction& f, const NormSpec& n) {
    if (n.kind == NormSpec::Kind::Lp) return lp_norm(f, n.p);
    return besov_norm(f, n.besov);
}

/// The nonlocal elliptic problem sum a_alpha * D^alpha u + lambda u = f.
struct EllipticProblem {
    KernelSet kernels;
    SectorParameter lambda;
    GridFunction rhs;

    void validate() const {
        kernels.validate();
        lambda.validate();
        if (kernels.sector_angle + lambda.angle_bound >= kPi)
            throw std::invalid_argument("EllipticProblem: phi1 + phi2 must be < pi");
        if (rhs.grid.dim != kernels.dim)
            throw std::invalid_argument("EllipticProblem: grid/kernel dimension mismatch");
        for (const cplx& v : rhs.values)
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
                throw std::invalid_argument("EllipticProblem: non-finite right-hand side");
    }
};

/// Apply the nonlocal operator spectrally: u -> F^{-1}[L(xi) u^(xi)].
inline GridFunction apply_operator(const GridFunction& u, const KernelSet& k) {
    if (u.grid.dim != k.dim) throw std::invalid_argument("apply_operator: dimension mismatch");
    GridFunction out = apply_multiplier(u, [&k](std::span<const double> xi) { return eval_L(xi, k); });
    for (const cplx& v : out.values)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw std::runtime_error("apply_operator: non-finite output (symbol blow-up on lattice)");
    return out;
}

/// One term of the operator: a_alpha * D^alpha u (convolved = true) or the
/// bare fractional derivative D^alpha u (convolved = false).
inline GridFunction term_apply(const GridFunction& u, const KernelTerm& term, bool convolved = true) {
    return apply_multiplier(u, [&term, convolved](std::span<const double> xi) {
        const cplx pw = frac_power_symbol(xi, term.alpha);
        return convolved ? term.symbol(xi) * pw : pw;
    });
}

/// Solve (1.1) by the multiplier formula u^ = sigma_0 f^. Degenerate lattice
/// denominators are reported with the offending frequency; lambda = 0 is
/// accepted only when the kernel has a nonvanishing zero-order part.
inline GridFunction solve_elliptic(const EllipticProblem& p) {
    p.validate();
    const SpatialGrid& g = p.rhs.grid;
    if (p.lambda.lambda == cplx{0.0, 0.0}) {
        std::array<double, 3> zero{};
        const cplx L0 = eval_L(std::span<const double>(zero.data(), static_cast<std::size_t>(g.dim)), p.kernels);
        if (std::abs(L0) == 0.0)
            throw std::invalid_argument(
                "solve_elliptic: lambda = 0 needs a kernel with nonvanishing zero-order term (L(0) != 0)");
    }
    SpectrumFunction s = dft_forward(p.rhs);
    std::array<double, 3> xi{};
    for (std::size_t t = 0; t < s.coefficients.size(); ++t) {
        detail::freq_coords(g, t, xi);
        s.coefficients[t] *= eval_sigma(0, std::span<const double>(xi.data(), static_cast<std::size_t>(g.dim)),
                                        p.lambda, p.kernels);
    }
    return dft_inverse(s);
}

/// Relative residual ||(O + lambda) u - f||_2 / ||f||_2.
inline double elliptic_residual(const GridFunction& u, const EllipticProblem& p) {
    GridFunction r = apply_operator(u, p.kernels) + p.lambda.lambda * u - p.rhs;
    return rel_l2_distance(p.rhs + r, p.rhs);
}

/// Coercivity sweep for the uniform estimate: per lambda, the weighted term
/// norms |lambda|^{1-|alpha|/l} ||a_alpha * D^alpha u||_X, the weighted
/// solution norm |lambda| ||u||_X, and their total relative to ||f||_X.
/// convolved = false drops the convolution factor (the D^alpha-only variant).
inline CoercivityReport coercivity_report(const KernelSet& k, const GridFunction& f,
                                          const std::vector<SectorParameter>& sweep,
                                          const NormSpec& norm, bool convolved = true,
                                          double uniformity_factor = 4.0, int threads = 1) {
    k.validate();
    if (sweep.empty()) throw std::invalid_argument("coercivity_report: empty sweep");
    for (const SectorParameter& lam : sweep) {
        lam.validate();
        if (k.sector_angle + lam.angle_bound >= kPi)
            throw std::invalid_argument("coercivity_report: phi1 + phi2 must be < pi");
    }
    const double fnorm = x_norm(f, norm);
    if (!(fnorm > 0.0)) throw std::invalid_argument("coercivity_report: f must be nonzero");

    std::vector<SectorParameter> lams = sweep;
    std::sort(lams.begin(), lams.end(), [](const SectorParameter& a, const SectorParameter& b) {
        const double ra = std::abs(a.lambda), rb = std::abs(b.lambda);
        if (ra != rb) return ra < rb;
        return std::arg(a.lambda) < std::arg(b.lambda);
    });

    struct Slot {
        std::vector<CoercivityRow> rows;
        std::string error;
    };
    std::vector<Slot> slots(lams.size());
    detail::parallel_for(lams.size(), threads, [&](std::size_t li) {
        const SectorParameter& lam = lams[li];
        try {
            EllipticProblem prob{k, lam, f};
            const GridFunction u = solve_elliptic(prob);
            const double absl = std::abs(lam.lambda);
            const double u_scaled = absl * x_norm(u, norm);
            double sum = u_scaled;
            std::vector<double> term_norms(k.terms.size());
            for (std::size_t ti = 0; ti < k.terms.size(); ++ti) {
                const double w = std::pow(absl, 1.0 - k.terms[ti].alpha.total() / k.order_l);
                term_norms[ti] = w * x_norm(term_apply(u, k.terms[ti], convolved), norm);
                sum += term_norms[ti];
            }
            const double ratio = sum / fnorm;
            for (std::size_t ti = 0; ti < k.terms.size(); ++ti)
                slots[li].rows.push_back({lam.lambda, static_cast<int>(ti), term_norms[ti], u_scaled, ratio, true});
        } catch (const std::exception& e) {
            slots[li].rows.push_back({lam.lambda, 0, 0.0, 0.0, 0.0, false});
            std::ostringstream os;
            os << "lambda = " << lam.lambda.real() << "+" << lam.lambda.imag() << "i: " << e.what() << "; ";
            slots[li].error = os.str();
        }
    });

    CoercivityReport rep;
    rep.norm_descriptor = norm.describe();
    double rmax = 0.0, rmin = std::numeric_limits<double>::infinity();
    std::ostringstream errors;
    for (const Slot& slot : slots) {
        for (const CoercivityRow& row : slot.rows) {
            rep.rows.push_back(row);
            if (row.ok) {
                rmax = std::max(rmax, row.total_ratio);
                rmin = std::min(rmin, row.total_ratio);
            }
        }
        errors << slot.error;
    }
    rep.max_ratio = rmax;
    rep.min_ratio = rmin;
    rep.uniform = rmin > 0.0 && std::isfinite(rmax) && rmax / rmin <= uniformity_factor;
    rep.detail = errors.str();
    return rep;
}

/// Resolvent decay sweep: sup over probes and lambda of
///   |lambda| ||(O + lambda)^{-1} f||_X / ||f||_X,
/// the empirical surrogate of sectoriality. PASS iff bounded by `bound`.
inline SymbolReport resolvent_sweep(const KernelSet& k, const std::vector<GridFunction>& probes,
                                    const std::vector<SectorParameter>& sweep, const NormSpec& norm,
                                    double bound, int threads = 1) {
    k.validate();
    if (probes.empty()) throw std::invalid_argument("resolvent_sweep: empty probe set");
    if (sweep.empty()) throw std::invalid_argument("resolvent_sweep: empty sweep");
    for (const GridFunction& p : probes)
        if (!(x_norm(p, norm) > 0.0)) throw std::invalid_argument("resolvent_sweep: probes must be nonzero");

    std::vector<ReportRow> rows(probes.size() * sweep.size());
    detail::parallel_for(rows.size(), threads, [&](std::size_t idx) {
        const std::size_t pi = idx / sweep.size();
        const SectorParameter& lam = sweep[idx % sweep.size()];
        const double fnorm = x_norm(probes[pi], norm);
        const GridFunction u = solve_elliptic(EllipticProblem{k, lam, probes[pi]});
        const double ratio = std::abs(lam.lambda) * x_norm(u, norm) / fnorm;
        std::ostringstream os;
        os << "probe " << pi << " lambda=" << lam.lambda.real() << "+" << lam.lambda.imag() << "i";
        rows[idx] = {os.str(), ratio, ratio <= bound};
    });

    SymbolReport rep;
    rep.quantity = "resolvent_decay";
    double sup = 0.0;
    for (std::size_t idx = 0; idx < rows.size(); ++idx) {
        if (rows[idx].value > sup) {
            sup = rows[idx].value;
            rep.arg_lambda = sweep[idx % sweep.size()].lambda;
        }
        rep.rows.push_back(rows[idx]);
    }
    rep.value = sup;
    rep.pass = std::isfinite(sup) && sup <= bound;
    rep.detail = "bound " + std::to_string(bound);
    return rep;
}

/// Relative defect of the resolvent identity
///   (O+lambda)^{-1} - (O+mu)^{-1} = (mu - lambda) (O+lambda)^{-1} (O+mu)^{-1}
/// on a probe.
inline double resolvent_identity_residual(const KernelSet& k, const GridFunction& f,
                                          const SectorParameter& lam, const SectorParameter& mu) {
    const GridFunction rl = solve_elliptic(EllipticProblem{k, lam, f});
    const GridFunction rm = solve_elliptic(EllipticProblem{k, mu, f});
    const GridFunction rlm = solve_elliptic(EllipticProblem{k, lam, rm});
    const GridFunction lhs = rl - rm;
    const GridFunction rhs = (mu.lambda - lam.lambda) * rlm;
    const double den = std::max(l2_norm(lhs), l2_norm(rhs));
    if (den == 0.0) return 0.0;
    return l2_norm(lhs - rhs) / den;
}

} // namespace fracspec
