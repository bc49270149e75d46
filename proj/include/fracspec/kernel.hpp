#pragma once

#include "fracspec/fractional.hpp"
#include "fracspec/grid.hpp"

#include <cctype>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>

namespace fracspec {

using SymbolFn = std::function<cplx(std::span<const double>)>;
using SymbolPartialFn = std::function<cplx(std::span<const double>, int)>;

/// One convolution term: derivative orders alpha and the bounded symbol
/// xi -> a^_alpha(xi), with optional analytic first partials.
struct KernelTerm {
    FractionalMultiIndex alpha;
    SymbolFn symbol;
    SymbolPartialFn partial; // may be empty
    std::string describe;
};

/// The family {a_alpha} defining L(xi) = sum a^_alpha(xi) (i xi)^alpha,
/// with the principal order l and the sector angle phi1 of L.
struct KernelSet {
    int dim = 1;
    double order_l = 2.0;
    double sector_angle = 0.0; // phi1
    std::vector<KernelTerm> terms;

    void validate() const {
        if (dim < 1 || dim > 3) throw std::invalid_argument("KernelSet: dim must be 1..3");
        if (!(order_l > 0.0)) throw std::invalid_argument("KernelSet: order l must be positive");
        if (!(sector_angle >= 0.0 && sector_angle < kPi))
            throw std::invalid_argument("KernelSet: sector angle must lie in [0, pi)");
        if (terms.empty()) throw std::invalid_argument("KernelSet: no terms");
        for (const KernelTerm& t : terms) {
            if (t.alpha.dim() != dim) throw std::invalid_argument("KernelSet: term dimension mismatch");
            if (t.alpha.total() > order_l + 1e-12)
                throw std::invalid_argument("KernelSet: term order exceeds l");
            if (!t.symbol) throw std::invalid_argument("KernelSet: term without symbol");
        }
        // Every axis must carry its principal term alpha(l, k) = l e_k.
        for (int a = 0; a < dim; ++a) {
            bool found = false;
            for (const KernelTerm& t : terms)
                if (is_principal(t, a)) { found = true; break; }
            if (!found)
                throw std::invalid_argument("KernelSet: missing principal term for axis " + std::to_string(a));
        }
    }

    bool is_principal(const KernelTerm& t, int axis) const {
        for (int a = 0; a < dim; ++a) {
            const double want = (a == axis) ? order_l : 0.0;
            if (std::abs(t.alpha.orders[static_cast<std::size_t>(a)] - want) > 1e-12) return false;
        }
        return true;
    }

    /// Combined principal coefficient a^_{alpha(l,axis)}(xi) (terms sharing
    /// the principal multi-index are summed).
    cplx principal_symbol(int axis, std::span<const double> xi) const {
        cplx s{0.0, 0.0};
        for (const KernelTerm& t : terms)
            if (is_principal(t, axis)) s += t.symbol(xi);
        return s;
    }
};

/// Complex parameter lambda constrained to the sector |arg lambda| <= phi2
/// (the origin always belongs to the sector).
struct SectorParameter {
    cplx lambda{0.0, 0.0};
    double angle_bound = 0.0; // phi2

    void validate() const {
        if (!(angle_bound >= 0.0 && angle_bound < kPi))
            throw std::invalid_argument("SectorParameter: angle bound must lie in [0, pi)");
        if (lambda != cplx{0.0, 0.0} &&
            std::abs(std::arg(lambda)) > angle_bound + 1e-12)
            throw std::invalid_argument("SectorParameter: lambda outside its sector");
    }
};

// ---------------------------------------------------------------------------
// Built-in kernels and the kernel file format.
// ---------------------------------------------------------------------------

namespace detail {

inline KernelTerm delta_term(int dim, int axis, double l, double c) {
    KernelTerm t;
    t.alpha = FractionalMultiIndex::axis_order(dim, axis, l);
    t.symbol = [c](std::span<const double>) { return cplx{c, 0.0}; };
    t.partial = [](std::span<const double>, int) { return cplx{0.0, 0.0}; };
    std::ostringstream os;
    os << "delta(" << c << ") @ axis " << axis;
    t.describe = os.str();
    return t;
}

inline double radius_sq(std::span<const double> xi) {
    double r = 0.0;
    for (double x : xi) r += x * x;
    return r;
}

inline SymbolFn gauss_symbol(double c, double w) {
    return [c, w](std::span<const double> xi) { return cplx{c * std::exp(-w * radius_sq(xi)), 0.0}; };
}
inline SymbolPartialFn gauss_partial(double c, double w) {
    return [c, w](std::span<const double> xi, int axis) {
        return cplx{-2.0 * w * xi[static_cast<std::size_t>(axis)] * c * std::exp(-w * radius_sq(xi)), 0.0};
    };
}

inline SymbolFn expdecay_symbol(double c, double w) {
    return [c, w](std::span<const double> xi) { return cplx{c * std::exp(-w * std::sqrt(radius_sq(xi))), 0.0}; };
}
inline SymbolPartialFn expdecay_partial(double c, double w) {
    return [c, w](std::span<const double> xi, int axis) {
        const double r = std::sqrt(radius_sq(xi));
        if (r == 0.0) return cplx{std::numeric_limits<double>::quiet_NaN(), 0.0};
        return cplx{-w * xi[static_cast<std::size_t>(axis)] / r * c * std::exp(-w * r), 0.0};
    };
}

} // namespace detail

/// Built-in kernel families:
///   neg_laplace          L = sum_k xi_k^2                 (alpha = 2 e_k, a^ = -1)
///   frac_laplace(beta)   L = sum_k |xi_k|^beta            (phase symbols, l = beta)
///   gauss_conv(c, w)     neg_laplace plus Gaussian-modulated principal terms
///   expdecay_conv(c, w)  neg_laplace plus exponentially decaying terms
///   bad_sign             L = -sum_k xi_k^2, deliberately outside every sector
inline KernelSet builtin_kernel(const std::string& name, std::span<const double> params, int dim) {
    KernelSet k;
    k.dim = dim;
    if (name == "neg_laplace") {
        k.order_l = 2.0;
        k.sector_angle = 0.0;
        for (int a = 0; a < dim; ++a) k.terms.push_back(detail::delta_term(dim, a, 2.0, -1.0));
    } else if (name == "frac_laplace") {
        if (params.size() != 1) throw std::invalid_argument("frac_laplace expects one parameter (beta)");
        const double beta = params[0];
        if (!(beta > 0.0)) throw std::invalid_argument("frac_laplace: beta must be positive");
        k.order_l = beta;
        k.sector_angle = 0.0;
        for (int a = 0; a < dim; ++a) {
            KernelTerm t;
            t.alpha = FractionalMultiIndex::axis_order(dim, a, beta);
            // phase e^{-i beta pi/2 sgn xi_a} turns (i xi_a)^beta into |xi_a|^beta
            t.symbol = [beta, a](std::span<const double> xi) {
                const double x = xi[static_cast<std::size_t>(a)];
                const double sgn = x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0);
                return std::exp(cplx{0.0, -beta * (kPi / 2.0) * sgn});
            };
            t.partial = [](std::span<const double>, int) { return cplx{0.0, 0.0}; };
            std::ostringstream os;
            os << "phase(|xi|^" << beta << ") @ axis " << a;
            t.describe = os.str();
            k.terms.push_back(std::move(t));
        }
    } else if (name == "gauss_conv" || name == "expdecay_conv") {
        if (params.size() != 2) throw std::invalid_argument(name + " expects two parameters (c, w)");
        const double c = params[0], w = params[1];
        if (!(w > 0.0)) throw std::invalid_argument(name + ": width w must be positive");
        k.order_l = 2.0;
        k.sector_angle = 0.0;
        for (int a = 0; a < dim; ++a) k.terms.push_back(detail::delta_term(dim, a, 2.0, -1.0));
        for (int a = 0; a < dim; ++a) {
            KernelTerm t;
            t.alpha = FractionalMultiIndex::axis_order(dim, a, 2.0);
            if (name == "gauss_conv") {
                t.symbol = detail::gauss_symbol(c, w);
                t.partial = detail::gauss_partial(c, w);
                std::ostringstream os;
                os << "gauss(" << c << "," << w << ") @ axis " << a;
                t.describe = os.str();
            } else {
                t.symbol = detail::expdecay_symbol(c, w);
                t.partial = detail::expdecay_partial(c, w);
                std::ostringstream os;
                os << "expdecay(" << c << "," << w << ") @ axis " << a;
                t.describe = os.str();
            }
            k.terms.push_back(std::move(t));
        }
    } else if (name == "bad_sign") {
        k.order_l = 2.0;
        k.sector_angle = kPi / 2.0;
        for (int a = 0; a < dim; ++a) k.terms.push_back(detail::delta_term(dim, a, 2.0, +1.0));
    } else {
        throw std::invalid_argument("unknown builtin kernel '" + name + "'");
    }
    k.validate();
    return k;
}

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

inline std::vector<double> parse_double_list(const std::string& s, const std::string& ctx) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string field;
    while (std::getline(ss, field, ',')) {
        field = trim(field);
        if (field.empty()) continue;
        std::size_t used = 0;
        out.push_back(std::stod(field, &used));
        if (used != field.size()) throw std::invalid_argument(ctx + ": malformed number '" + field + "'");
    }
    return out;
}

/// Radial table symbol: rows "r,re,im" with r ascending; linear interpolation
/// in r = |xi|, clamped at the ends.
inline SymbolFn load_table_symbol(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("kernel table: cannot open " + path);
    std::vector<double> rs;
    std::vector<cplx> vals;
    std::string line;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        std::vector<double> f = parse_double_list(line, "kernel table " + path);
        if (f.size() != 3) throw std::invalid_argument("kernel table " + path + ": expected 'r,re,im' rows");
        if (!rs.empty() && f[0] <= rs.back())
            throw std::invalid_argument("kernel table " + path + ": radii must be strictly increasing");
        rs.push_back(f[0]);
        vals.emplace_back(f[1], f[2]);
    }
    if (rs.size() < 2) throw std::invalid_argument("kernel table " + path + ": need at least two rows");
    return [rs = std::move(rs), vals = std::move(vals)](std::span<const double> xi) {
        const double r = std::sqrt(radius_sq(xi));
        if (r <= rs.front()) return vals.front();
        if (r >= rs.back()) return vals.back();
        const auto it = std::upper_bound(rs.begin(), rs.end(), r);
        const std::size_t j = static_cast<std::size_t>(it - rs.begin());
        const double t = (r - rs[j - 1]) / (rs[j] - rs[j - 1]);
        return vals[j - 1] * (1.0 - t) + vals[j] * t;
    };
}

inline void parse_symbol_spec(KernelTerm& term, const std::string& spec, const std::string& ctx) {
    const std::string s = trim(spec);
    if (s.rfind("table", 0) == 0) {
        const std::string path = trim(s.substr(5));
        if (path.empty()) throw std::invalid_argument(ctx + ": table needs a file path");
        term.symbol = load_table_symbol(path);
        term.describe = "table " + path;
        return;
    }
    const std::size_t open = s.find('(');
    const std::size_t close = s.rfind(')');
    if (open == std::string::npos || close == std::string::npos || close < open)
        throw std::invalid_argument(ctx + ": malformed symbol spec '" + s + "'");
    const std::string name = trim(s.substr(0, open));
    const std::vector<double> p = parse_double_list(s.substr(open + 1, close - open - 1), ctx);
    if (name == "delta") {
        if (p.size() != 1) throw std::invalid_argument(ctx + ": delta expects one parameter");
        const double c = p[0];
        term.symbol = [c](std::span<const double>) { return cplx{c, 0.0}; };
        term.partial = [](std::span<const double>, int) { return cplx{0.0, 0.0}; };
    } else if (name == "gauss") {
        if (p.size() != 2) throw std::invalid_argument(ctx + ": gauss expects two parameters");
        term.symbol = gauss_symbol(p[0], p[1]);
        term.partial = gauss_partial(p[0], p[1]);
    } else if (name == "expdecay") {
        if (p.size() != 2) throw std::invalid_argument(ctx + ": expdecay expects two parameters");
        term.symbol = expdecay_symbol(p[0], p[1]);
        term.partial = expdecay_partial(p[0], p[1]);
    } else {
        throw std::invalid_argument(ctx + ": unknown symbol builtin '" + name + "'");
    }
    term.describe = s;
}

} // namespace detail

/// Parse the text kernel format: optional "l:" and "phi1:" header lines,
/// then one term per line
///   alpha: a1,...,an ; symbol: <delta(c) | gauss(c,w) | expdecay(c,w) | table PATH>
/// Lines starting with '#' are comments. l defaults to the largest |alpha|,
/// phi1 defaults to 0.
inline KernelSet parse_kernel_file(const std::string& path, int dim) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("kernel file: cannot open " + path);
    KernelSet k;
    k.dim = dim;
    std::optional<double> l;
    double phi1 = 0.0;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string ctx = path + ":" + std::to_string(line_no);
        line = detail::trim(line);
        if (line.empty() || line[0] == '#') continue;
        if (line.rfind("l:", 0) == 0) {
            l = std::stod(detail::trim(line.substr(2)));
            continue;
        }
        if (line.rfind("phi1:", 0) == 0) {
            phi1 = std::stod(detail::trim(line.substr(5)));
            continue;
        }
        if (line.rfind("alpha:", 0) != 0)
            throw std::invalid_argument(ctx + ": expected 'alpha: ... ; symbol: ...'");
        const std::size_t semi = line.find(';');
        if (semi == std::string::npos)
            throw std::invalid_argument(ctx + ": missing ';' separator");
        const std::string alpha_part = detail::trim(line.substr(6, semi - 6));
        std::string sym_part = detail::trim(line.substr(semi + 1));
        if (sym_part.rfind("symbol:", 0) != 0)
            throw std::invalid_argument(ctx + ": missing 'symbol:' field");
        sym_part = detail::trim(sym_part.substr(7));
        KernelTerm term;
        std::vector<double> orders = detail::parse_double_list(alpha_part, ctx);
        if (static_cast<int>(orders.size()) != dim)
            throw std::invalid_argument(ctx + ": alpha must have " + std::to_string(dim) + " components");
        term.alpha = FractionalMultiIndex(std::move(orders));
        detail::parse_symbol_spec(term, sym_part, ctx);
        k.terms.push_back(std::move(term));
    }
    if (k.terms.empty()) throw std::invalid_argument(path + ": no kernel terms");
    if (l) {
        k.order_l = *l;
    } else {
        double lmax = 0.0;
        for (const KernelTerm& t : k.terms) lmax = std::max(lmax, t.alpha.total());
        k.order_l = lmax;
    }
    k.sector_angle = phi1;
    k.validate();
    return k;
}

} // namespace fracspec
