#include "fracspec/besov.hpp"
#include "fracspec/probes.hpp"

#include <doctest.h>

#include <random>

using namespace fracspec;

namespace {

GridFunction smooth_probe(const SpatialGrid& g, std::uint64_t seed, int cutoff = 8) {
    ProbeSpec spec;
    spec.kind = ProbeSpec::Kind::RandomBandlimited;
    spec.seed = seed;
    spec.cutoff = cutoff;
    return make_probe(spec, g);
}

// Independent Hoelder-type evaluator for p = q = inf, k = 0, m = 1:
//   sup_y y^{-s} sup_{masked x} |f(x + y) - f(x)|  +  sup |f|,
// with the shifted values interpolated by Neville's algorithm on the same
// 4-point stencils the library uses.
double hoelder_norm(const GridFunction& f, double s, double h0, int quad_points) {
    const SpatialGrid& g = f.grid;
    const int n = g.points;
    const double h = g.spacing();
    auto neville = [&](double pos) {
        int base = static_cast<int>(std::floor(pos)) - 1;
        base = std::clamp(base, 0, n - 4);
        double xs[4];
        cplx ps[4];
        for (int r = 0; r < 4; ++r) {
            xs[r] = static_cast<double>(base + r);
            ps[r] = f.values[static_cast<std::size_t>(base + r)];
        }
        for (int level = 1; level < 4; ++level)
            for (int r = 0; r < 4 - level; ++r)
                ps[r] = ((pos - xs[r + level]) * ps[r] + (xs[r] - pos) * ps[r + 1]) / (xs[r] - xs[r + level]);
        return ps[0];
    };
    const std::vector<double> ys = detail::log_ygrid(h, h0, quad_points);
    double semi = 0.0;
    for (double y : ys) {
        const double shift = y / h;
        double sup = 0.0;
        for (int j = 0; j < n; ++j) {
            if (j + shift > n - 1 + 1e-9) break;
            sup = std::max(sup, std::abs(neville(j + shift) - f.values[static_cast<std::size_t>(j)]));
        }
        semi = std::max(semi, std::pow(y, -s) * sup);
    }
    return max_norm(f) + semi;
}

} // namespace

TEST_CASE("BesovParams validation") {
    CHECK_THROWS_AS(BesovParams::standard(1, 1.0, 2.0, 2.0), std::invalid_argument);
    BesovParams bp = BesovParams::standard(1, 0.5, 2.0, 2.0);
    CHECK(bp.k[0] == 0);
    CHECK(bp.m[0] == 2);
    bp.m[0] = 0;
    CHECK_THROWS_AS(bp.validate(1), std::invalid_argument);
    bp = BesovParams::standard(2, 1.5, 2.0, 2.0);
    CHECK(bp.k[0] == 1);
    bp.s[1] = 3.5; // m = 2 is not > 3.5 - 1
    CHECK_THROWS_AS(bp.validate(2), std::invalid_argument);
}

TEST_CASE("finite differences with domain mask") {
    const SpatialGrid g = make_grid(1, kPi, 64);
    SUBCASE("second difference annihilates affine functions") {
        const GridFunction f = sample_closure(g, [](std::span<const double> x) {
            return cplx{3.0 * x[0] - 2.0, 0.0};
        });
        const FiniteDifferenceResult fd = finite_difference(f, 0, 2, 0.37);
        for (std::size_t i = 0; i < fd.mask.size(); ++i)
            if (fd.mask[i]) CHECK(std::abs(fd.diff.values[i]) < 1e-12);
    }
    SUBCASE("first difference of x is the step") {
        const GridFunction f = sample_closure(g, [](std::span<const double> x) { return cplx{x[0], 0.0}; });
        const FiniteDifferenceResult fd = finite_difference(f, 0, 1, 0.5);
        CHECK(fd.count > 0);
        for (std::size_t i = 0; i < fd.mask.size(); ++i)
            if (fd.mask[i]) CHECK(fd.diff.values[i].real() == doctest::Approx(0.5).epsilon(1e-12));
    }
    SUBCASE("cosine with step pi lands on nodes exactly") {
        const GridFunction f = sample_closure(g, [](std::span<const double> x) { return cplx{std::cos(x[0]), 0.0}; });
        const FiniteDifferenceResult fd = finite_difference(f, 0, 1, kPi);
        CHECK(fd.count > 0);
        std::array<double, 3> x{};
        for (std::size_t i = 0; i < fd.mask.size(); ++i)
            if (fd.mask[i]) {
                detail::node_coords(g, i, x);
                CHECK(std::abs(fd.diff.values[i] - cplx{-2.0 * std::cos(x[0]), 0.0}) < 1e-12);
            }
    }
    SUBCASE("oversized step empties the mask") {
        const GridFunction f = GridFunction::zero(g);
        CHECK_THROWS_AS(finite_difference(f, 0, 1, 10.0 * kPi), std::runtime_error);
    }
}

TEST_CASE("Besov norm basics") {
    const SpatialGrid g = make_grid(1, kPi, 256);
    const BesovParams bp = BesovParams::standard(1, 0.5, 2.0, 2.0);
    SUBCASE("zero function") {
        CHECK(besov_norm(GridFunction::zero(g), bp) == 0.0);
    }
    SUBCASE("absolute homogeneity") {
        const GridFunction f = smooth_probe(g, 9);
        const double base = besov_norm(f, bp);
        const double scaled = besov_norm(cplx{3.7, 0.0} * f, bp);
        CHECK(std::abs(scaled - 3.7 * base) <= 1e-12 * scaled);
    }
    SUBCASE("non-finite input rejected") {
        GridFunction f = GridFunction::zero(g);
        f.values[0] = cplx{std::numeric_limits<double>::quiet_NaN(), 0.0};
        CHECK_THROWS_AS(besov_norm(f, bp), std::invalid_argument);
    }
}

TEST_CASE("sup-norm Besov example: ||x|| = pi + 1") {
    const SpatialGrid g = make_grid(1, kPi, 512);
    const GridFunction f = sample_closure(g, [](std::span<const double> x) { return cplx{x[0], 0.0}; });
    BesovParams bp;
    const double inf = std::numeric_limits<double>::infinity();
    bp.s = {0.5};
    bp.p = inf;
    bp.q = inf;
    bp.m = {1};
    bp.k = {0};
    bp.h0 = 1.0;
    const double norm = besov_norm(f, bp);
    CHECK(std::abs(norm - (kPi + 1.0)) <= 1e-3);
}

TEST_CASE("norm axioms on random pairs") {
    const SpatialGrid g = make_grid(1, kPi, 128);
    const BesovParams bp = BesovParams::standard(1, 0.5, 2.0, 2.0);
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 12; ++trial) {
        const GridFunction f = smooth_probe(g, rng());
        const GridFunction h = smooth_probe(g, rng());
        const double nf = besov_norm(f, bp);
        const double nh = besov_norm(h, bp);
        const double nfh = besov_norm(f + h, bp);
        CHECK(nf > 0.0);
        CHECK(nfh <= nf + nh + 1e-10 * (nf + nh));
        const cplx c{-2.25, 1.5};
        CHECK(std::abs(besov_norm(c * f, bp) - std::abs(c) * nf) <= 1e-12 * std::abs(c) * nf);
    }
}

TEST_CASE("y-quadrature refinement stability") {
    const SpatialGrid g = make_grid(1, kPi, 256);
    const GridFunction f = smooth_probe(g, 31);
    BesovParams bp = BesovParams::standard(1, 0.5, 2.0, 2.0);
    const double coarse = besov_norm(f, bp);
    bp.quad_points = 128;
    const double fine = besov_norm(f, bp);
    CHECK(std::abs(fine - coarse) <= 0.01 * coarse);
}

TEST_CASE("Hoelder reduction cross-check (p = q = inf, m = 1, k = 0)") {
    const SpatialGrid g = make_grid(1, kPi, 256);
    BesovParams bp;
    const double inf = std::numeric_limits<double>::infinity();
    bp.s = {0.5};
    bp.p = inf;
    bp.q = inf;
    bp.m = {1};
    bp.k = {0};
    bp.h0 = 1.0;
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 10; ++trial) {
        const GridFunction f = smooth_probe(g, rng());
        const double lib = besov_norm(f, bp);
        const double oracle = hoelder_norm(f, 0.5, bp.h0, bp.quad_points);
        CHECK(std::abs(lib - oracle) <= 1e-6 * oracle);
    }
}

TEST_CASE("2-D Besov norm factorizes on separable products") {
    // f(x, y) = g(x) h(y): the L_p part is ||g|| ||h|| and the axis
    // seminorms are sem(g) ||h|| and ||g|| sem(h), all from 1-D components
    const SpatialGrid g2 = make_grid(2, kPi, 32);
    const SpatialGrid g1 = make_grid(1, kPi, 32);
    auto gx = [](double x) { return std::cos(x) + 0.3 * std::sin(2.0 * x); };
    auto hy = [](double y) { return 1.0 + 0.5 * std::cos(3.0 * y); };
    const GridFunction f2 = sample_closure(g2, [&](std::span<const double> x) {
        return cplx{gx(x[0]) * hy(x[1]), 0.0};
    });
    const GridFunction f1g = sample_closure(g1, [&](std::span<const double> x) { return cplx{gx(x[0]), 0.0}; });
    const GridFunction f1h = sample_closure(g1, [&](std::span<const double> x) { return cplx{hy(x[0]), 0.0}; });
    const BesovParams bp2 = BesovParams::standard(2, 0.5, 2.0, 2.0);
    const BesovParams bp1 = BesovParams::standard(1, 0.5, 2.0, 2.0);
    const BesovComponents c2 = besov_components(f2, bp2);
    const BesovComponents cg = besov_components(f1g, bp1);
    const BesovComponents ch = besov_components(f1h, bp1);
    CHECK(c2.lp_part == doctest::Approx(cg.lp_part * ch.lp_part).epsilon(1e-12));
    CHECK(c2.seminorms[0] == doctest::Approx(cg.seminorms[0] * ch.lp_part).epsilon(1e-12));
    CHECK(c2.seminorms[1] == doctest::Approx(cg.lp_part * ch.seminorms[0]).epsilon(1e-12));
}

TEST_CASE("Sobolev-Besov norm") {
    const SpatialGrid g = make_grid(1, kPi, 128);
    const BesovParams bp = BesovParams::standard(1, 0.5, 2.0, 2.0);
    const std::vector<FractionalMultiIndex> orders{FractionalMultiIndex({2.0})};
    SUBCASE("zero function") {
        CHECK(sobolev_besov_norm(GridFunction::zero(g), bp, orders, 2.0) == 0.0);
    }
    SUBCASE("single mode doubles its Besov norm") {
        const GridFunction f = sample_closure(g, [](std::span<const double> x) {
            return cplx{std::cos(x[0]), 0.0};
        });
        const double plain = besov_norm(f, bp);
        const double sob = sobolev_besov_norm(f, bp, orders, 2.0);
        CHECK(std::abs(sob - 2.0 * plain) <= 1e-10 * sob);
    }
    SUBCASE("order above l rejected") {
        const GridFunction f = smooth_probe(g, 2);
        CHECK_THROWS_AS(sobolev_besov_norm(f, bp, {FractionalMultiIndex({3.0})}, 2.0), std::invalid_argument);
    }
}

TEST_CASE("mixed time-space norm") {
    const SpatialGrid g = make_grid(1, kPi, 64);
    const BesovParams bp_space = BesovParams::standard(1, 0.5, 2.0, 2.0);
    BesovParams bp_time = BesovParams::standard(1, 0.5, 2.0, 2.0);
    bp_time.m = {1};
    SUBCASE("zero function") {
        MixedFunction u = sample_forcing(g, 2.0, 32, [](double, std::span<const double>) {
            return cplx{0.0, 0.0};
        });
        CHECK(mixed_norm(u, bp_space, bp_time) == 0.0);
    }
    SUBCASE("separable product factorizes") {
        auto gfun = [](double t) { return std::exp(-t) * (1.0 + 0.5 * std::sin(3.0 * t)); };
        const GridFunction w = smooth_probe(g, 12);
        MixedFunction u = sample_forcing(g, 2.0, 64, [&](double t, std::span<const double>) {
            return cplx{gfun(t), 0.0};
        });
        for (std::size_t j = 0; j < u.slices.size(); ++j) {
            const double c = u.slices[j].values[0].real();
            u.slices[j] = cplx{c, 0.0} * w;
        }
        const double lib = mixed_norm(u, bp_space, bp_time);
        // scalar-profile oracle: same y-grid and mask logic, scalar values
        const double wnorm = besov_norm(w, bp_space);
        const int nodes = static_cast<int>(u.slices.size());
        std::vector<double> gv(static_cast<std::size_t>(nodes));
        for (int j = 0; j < nodes; ++j) gv[static_cast<std::size_t>(j)] = std::abs(gfun(u.dt * j));
        double lp = 0.0;
        for (double v : gv) lp += v * v * u.dt;
        lp = std::sqrt(lp);
        const std::vector<double> ys = detail::log_ygrid(u.dt, bp_time.h0, bp_time.quad_points);
        std::vector<double> normy(ys.size(), -1.0);
        auto interp_g = [&](double pos) {
            int base = static_cast<int>(std::floor(pos)) - 1;
            base = std::clamp(base, 0, nodes - 4);
            const double t = pos - base;
            const double w0 = -(t - 1.0) * (t - 2.0) * (t - 3.0) / 6.0;
            const double w1 = t * (t - 2.0) * (t - 3.0) / 2.0;
            const double w2 = -t * (t - 1.0) * (t - 3.0) / 2.0;
            const double w3 = t * (t - 1.0) * (t - 2.0) / 6.0;
            return w0 * gfun(u.dt * (base + 0)) + w1 * gfun(u.dt * (base + 1)) +
                   w2 * gfun(u.dt * (base + 2)) + w3 * gfun(u.dt * (base + 3));
        };
        for (std::size_t i = 0; i < ys.size(); ++i) {
            const double shift = ys[i] / u.dt;
            double acc = 0.0;
            bool any = false;
            for (int j = 0; j < nodes; ++j) {
                if (j + shift > nodes - 1 + 1e-9) break;
                const double d = interp_g(j + shift) - gfun(u.dt * j);
                acc += d * d * u.dt;
                any = true;
            }
            if (any) normy[i] = std::sqrt(acc);
        }
        const double semi = detail::y_quadrature(ys, normy, 0.5, 2.0);
        const double oracle = (lp + semi) * wnorm;
        CHECK(std::abs(lib - oracle) <= 1e-3 * oracle);
    }
    SUBCASE("mixed norm dominates the space-time box surrogate on separable probes") {
        const GridFunction w = smooth_probe(g, 21);
        MixedFunction u = sample_forcing(g, 2.0, 48, [](double t, std::span<const double>) {
            return cplx{std::cos(t), 0.0};
        });
        for (std::size_t j = 0; j < u.slices.size(); ++j) {
            const double c = u.slices[j].values[0].real();
            u.slices[j] = cplx{c, 0.0} * w;
        }
        const double y = mixed_norm(u, bp_space, bp_time);
        // box surrogate from factor components: Lp_t Lp_x + sem_t Lp_x + Lp_t sem_x
        const BesovComponents wc = besov_components(w, bp_space);
        const int nodes = static_cast<int>(u.slices.size());
        double lp_t = 0.0;
        for (int j = 0; j < nodes; ++j) lp_t += std::cos(u.dt * j) * std::cos(u.dt * j) * u.dt;
        lp_t = std::sqrt(lp_t);
        const std::vector<double> ys = detail::log_ygrid(u.dt, bp_time.h0, bp_time.quad_points);
        std::vector<double> normy(ys.size(), -1.0);
        for (std::size_t i = 0; i < ys.size(); ++i) {
            const double shift = ys[i] / u.dt;
            double acc = 0.0;
            bool any = false;
            for (int j = 0; j < nodes; ++j) {
                if (j + shift > nodes - 1 + 1e-9) break;
                const double d = std::cos(u.dt * (j + shift)) - std::cos(u.dt * j);
                acc += d * d * u.dt;
                any = true;
            }
            if (any) normy[i] = std::sqrt(acc);
        }
        const double sem_t = detail::y_quadrature(ys, normy, 0.5, 2.0);
        double sem_x = 0.0;
        for (double s : wc.seminorms) sem_x += s;
        const double box = lp_t * wc.lp_part + sem_t * wc.lp_part + lp_t * sem_x;
        CHECK(y >= box * (1.0 - 1e-6));
    }
    SUBCASE("too few time nodes") {
        MixedFunction u;
        u.dt = 0.1;
        u.slices = {GridFunction::zero(g)};
        CHECK_THROWS_AS(mixed_norm(u, bp_space, bp_time), std::invalid_argument);
        u.slices = {GridFunction::zero(g), GridFunction::zero(g), GridFunction::zero(g)};
        CHECK_THROWS_AS(mixed_norm(u, bp_space, bp_time), std::invalid_argument);
    }
}

TEST_CASE("embedding report") {
    const SpatialGrid g = make_grid(1, kPi, 256);
    const BesovParams bp = BesovParams::standard(1, 0.5, 2.0, 2.0);
    ProbeSpec spec;
    spec.kind = ProbeSpec::Kind::Bump;
    spec.center = {0.0};
    spec.width = 1.0;
    const GridFunction u = make_probe(spec, g);
    std::vector<double> hs;
    for (int e = -6; e <= 0; ++e) hs.push_back(std::pow(2.0, e));

    SUBCASE("mu = 0, alpha = 0, p = p1 is dominated by the h^{-1} term") {
        const SymbolReport rep = embedding_report(u, FractionalMultiIndex({0.0}), 2.0, bp, bp.p, 0.0, hs);
        CHECK(rep.pass);
        for (const ReportRow& row : rep.rows)
            if (row.label.rfind("h=", 0) == 0) CHECK(row.value <= 1.0 + 1e-12);
    }
    SUBCASE("zero probe reports degenerate and passes") {
        const SymbolReport rep =
            embedding_report(GridFunction::zero(g), FractionalMultiIndex({1.0}), 2.0, bp, bp.p, 0.0, hs);
        CHECK(rep.pass);
        CHECK(rep.detail.find("degenerate") != std::string::npos);
    }
    SUBCASE("first-derivative embedding constants are finite and stable") {
        for (double mu : {0.0, 0.4}) {
            const SymbolReport rep = embedding_report(u, FractionalMultiIndex({1.0}), 2.0, bp, bp.p, mu, hs);
            CHECK(rep.pass);
            CHECK(std::isfinite(rep.value));
            CHECK(rep.value > 0.0);
        }
    }
    SUBCASE("kappa > 1 is a precondition error") {
        CHECK_THROWS_AS(embedding_report(u, FractionalMultiIndex({3.0}), 2.0, bp, bp.p, 0.0, hs),
                        std::domain_error);
        CHECK_THROWS_AS(embedding_report(u, FractionalMultiIndex({1.0}), 2.0, bp, bp.p, 0.9, hs),
                        std::domain_error);
    }
}
