#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fracspec {

using cplx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;

/// Periodic computational box [-R, R]^n sampled with N points per axis.
///
/// Spatial nodes per axis:    x_j  = -R + (2R/N) j,        j = 0..N-1
/// Frequency lattice per axis: xi_t = (pi/R) (t - N/2),    t = 0..N-1
///
/// Storage of samples and spectral coefficients is row-major over the
/// per-axis indices, axis 0 slowest.
struct SpatialGrid {
    int dim = 1;
    double radius = 1.0;
    int points = 8;

    std::size_t size() const {
        std::size_t s = 1;
        for (int a = 0; a < dim; ++a) s *= static_cast<std::size_t>(points);
        return s;
    }
    double spacing() const { return 2.0 * radius / points; }
    double freq_spacing() const { return kPi / radius; }
    double node(int j) const { return -radius + spacing() * j; }
    double freq(int t) const { return freq_spacing() * (t - points / 2); }

    bool operator==(const SpatialGrid& o) const {
        return dim == o.dim && radius == o.radius && points == o.points;
    }
};

inline SpatialGrid make_grid(int dim, double radius, int points) {
    if (dim < 1 || dim > 3)
        throw std::invalid_argument("make_grid: dim must be 1, 2 or 3");
    if (!(radius > 0.0) || !std::isfinite(radius))
        throw std::invalid_argument("make_grid: radius must be positive");
    if (points < 8 || points % 2 != 0)
        throw std::invalid_argument("make_grid: points must be even and >= 8");
    return SpatialGrid{dim, radius, points};
}

namespace detail {

/// Decode a flat row-major index into per-axis indices.
inline void decode_index(const SpatialGrid& g, std::size_t flat, std::array<int, 3>& idx) {
    for (int a = g.dim - 1; a >= 0; --a) {
        idx[static_cast<std::size_t>(a)] = static_cast<int>(flat % static_cast<std::size_t>(g.points));
        flat /= static_cast<std::size_t>(g.points);
    }
}

inline std::size_t encode_index(const SpatialGrid& g, const std::array<int, 3>& idx) {
    std::size_t flat = 0;
    for (int a = 0; a < g.dim; ++a)
        flat = flat * static_cast<std::size_t>(g.points) + static_cast<std::size_t>(idx[static_cast<std::size_t>(a)]);
    return flat;
}

inline void node_coords(const SpatialGrid& g, std::size_t flat, std::array<double, 3>& x) {
    std::array<int, 3> idx{};
    decode_index(g, flat, idx);
    for (int a = 0; a < g.dim; ++a) x[static_cast<std::size_t>(a)] = g.node(idx[static_cast<std::size_t>(a)]);
}

inline void freq_coords(const SpatialGrid& g, std::size_t flat, std::array<double, 3>& xi) {
    std::array<int, 3> idx{};
    decode_index(g, flat, idx);
    for (int a = 0; a < g.dim; ++a) xi[static_cast<std::size_t>(a)] = g.freq(idx[static_cast<std::size_t>(a)]);
}

/// Stride of one step along `axis` in the row-major layout.
inline std::size_t axis_stride(const SpatialGrid& g, int axis) {
    std::size_t s = 1;
    for (int a = g.dim - 1; a > axis; --a) s *= static_cast<std::size_t>(g.points);
    return s;
}

/// Visit every 1-D line along `axis`: fn(base_flat_index, stride).
template <class Fn>
inline void for_each_line(const SpatialGrid& g, int axis, Fn&& fn) {
    const std::size_t stride = axis_stride(g, axis);
    const std::size_t n = static_cast<std::size_t>(g.points);
    const std::size_t total = g.size();
    const std::size_t block = stride * n;
    for (std::size_t outer = 0; outer < total; outer += block)
        for (std::size_t inner = 0; inner < stride; ++inner)
            fn(outer + inner, stride);
}

} // namespace detail

/// Complex samples on the spatial nodes of a grid.
struct GridFunction {
    SpatialGrid grid;
    std::vector<cplx> values;

    GridFunction() = default;
    GridFunction(const SpatialGrid& g, std::vector<cplx> v) : grid(g), values(std::move(v)) {
        if (values.size() != grid.size())
            throw std::invalid_argument("GridFunction: value count does not match grid");
    }
    static GridFunction zero(const SpatialGrid& g) {
        return GridFunction(g, std::vector<cplx>(g.size(), cplx{0.0, 0.0}));
    }
};

/// Complex coefficients indexed by the frequency lattice of a grid.
struct SpectrumFunction {
    SpatialGrid grid;
    std::vector<cplx> coefficients;

    SpectrumFunction() = default;
    SpectrumFunction(const SpatialGrid& g, std::vector<cplx> c) : grid(g), coefficients(std::move(c)) {
        if (coefficients.size() != grid.size())
            throw std::invalid_argument("SpectrumFunction: coefficient count does not match grid");
    }
    static SpectrumFunction zero(const SpatialGrid& g) {
        return SpectrumFunction(g, std::vector<cplx>(g.size(), cplx{0.0, 0.0}));
    }
};

/// Sample a pointwise closure on every node. Rejects non-finite outputs.
inline GridFunction sample_closure(const SpatialGrid& grid,
                                   const std::function<cplx(std::span<const double>)>& rule) {
    GridFunction f = GridFunction::zero(grid);
    std::array<double, 3> x{};
    for (std::size_t i = 0; i < f.values.size(); ++i) {
        detail::node_coords(grid, i, x);
        const cplx v = rule(std::span<const double>(x.data(), static_cast<std::size_t>(grid.dim)));
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw std::runtime_error("sample_closure: non-finite value at node " + std::to_string(i));
        f.values[i] = v;
    }
    return f;
}

/// Discrete L_p norm; p = infinity gives the max norm, finite p uses the
/// cell-volume weighted Riemann sum.
inline double lp_norm(std::span<const cplx> v, double p, double cell_volume) {
    if (std::isinf(p)) {
        double m = 0.0;
        for (const cplx& z : v) m = std::max(m, std::abs(z));
        return m;
    }
    if (!(p >= 1.0)) throw std::invalid_argument("lp_norm: p must be >= 1");
    double acc = 0.0;
    for (const cplx& z : v) acc += std::pow(std::abs(z), p);
    return std::pow(acc * cell_volume, 1.0 / p);
}

inline double lp_norm(const GridFunction& f, double p) {
    const double vol = std::pow(f.grid.spacing(), f.grid.dim);
    return lp_norm(std::span<const cplx>(f.values), p, vol);
}

inline double l2_norm(const GridFunction& f) { return lp_norm(f, 2.0); }

inline double max_norm(const GridFunction& f) {
    return lp_norm(std::span<const cplx>(f.values), std::numeric_limits<double>::infinity(), 1.0);
}

/// || f - g ||_2 / || g ||_2 with 0/0 = 0.
inline double rel_l2_distance(const GridFunction& f, const GridFunction& g) {
    if (!(f.grid == g.grid)) throw std::invalid_argument("rel_l2_distance: grid mismatch");
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < f.values.size(); ++i) {
        num += std::norm(f.values[i] - g.values[i]);
        den += std::norm(g.values[i]);
    }
    if (den == 0.0) return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return std::sqrt(num / den);
}

inline GridFunction operator+(const GridFunction& a, const GridFunction& b) {
    if (!(a.grid == b.grid)) throw std::invalid_argument("GridFunction+: grid mismatch");
    GridFunction r = a;
    for (std::size_t i = 0; i < r.values.size(); ++i) r.values[i] += b.values[i];
    return r;
}

inline GridFunction operator-(const GridFunction& a, const GridFunction& b) {
    if (!(a.grid == b.grid)) throw std::invalid_argument("GridFunction-: grid mismatch");
    GridFunction r = a;
    for (std::size_t i = 0; i < r.values.size(); ++i) r.values[i] -= b.values[i];
    return r;
}

inline GridFunction operator*(cplx c, const GridFunction& a) {
    GridFunction r = a;
    for (cplx& v : r.values) v *= c;
    return r;
}

// ---------------------------------------------------------------------------
// Serialization: CSV (index_0..index_{n-1}, re, im) and a little-endian
// binary block ("n N R" text header line, then interleaved re/im doubles).
// ---------------------------------------------------------------------------

namespace detail {
inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}
} // namespace detail

inline void write_grid_csv(const GridFunction& f, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_grid_csv: cannot open " + path);
    for (int a = 0; a < f.grid.dim; ++a) out << "index_" << a << ",";
    out << "re,im\n";
    std::array<int, 3> idx{};
    for (std::size_t i = 0; i < f.values.size(); ++i) {
        detail::decode_index(f.grid, i, idx);
        for (int a = 0; a < f.grid.dim; ++a) out << idx[static_cast<std::size_t>(a)] << ",";
        out << detail::fmt_double(f.values[i].real()) << "," << detail::fmt_double(f.values[i].imag()) << "\n";
    }
}

/// Reads a CSV written by write_grid_csv; the grid is supplied by the caller.
inline GridFunction read_grid_csv(const SpatialGrid& grid, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_grid_csv: cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("read_grid_csv: empty file " + path);
    GridFunction f = GridFunction::zero(grid);
    std::size_t count = 0;
    std::array<int, 3> idx{};
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::size_t pos = 0;
        auto next_field = [&]() {
            std::size_t comma = line.find(',', pos);
            std::string field = line.substr(pos, comma == std::string::npos ? comma : comma - pos);
            pos = comma == std::string::npos ? line.size() : comma + 1;
            return field;
        };
        for (int a = 0; a < grid.dim; ++a) idx[static_cast<std::size_t>(a)] = std::stoi(next_field());
        const double re = std::stod(next_field());
        const double im = std::stod(next_field());
        f.values[detail::encode_index(grid, idx)] = cplx{re, im};
        ++count;
    }
    if (count != grid.size())
        throw std::runtime_error("read_grid_csv: expected " + std::to_string(grid.size()) +
                                 " rows, got " + std::to_string(count));
    return f;
}

inline void write_grid_binary(const GridFunction& f, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_grid_binary: cannot open " + path);
    out << f.grid.dim << " " << f.grid.points << " " << detail::fmt_double(f.grid.radius) << "\n";
    for (const cplx& v : f.values) {
        const double re = v.real(), im = v.imag();
        out.write(reinterpret_cast<const char*>(&re), sizeof(double));
        out.write(reinterpret_cast<const char*>(&im), sizeof(double));
    }
}

inline GridFunction read_grid_binary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("read_grid_binary: cannot open " + path);
    std::string header;
    if (!std::getline(in, header)) throw std::runtime_error("read_grid_binary: missing header");
    int dim = 0, points = 0;
    double radius = 0.0;
    if (std::sscanf(header.c_str(), "%d %d %lf", &dim, &points, &radius) != 3)
        throw std::runtime_error("read_grid_binary: malformed header '" + header + "'");
    const SpatialGrid grid = make_grid(dim, radius, points);
    GridFunction f = GridFunction::zero(grid);
    for (cplx& v : f.values) {
        double re = 0.0, im = 0.0;
        in.read(reinterpret_cast<char*>(&re), sizeof(double));
        in.read(reinterpret_cast<char*>(&im), sizeof(double));
        if (!in) throw std::runtime_error("read_grid_binary: truncated data block");
        v = cplx{re, im};
    }
    return f;
}

} // namespace fracspec
