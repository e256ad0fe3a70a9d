#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <span>
#include <vector>

#include "qsl/complex2.hpp"
#include "qsl/errors.hpp"
#include "qsl/piecewise.hpp"

namespace qsl {

struct QuadratureConfig {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    int max_intervals = 10000;
    int singular_depth = 40; // geometric pre-refinement levels toward a singular point

    void validate() const {
        if (!(abs_tol > 0.0 && rel_tol > 0.0)) throw ValidationError("quadrature tolerances must be positive");
        if (singular_depth < 1) throw ValidationError("singular_depth must be >= 1");
    }
};

/// A scalar function bundled with the mesh information quadrature needs:
/// where its analytic pieces end and where it may blow up (integrably).
struct MeshedFunction {
    std::function<Complex(double)> f;
    std::vector<double> breakpoints;
    std::vector<double> singular_points;

    MeshedFunction() = default;
    MeshedFunction(std::function<Complex(double)> fn, std::vector<double> brk,
                   std::vector<double> sing = {})
        : f(std::move(fn)), breakpoints(std::move(brk)), singular_points(std::move(sing)) {}
    MeshedFunction(const PiecewiseFunction& pf)
        : f([pf](double t) { return pf(t); }),
          breakpoints(pf.breakpoints()),
          singular_points(pf.power_anchors()) {}

    Complex operator()(double t) const { return f(t); }
};

namespace detail {

// Gauss-Kronrod 7-15 abscissae and weights (positive half).
inline constexpr double kGK15X[8] = {
    0.9914553711208126, 0.9491079123427585, 0.8648644233597691, 0.7415311855993944,
    0.5860872354676911, 0.4058451513773972, 0.2077849550078985, 0.0};
inline constexpr double kGK15WK[8] = {
    0.0229353220105292, 0.0630920926299786, 0.1047900103222502, 0.1406532597155259,
    0.1690047266392679, 0.1903505780647854, 0.2044329400752989, 0.2094821410847278};
inline constexpr double kGK15WG[4] = {
    0.1294849661688697, 0.2797053914892767, 0.3818300505051189, 0.4179591836734694};

// Gauss-Legendre 10-point rule (positive half).
inline constexpr double kGL10X[5] = {
    0.1488743389816312, 0.4333953941292472, 0.6794095682990244, 0.8650633666889845,
    0.9739065285171717};
inline constexpr double kGL10W[5] = {
    0.2955242247147529, 0.2692667193099963, 0.2190863625159820, 0.1494513491505806,
    0.0666713443086881};

template <class T>
double value_abs(const T& v) {
    return std::abs(v);
}
inline double value_abs(const Vec2& v) { return v.max_abs(); }
inline double value_abs(const Mat2& m) { return m.max_abs(); }

template <class F>
auto gk15(F&& f, double lo, double hi, double& err) {
    using T = std::decay_t<decltype(f(lo))>;
    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    T resk = kGK15WK[7] * f(mid);
    T resg = kGK15WG[3] * f(mid);
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kGK15X[j];
        const T sum = f(mid - dx) + f(mid + dx);
        resk = resk + kGK15WK[j] * sum;
        if (j % 2 == 1) resg = resg + kGK15WG[j / 2] * sum;
    }
    resk = resk * half;
    resg = resg * half;
    err = value_abs(resk - resg);
    return resk;
}

inline std::vector<double> build_cells(double a, double b, std::span<const double> breakpoints,
                                       std::span<const double> singular, int depth) {
    std::vector<double> pts{a, b};
    for (double t : breakpoints)
        if (t > a && t < b) pts.push_back(t);
    for (double t : singular)
        if (t >= a && t <= b) pts.push_back(t);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

    auto is_singular = [&](double t) {
        for (double s : singular)
            if (t == s) return true;
        return false;
    };

    // Geometric refinement (ratio 1/2) toward cell ends that sit on a singular point.
    std::vector<double> out;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double lo = pts[i], hi = pts[i + 1];
        out.push_back(lo);
        const double len = hi - lo;
        if (is_singular(lo)) {
            for (int k = depth; k >= 2; --k) {
                const double t = lo + len * std::ldexp(1.0, -k);
                if (t > lo && t < hi) out.push_back(t);
            }
            out.push_back(lo + 0.5 * len);
        }
        if (is_singular(hi)) {
            if (!is_singular(lo)) out.push_back(lo + 0.5 * len);
            for (int k = 2; k <= depth; ++k) {
                const double t = hi - len * std::ldexp(1.0, -k);
                if (t > lo && t < hi) out.push_back(t);
            }
        }
    }
    out.push_back(b);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

} // namespace detail

template <class T>
struct QuadResult {
    T value{};
    double error_estimate = 0.0;
    int intervals = 0;
};

/// Adaptive Gauss-Kronrod integration over [a, b]. Initial cells split at the
/// given breakpoints; cells touching a singular point are pre-refined
/// geometrically so the endpoint blow-up is resolved before adaptivity starts.
template <class F>
auto integrate(F&& f, double a, double b, std::span<const double> breakpoints = {},
               std::span<const double> singular = {}, const QuadratureConfig& cfg = {})
    -> QuadResult<std::decay_t<decltype(f(a))>> {
    using T = std::decay_t<decltype(f(a))>;
    cfg.validate();
    if (!(a < b)) throw ValidationError("integration interval is empty");

    struct Cell {
        double lo, hi, err;
        T val;
        bool operator<(const Cell& o) const { return err < o.err; }
    };

    const std::vector<double> nodes =
        detail::build_cells(a, b, breakpoints, singular, cfg.singular_depth);

    std::priority_queue<Cell> heap;
    T total{};
    double heap_err = 0.0;
    int count = 0;
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        double e;
        T v = detail::gk15(f, nodes[i], nodes[i + 1], e);
        total = total + v;
        heap_err += e;
        heap.push(Cell{nodes[i], nodes[i + 1], e, v});
        ++count;
    }

    // Cells narrower than ~4096 ulp of their location cannot be bisected
    // without evaluation points rounding onto the cell ends; their estimate
    // is frozen instead (the representability floor near a non-zero singular
    // anchor). Near zero the floor is relative, so refinement can continue
    // into the denormal range.
    auto splittable = [](const Cell& c) {
        const double floor_w =
            4096.0 * std::numeric_limits<double>::epsilon() *
            std::max({std::abs(c.lo), std::abs(c.hi), 1e-300});
        const double mid = 0.5 * (c.lo + c.hi);
        return (c.hi - c.lo) > floor_w && mid > c.lo && mid < c.hi;
    };

    double frozen_err = 0.0;
    auto target = [&] { return std::max(cfg.abs_tol, cfg.rel_tol * detail::value_abs(total)); };
    while (heap_err > target() && !heap.empty() && count < cfg.max_intervals) {
        Cell c = heap.top();
        heap.pop();
        heap_err -= c.err;
        if (!splittable(c)) {
            frozen_err += c.err;
            continue;
        }
        const double mid = 0.5 * (c.lo + c.hi);
        double e1, e2;
        T v1 = detail::gk15(f, c.lo, mid, e1);
        T v2 = detail::gk15(f, mid, c.hi, e2);
        total = total - c.val + v1 + v2;
        heap_err += e1 + e2;
        heap.push(Cell{c.lo, mid, e1, v1});
        heap.push(Cell{mid, c.hi, e2, v2});
        ++count;
    }

    if (!std::isfinite(detail::value_abs(total)) || !std::isfinite(heap_err))
        throw NumericalError("quadrature diverged: non-finite integrand values encountered");
    if (heap_err > 100.0 * std::max(cfg.abs_tol, cfg.rel_tol * detail::value_abs(total)))
        throw NumericalError("quadrature did not converge within budget (error estimate " +
                             std::to_string(heap_err + frozen_err) + ")");
    return {total, heap_err + frozen_err, count};
}

/// L1 distance of two functions on [a, b] by adaptive quadrature of |f - g|.
inline double l1_distance(const MeshedFunction& f, const MeshedFunction& g, const Interval& iv,
                          const QuadratureConfig& cfg = {}) {
    std::vector<double> brk = f.breakpoints;
    brk.insert(brk.end(), g.breakpoints.begin(), g.breakpoints.end());
    std::vector<double> sing = f.singular_points;
    sing.insert(sing.end(), g.singular_points.begin(), g.singular_points.end());
    auto integrand = [&](double t) { return std::abs(f.f(t) - g.f(t)); };
    return integrate(integrand, iv.a, iv.b, brk, sing, cfg).value;
}

inline double l1_norm(const MeshedFunction& f, const Interval& iv, const QuadratureConfig& cfg = {}) {
    auto integrand = [&](double t) { return std::abs(f.f(t)); };
    return integrate(integrand, iv.a, iv.b, f.breakpoints, f.singular_points, cfg).value;
}

/// Composite fixed-order Gauss-Legendre rule over given cell boundaries.
/// Exact for smooth integrands per cell; used where the mesh is known.
template <class F>
auto composite_gl10(F&& f, std::span<const double> cells) {
    using T = std::decay_t<decltype(f(cells[0]))>;
    T total{};
    for (std::size_t i = 0; i + 1 < cells.size(); ++i) {
        const double mid = 0.5 * (cells[i] + cells[i + 1]);
        const double half = 0.5 * (cells[i + 1] - cells[i]);
        if (half <= 0.0) continue;
        T acc{};
        for (int j = 0; j < 5; ++j) {
            const double dx = half * detail::kGL10X[j];
            acc = acc + detail::kGL10W[j] * (f(mid - dx) + f(mid + dx));
        }
        total = total + half * acc;
    }
    return total;
}

/// Cell list for composite rules: breakpoints plus a uniform bound on cell width.
inline std::vector<double> composite_cells(double a, double b, std::span<const double> breakpoints,
                                           double max_width) {
    std::vector<double> pts{a, b};
    for (double t : breakpoints)
        if (t > a && t < b) pts.push_back(t);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    std::vector<double> out;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double lo = pts[i], hi = pts[i + 1];
        const int n = std::max(1, static_cast<int>(std::ceil((hi - lo) / max_width)));
        for (int k = 0; k < n; ++k) out.push_back(lo + (hi - lo) * k / n);
    }
    out.push_back(b);
    return out;
}

/// L2 norm over [a, b] via composite Gauss-Legendre on a refined mesh.
inline double l2_norm(const std::function<Complex(double)>& f, const Interval& iv,
                      std::span<const double> breakpoints = {}) {
    const auto cells = composite_cells(iv.a, iv.b, breakpoints, iv.length() / 16.0);
    const double v = composite_gl10([&](double t) { return std::norm(f(t)); }, cells);
    return std::sqrt(std::max(v, 0.0));
}

} // namespace qsl
