#pragma once

// Shared oracles and generators for the test suites. Everything here is
// independent of the solver paths it is used to check: closed forms are
// evaluated directly from matched trigonometric formulas.

#include <random>

#include "qsl/qsl.hpp"

namespace qsl_test {

using namespace qsl;

inline Complex csqrt(Complex z) { return std::sqrt(z); }

/// cos(k t) and sin(k t)/k (the latter -> t as k -> 0), stable for small |k|.
inline Complex cos_kt(Complex k, double t) { return std::cos(k * t); }
inline Complex sinc_kt(Complex k, double t) {
    if (std::abs(k) * std::abs(t) < 1e-8) {
        const Complex z = k * t;
        return t * (1.0 - z * z / 6.0);
    }
    return std::sin(k * t) / k;
}

/// Matched closed-form solution for p == 1, Q = h * step(t - t0) on (0, L):
/// classical y' jumps by h y(t0) at t0 while D1y = y' - Q y stays continuous.
struct DeltaOracle {
    double h = 1.0;
    double t0 = 0.5;
    Complex lambda{0.0, 0.0};

    /// State (y, D1y) at t from the initial state w0 = (y(0), D1y(0)).
    Vec2 state(const Vec2& w0, double t) const {
        const Complex k = csqrt(lambda);
        const Complex y0 = w0.x;
        const Complex v0 = w0.y; // y'(0) = D1y(0) since Q(0) = 0
        auto piece = [&](Complex ya, Complex va, double dt) {
            const Complex y = ya * cos_kt(k, dt) + va * sinc_kt(k, dt);
            const Complex yp = -lambda * ya * sinc_kt(k, dt) + va * cos_kt(k, dt);
            return std::pair<Complex, Complex>{y, yp};
        };
        if (t <= t0) {
            auto [y, yp] = piece(y0, v0, t);
            return {y, yp}; // Q = 0 here, D1y = y'
        }
        auto [yt0, ypm] = piece(y0, v0, t0);
        const Complex ypp = ypm + h * yt0; // delta jump of the classical derivative
        auto [y, yp] = piece(yt0, ypp, t - t0);
        return {y, yp - h * y}; // D1y = y' - h y right of the jump
    }

    Coefficients coefficients(double length = 1.0) const {
        const Interval iv{0.0, length};
        return Coefficients(PiecewiseFunction::constant({1.0, 0.0}, iv),
                            PiecewiseFunction::step(iv, t0, {0.0, 0.0}, {h, 0.0}));
    }
};

/// Bisection roots of tan(k/2) = -2k/c on (0, kmax): the symmetric eigenvalue
/// branch of the Dirichlet delta problem at t0 = 1/2 on (0, 1).
inline std::vector<double> symmetric_delta_roots(double c, double kmax) {
    auto g = [&](double k) { return std::tan(0.5 * k) + 2.0 * k / c; };
    std::vector<double> roots;
    // tan(k/2) sweeps (-inf, 0) on each k-interval ((2m-1) pi, 2m pi)
    for (int m = 1;; ++m) {
        double lo = (2 * m - 1) * M_PI + 1e-9;
        double hi = 2 * m * M_PI - 1e-12;
        if (lo > kmax) break;
        if (g(lo) > 0.0 || g(hi) < 0.0) continue;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            (g(mid) < 0.0 ? lo : hi) = mid;
        }
        const double k = 0.5 * (lo + hi);
        if (k <= kmax) roots.push_back(k);
    }
    return roots;
}

inline std::mt19937 rng(unsigned seed) { return std::mt19937(seed); }

inline Complex random_unit_complex(std::mt19937& g) {
    std::uniform_real_distribution<double> ang(0.0, 2.0 * M_PI);
    const double a = ang(g);
    return {std::cos(a), std::sin(a)};
}

inline Mat2 random_unitary(std::mt19937& g) {
    std::normal_distribution<double> n(0.0, 1.0);
    // Gram-Schmidt on a complex Gaussian matrix, then random column phases
    Vec2 u{Complex(n(g), n(g)), Complex(n(g), n(g))};
    const double nu = std::sqrt(std::norm(u.x) + std::norm(u.y));
    u = (1.0 / nu) * u;
    Vec2 v{Complex(n(g), n(g)), Complex(n(g), n(g))};
    const Complex proj = std::conj(u.x) * v.x + std::conj(u.y) * v.y;
    v = v - proj * u;
    const double nv = std::sqrt(std::norm(v.x) + std::norm(v.y));
    v = (1.0 / nv) * v;
    const Complex ph1 = random_unit_complex(g), ph2 = random_unit_complex(g);
    return Mat2{u.x * ph1, v.x * ph2, u.y * ph1, v.y * ph2};
}

inline Mat2 random_contraction(std::mt19937& g) {
    std::uniform_real_distribution<double> s(0.0, 1.0);
    const Mat2 u = random_unitary(g);
    const Mat2 v = random_unitary(g);
    return u * Mat2::diag(s(g), s(g)) * v.conj_transpose();
}

/// Random piecewise-constant function with values in [lo, hi].
inline PiecewiseFunction random_steps(std::mt19937& g, const Interval& iv, int pieces, double lo,
                                      double hi) {
    std::uniform_real_distribution<double> val(lo, hi);
    std::uniform_real_distribution<double> pos(iv.a + 0.05 * iv.length(),
                                               iv.b - 0.05 * iv.length());
    std::vector<double> cuts{iv.a, iv.b};
    for (int i = 1; i < pieces; ++i) cuts.push_back(pos(g));
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    std::vector<Segment> segs;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
        segs.push_back({cuts[i], cuts[i + 1], ConstantRule{{val(g), 0.0}}});
    return PiecewiseFunction(iv, std::move(segs));
}

} // namespace qsl_test
