#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <utility>

namespace qsl {

using Complex = std::complex<double>;

inline constexpr Complex kI{0.0, 1.0};

/// Complex 2-vector.
struct Vec2 {
    Complex x{0.0, 0.0};
    Complex y{0.0, 0.0};

    Complex& operator[](int i) { return i == 0 ? x : y; }
    const Complex& operator[](int i) const { return i == 0 ? x : y; }

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(Complex s) const { return {x * s, y * s}; }
    Vec2& operator+=(const Vec2& o) {
        x += o.x;
        y += o.y;
        return *this;
    }

    double max_abs() const { return std::max(std::abs(x), std::abs(y)); }
    bool finite() const {
        return std::isfinite(x.real()) && std::isfinite(x.imag()) && std::isfinite(y.real()) &&
               std::isfinite(y.imag());
    }
};

inline Vec2 operator*(Complex s, const Vec2& v) { return v * s; }
inline Vec2 operator*(double s, const Vec2& v) { return v * Complex(s, 0.0); }

/// Complex 2x2 matrix, row-major.
struct Mat2 {
    Complex a{0.0, 0.0}, b{0.0, 0.0}; // row 0
    Complex c{0.0, 0.0}, d{0.0, 0.0}; // row 1

    static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
    static Mat2 zero() { return {}; }
    static Mat2 diag(Complex p, Complex q) { return {p, 0.0, 0.0, q}; }

    Complex& at(int i, int j) { return i == 0 ? (j == 0 ? a : b) : (j == 0 ? c : d); }
    const Complex& at(int i, int j) const { return i == 0 ? (j == 0 ? a : b) : (j == 0 ? c : d); }

    Mat2 operator+(const Mat2& o) const { return {a + o.a, b + o.b, c + o.c, d + o.d}; }
    Mat2 operator-(const Mat2& o) const { return {a - o.a, b - o.b, c - o.c, d - o.d}; }
    Mat2 operator*(Complex s) const { return {a * s, b * s, c * s, d * s}; }
    Mat2 operator*(const Mat2& o) const {
        return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
    }
    Vec2 operator*(const Vec2& v) const { return {a * v.x + b * v.y, c * v.x + d * v.y}; }

    Complex trace() const { return a + d; }
    Complex det() const { return a * d - b * c; }
    Mat2 adjugate() const { return {d, -b, -c, a}; }
    Mat2 conj_transpose() const {
        return {std::conj(a), std::conj(c), std::conj(b), std::conj(d)};
    }
    Mat2 conj() const { return {std::conj(a), std::conj(b), std::conj(c), std::conj(d)}; }

    double max_abs() const {
        return std::max(std::max(std::abs(a), std::abs(b)), std::max(std::abs(c), std::abs(d)));
    }
    bool finite() const {
        auto ok = [](Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); };
        return ok(a) && ok(b) && ok(c) && ok(d);
    }
};

inline Mat2 operator*(Complex s, const Mat2& m) { return m * s; }
inline Mat2 operator*(double s, const Mat2& m) { return m * Complex(s, 0.0); }

/// Singular values (largest, smallest) via the eigenvalues of M*M.
inline std::pair<double, double> singular_values(const Mat2& m) {
    const Mat2 h = m.conj_transpose() * m; // Hermitian, non-negative
    const double t = 0.5 * h.trace().real();
    const double dt = std::abs(h.det());
    double disc = t * t - dt;
    if (disc < 0.0) disc = 0.0;
    const double r = std::sqrt(disc);
    const double hi = std::max(t + r, 0.0);
    const double lo = std::max(t - r, 0.0);
    return {std::sqrt(hi), std::sqrt(lo)};
}

/// Spectral (operator) norm.
inline double spectral_norm(const Mat2& m) { return singular_values(m).first; }

/// Inverse via adjugate; caller guards against singular input.
inline Mat2 inverse(const Mat2& m) {
    const Complex dt = m.det();
    return m.adjugate() * (1.0 / dt);
}

/// sinh(z)/z, stable near z = 0.
inline Complex sinhc(Complex z) {
    if (std::abs(z) < 1e-4) {
        const Complex z2 = z * z;
        return 1.0 + z2 / 6.0 * (1.0 + z2 / 20.0);
    }
    return std::sinh(z) / z;
}

/// Matrix exponential from the closed form for 2x2: split off the trace,
/// then exp(N) = cosh(mu) I + sinhc(mu) N with mu^2 = -det(N) for traceless N.
inline Mat2 exp2(const Mat2& m) {
    const Complex half_tr = 0.5 * m.trace();
    const Mat2 n = m - Mat2::diag(half_tr, half_tr);
    const Complex mu = std::sqrt(-n.det());
    const Complex ch = std::cosh(mu);
    const Mat2 e = Mat2::diag(ch, ch) + sinhc(mu) * n;
    return std::exp(half_tr) * e;
}

/// Singular values of the stacked 2x4 matrix [left | right] via eigenvalues
/// of the 2x2 Gram matrix M M*.
inline std::pair<double, double> stacked_singular_values(const Mat2& left, const Mat2& right) {
    const Mat2 g = left * left.conj_transpose() + right * right.conj_transpose();
    const double t = 0.5 * g.trace().real();
    const double dt = std::abs(g.det());
    double disc = t * t - dt;
    if (disc < 0.0) disc = 0.0;
    const double r = std::sqrt(disc);
    return {std::sqrt(std::max(t + r, 0.0)), std::sqrt(std::max(t - r, 0.0))};
}

} // namespace qsl
