#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "qsl/quadrature.hpp"
#include "qsl/quasi.hpp"
#include "qsl/trajectory.hpp"

namespace qsl {

struct IntegratorConfig {
    double rtol = 1e-10;
    double atol = 1e-12;
    long max_steps = 1000000;
    int singularity_refinement_depth = 40;

    void validate() const {
        if (!(rtol > 0.0 && atol > 0.0)) throw ValidationError("integrator tolerances must be positive");
        if (singularity_refinement_depth < 1)
            throw ValidationError("singularity_refinement_depth must be >= 1");
    }
};

namespace detail {

// Dormand-Prince 5(4) tableau with the quartic continuous extension.
inline constexpr double kC2 = 1.0 / 5, kC3 = 3.0 / 10, kC4 = 4.0 / 5, kC5 = 8.0 / 9;
inline constexpr double kA2[1] = {1.0 / 5};
inline constexpr double kA3[2] = {3.0 / 40, 9.0 / 40};
inline constexpr double kA4[3] = {44.0 / 45, -56.0 / 15, 32.0 / 9};
inline constexpr double kA5[4] = {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729};
inline constexpr double kA6[5] = {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176,
                                  -5103.0 / 18656};
inline constexpr double kB[7] = {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784,
                                 11.0 / 84, 0.0};
inline constexpr double kE[7] = {71.0 / 57600, 0.0, -71.0 / 16695, 71.0 / 1920,
                                 -17253.0 / 339200, 22.0 / 525, -1.0 / 40};
// dense-output coefficients: u(th) = w + h * sum_j th^(j+1) * sum_i P[i][j] k_i
inline constexpr double kP[7][4] = {
    {1.0, -2.8535800653862835, 3.0717434641059005, -1.1270175653862835},
    {0.0, 0.0, 0.0, 0.0},
    {0.0, 4.023133379230305, -6.249321565289, 2.675424484351598},
    {0.0, -3.7324019615885042, 10.068970589843675, -5.685526961588504},
    {0.0, 2.5548038301849423, -6.399112377351017, 3.5219323679207912},
    {0.0, -1.3744241142186024, 3.272657752246729, -1.7672812570757455},
    {0.0, 1.3824689317781436, -3.764937863556287, 2.382468931778144}};

/// One adaptive leg across a smooth cell, in either direction. Stage times
/// that land exactly on a cell boundary are nudged one ulp inward so
/// evaluation stays on this cell's side of a coefficient breakpoint.
template <class RHS>
Vec2 rk_leg(const RHS& rhs, double t0, double t1, Vec2 w, const IntegratorConfig& cfg,
            long& steps, std::vector<Trajectory::Step>& out) {
    const double dir = t1 > t0 ? 1.0 : -1.0;
    const double hi_end = std::max(t0, t1);
    const double lo_end = std::min(t0, t1);
    auto f = [&](double t, const Vec2& v) {
        if (t >= hi_end) t = std::nextafter(hi_end, lo_end);
        if (t <= lo_end) t = std::nextafter(lo_end, hi_end);
        return rhs(t, v);
    };

    double t = t0;
    double h = dir * std::abs(t1 - t0) / 50.0;
    Vec2 k1 = f(t, w);
    while (dir * (t1 - t) > 0.0) {
        bool final_step = false;
        if (std::abs(h) >= std::abs(t1 - t)) {
            h = t1 - t;
            final_step = true;
        }
        if (std::abs(h) < 4e-16 * std::max(1.0, std::abs(t)))
            throw NumericalError("step-size underflow near an integrable singularity");
        if (++steps > cfg.max_steps) throw NumericalError("integrator exceeded max_steps");

        const Vec2 k2 = f(t + kC2 * h, w + h * kA2[0] * k1);
        const Vec2 k3 = f(t + kC3 * h, w + h * (kA3[0] * k1 + kA3[1] * k2));
        const Vec2 k4 = f(t + kC4 * h, w + h * (kA4[0] * k1 + kA4[1] * k2 + kA4[2] * k3));
        const Vec2 k5 =
            f(t + kC5 * h, w + h * (kA5[0] * k1 + kA5[1] * k2 + kA5[2] * k3 + kA5[3] * k4));
        const Vec2 k6 = f(t + h, w + h * (kA6[0] * k1 + kA6[1] * k2 + kA6[2] * k3 +
                                          kA6[3] * k4 + kA6[4] * k5));
        const Vec2 w5 = w + h * (kB[0] * k1 + kB[2] * k3 + kB[3] * k4 + kB[4] * k5 + kB[5] * k6);
        const Vec2 k7 = f(t + h, w5);
        const Vec2 ev = h * (kE[0] * k1 + kE[2] * k3 + kE[3] * k4 + kE[4] * k5 + kE[5] * k6 +
                             kE[6] * k7);
        if (!w5.finite()) throw NumericalError("non-finite state during integration");

        double err = 0.0;
        for (int i = 0; i < 2; ++i) {
            const double sc = cfg.atol + cfg.rtol * std::max(std::abs(w[i]), std::abs(w5[i]));
            const double r = std::abs(ev[i]) / sc;
            err += r * r;
        }
        err = std::sqrt(0.5 * err);

        const double factor = std::clamp(0.9 * std::pow(std::max(err, 1e-16), -0.2), 0.2, 5.0);
        if (err <= 1.0) {
            Trajectory::Step s;
            s.t0 = t;
            s.h = h;
            s.w0 = w;
            const Vec2* k[7] = {&k1, &k2, &k3, &k4, &k5, &k6, &k7};
            for (int j = 0; j < 4; ++j) {
                Vec2 q{};
                for (int i = 0; i < 7; ++i)
                    if (kP[i][j] != 0.0) q += kP[i][j] * (*k[i]);
                s.q[j] = q;
            }
            out.push_back(s);
            t = final_step ? t1 : t + h;
            w = w5;
            k1 = k7;
        }
        h *= factor;
    }
    return w;
}

} // namespace detail

/// Solves the Cauchy problem w' = A w + phi, w(c) = w0 on the full interval
/// of A, integrating to both endpoints when c is interior. Coefficient
/// breakpoints are hard step boundaries. Cells touching an integrable
/// singularity are pre-refined geometrically; the innermost cell is
/// propagated by exp of the exact cell integral of A (the quadrature nodes
/// never hit the singular endpoint).
inline Trajectory solve_cauchy(const SystemMatrixField& A, const std::optional<VectorField>& phi,
                               double c, Vec2 w0, const IntegratorConfig& cfg = {},
                               std::function<Complex(double)> scalar_rhs = nullptr) {
    cfg.validate();
    const Interval iv = A.interval();
    if (!iv.contains(c)) throw ValidationError("initial point must lie in the interval");

    std::vector<double> brk = A.breakpoints();
    if (phi) brk.insert(brk.end(), phi->breakpoints.begin(), phi->breakpoints.end());
    brk.push_back(c);
    const std::vector<double> cells = detail::build_cells(
        iv.a, iv.b, brk, A.singular_points(), cfg.singularity_refinement_depth);

    auto is_singular = [&](double t) {
        for (double s : A.singular_points())
            if (t == s) return true;
        return false;
    };
    auto rhs = [&](double t, const Vec2& w) {
        Vec2 v = A(t) * w;
        if (phi) v += (*phi)(t);
        return v;
    };

    QuadratureConfig cell_quad;
    cell_quad.singular_depth = cfg.singularity_refinement_depth;
    auto magnus_step = [&](double from, double to, const Vec2& w) {
        const double lo = std::min(from, to), hi = std::max(from, to);
        const double sing[] = {is_singular(lo) ? lo : hi};
        Mat2 m = integrate([&](double t) { return A(t); }, lo, hi, {}, sing, cell_quad).value;
        Vec2 drift{};
        if (phi)
            drift = integrate([&](double t) { return (*phi)(t); }, lo, hi, {}, sing, cell_quad).value;
        if (to < from) {
            m = m * Complex(-1.0, 0.0);
            drift = -1.0 * drift;
        }
        Vec2 w1 = exp2(m) * w + drift;
        if (!w1.finite()) throw NumericalError("non-finite state during integration");
        Trajectory::Step s;
        s.t0 = from;
        s.h = to - from;
        s.w0 = w;
        s.q[0] = (1.0 / s.h) * (w1 - w); // linear interpolant across the tiny cell
        return std::pair<Vec2, Trajectory::Step>{w1, s};
    };

    long steps = 0;
    const std::size_t ci =
        static_cast<std::size_t>(std::lower_bound(cells.begin(), cells.end(), c) - cells.begin());

    std::vector<Trajectory::Step> out;
    Vec2 w = w0;
    for (std::size_t i = ci; i + 1 < cells.size(); ++i) {
        const double lo = cells[i], hi = cells[i + 1];
        if (is_singular(lo) || is_singular(hi)) {
            auto [w1, s] = magnus_step(lo, hi, w);
            out.push_back(s);
            w = w1;
        } else {
            w = detail::rk_leg(rhs, lo, hi, w, cfg, steps, out);
        }
    }
    w = w0;
    for (std::size_t i = ci; i > 0; --i) {
        const double hi = cells[i], lo = cells[i - 1];
        if (is_singular(lo) || is_singular(hi)) {
            auto [w1, s] = magnus_step(hi, lo, w);
            out.push_back(s);
            w = w1;
        } else {
            w = detail::rk_leg(rhs, hi, lo, w, cfg, steps, out);
        }
    }

    if (out.empty()) throw NumericalError("integration produced no steps");
    if (!scalar_rhs && !phi) scalar_rhs = [](double) { return Complex{0.0, 0.0}; };
    return Trajectory(std::move(out), A.lambda, std::move(scalar_rhs));
}

/// Scalar resolvent equation l[y] - lambda y = f: phi = (0, -f), and f is
/// recorded on the trajectory for downstream identities.
inline Trajectory solve_cauchy(const SystemMatrixField& A, const MeshedFunction& f, double c,
                               Vec2 w0, const IntegratorConfig& cfg = {}) {
    return solve_cauchy(A, scalar_rhs_to_system(f), c, w0, cfg, f.f);
}

/// Homogeneous problem.
inline Trajectory solve_cauchy(const SystemMatrixField& A, double c, Vec2 w0,
                               const IntegratorConfig& cfg = {}) {
    return solve_cauchy(A, std::nullopt, c, w0, cfg, nullptr);
}

/// Matrix solution W(t; lambda) with W(a) = I, stored column-wise.
class FundamentalMatrix {
public:
    FundamentalMatrix(Trajectory col1, Trajectory col2, Complex lambda, Interval iv)
        : col1_(std::move(col1)), col2_(std::move(col2)), lambda_(lambda), iv_(iv),
          at_b_(eval(iv.b)) {}

    Mat2 eval(double t) const {
        const Vec2 u = col1_.eval(t);
        const Vec2 v = col2_.eval(t);
        return Mat2{u.x, v.x, u.y, v.y};
    }
    Mat2 operator()(double t) const { return eval(t); }

    const Mat2& at_b() const { return at_b_; }
    Complex lambda() const { return lambda_; }
    const Interval& interval() const { return iv_; }
    const Trajectory& column(int i) const { return i == 0 ? col1_ : col2_; }

private:
    Trajectory col1_, col2_;
    Complex lambda_;
    Interval iv_;
    Mat2 at_b_;
};

inline FundamentalMatrix fundamental_matrix(const SystemMatrixField& A,
                                            const IntegratorConfig& cfg = {}) {
    const Interval iv = A.interval();
    Trajectory c1 = solve_cauchy(A, iv.a, Vec2{{1.0, 0.0}, {0.0, 0.0}}, cfg);
    Trajectory c2 = solve_cauchy(A, iv.a, Vec2{{0.0, 0.0}, {1.0, 0.0}}, cfg);
    return FundamentalMatrix(std::move(c1), std::move(c2), A.lambda, iv);
}

/// Sup over a uniform grid of the entrywise max-modulus difference.
inline double fundamental_matrix_distance(const FundamentalMatrix& we,
                                          const FundamentalMatrix& w0, int grid_size) {
    if (!we.interval().same_as(w0.interval()) || we.lambda() != w0.lambda())
        throw ValidationError("fundamental matrices must share interval and lambda");
    if (grid_size < 2) throw ValidationError("grid size must be at least 2");
    const Interval iv = we.interval();
    double sup = 0.0;
    for (int i = 0; i < grid_size; ++i) {
        const double t = iv.a + iv.length() * i / (grid_size - 1);
        sup = std::max(sup, (we.eval(t) - w0.eval(t)).max_abs());
    }
    return sup;
}

} // namespace qsl
