#pragma once

#include <functional>

#include "qsl/coefficients.hpp"
#include "qsl/complex2.hpp"
#include "qsl/quadrature.hpp"
#include "qsl/trajectory.hpp"

namespace qsl {

/// First quasi-derivative D1y = p y' - Q y.
inline Complex quasi_derivative_1(Complex p_val, Complex q_val, Complex y, Complex yprime) {
    return p_val * yprime - q_val * y;
}

/// The trace-free system matrix A_lambda(t) = [[Q/p, 1/p], [-Q^2/p - lambda, -Q/p]].
struct SystemMatrixField {
    RatioSet ratios;
    Complex lambda;

    Mat2 operator()(double t) const {
        const Complex r1 = ratios.r1_at(t);
        const Complex r2 = ratios.r2_at(t);
        const Complex r3 = ratios.r3_at(t);
        return Mat2{r2, r1, -r3 - lambda, -r2};
    }

    const Interval& interval() const { return ratios.interval(); }
    const std::vector<double>& breakpoints() const { return ratios.mesh(); }
    const std::vector<double>& singular_points() const { return ratios.singular_points(); }
};

inline SystemMatrixField system_matrix(const RatioSet& r, Complex lambda) {
    return SystemMatrixField{r, lambda};
}

/// Inhomogeneity of the reduced system.
struct VectorField {
    std::function<Vec2(double)> eval;
    std::vector<double> breakpoints;

    Vec2 operator()(double t) const { return eval(t); }
};

/// Scalar right-hand side f maps to phi = (0, -f).
inline VectorField scalar_rhs_to_system(const MeshedFunction& f) {
    auto fn = f.f;
    return VectorField{[fn](double t) { return Vec2{{0.0, 0.0}, -fn(t)}; }, f.breakpoints};
}

/// Defect of the Lagrange identity for two trajectories of the same system:
/// integral of (D2y conj(z) - y conj(D2z)) minus the boundary bracket
/// (-y conj(D1z) + D1y conj(z)) evaluated between the endpoints.
/// Along a trajectory of the resolvent equation, D2y = -(lambda y + f).
inline Complex lagrange_defect(const Trajectory& y, const Trajectory& z, const Coefficients& c,
                               Complex lambda) {
    if (!c.is_real())
        throw ValidationError("Lagrange identity requires real-valued coefficients");
    const Interval iv = c.interval();
    const double slack = 1e-9 * (1.0 + iv.length());
    if (std::abs(y.front_t() - z.front_t()) > slack || std::abs(y.back_t() - z.back_t()) > slack ||
        std::abs(y.front_t() - iv.a) > slack || std::abs(y.back_t() - iv.b) > slack)
        throw ValidationError("trajectories must cover the same interval as the coefficients");
    if (!y.has_scalar_rhs() || !z.has_scalar_rhs())
        throw ValidationError("Lagrange defect needs trajectories with a known scalar right-hand side");

    auto d2 = [lambda](const Trajectory& traj, double t) {
        return -(lambda * traj.eval(t).x + traj.scalar_rhs()(t));
    };

    // Integrate on the union of both step meshes; the integrand is a low-degree
    // polynomial of the dense output on every cell.
    std::vector<double> cells = y.step_boundaries();
    cells.insert(cells.end(), z.step_boundaries().begin(), z.step_boundaries().end());
    std::sort(cells.begin(), cells.end());
    cells.erase(std::unique(cells.begin(), cells.end()), cells.end());

    const Complex integral = composite_gl10(
        [&](double t) {
            const Complex yv = y.eval(t).x;
            const Complex zv = z.eval(t).x;
            return d2(y, t) * std::conj(zv) - yv * std::conj(d2(z, t));
        },
        cells);

    auto bracket = [&](double t, const Vec2& wy, const Vec2& wz) {
        (void)t;
        return -wy.x * std::conj(wz.y) + wy.y * std::conj(wz.x);
    };
    const Complex boundary = bracket(iv.b, y.back_state(), z.back_state()) -
                             bracket(iv.a, y.front_state(), z.front_state());
    return integral - boundary;
}

} // namespace qsl
