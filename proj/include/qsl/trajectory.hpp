#pragma once

#include <algorithm>
#include <functional>
#include <vector>

#include "qsl/complex2.hpp"
#include "qsl/errors.hpp"

namespace qsl {

/// State of the reduced first-order system at a point: w = (y, D1y).
struct QuasiState {
    double t = 0.0;
    Vec2 w;
};

/// Piecewise-polynomial solution of w' = A w + phi built from the
/// integrator's continuous extension: each accepted step stores a quartic
/// interpolant u(th) = w0 + h (th q0 + th^2 q1 + th^3 q2 + th^4 q3) with
/// th = (t - t0)/h, matching the solver order between step points. Steps may
/// be oriented either way (h < 0 for legs integrated leftward).
class Trajectory {
public:
    struct Step {
        double t0 = 0.0;
        double h = 0.0;
        Vec2 w0;
        Vec2 q[4];

        double lo() const { return std::min(t0, t0 + h); }
        double hi() const { return std::max(t0, t0 + h); }
    };

    Trajectory(std::vector<Step> steps, Complex lambda,
               std::function<Complex(double)> scalar_rhs = nullptr)
        : steps_(std::move(steps)), lambda_(lambda), rhs_(std::move(scalar_rhs)) {
        if (steps_.empty()) throw ValidationError("trajectory needs at least one step");
        std::sort(steps_.begin(), steps_.end(),
                  [](const Step& x, const Step& y) { return x.lo() < y.lo(); });
        for (std::size_t i = 0; i + 1 < steps_.size(); ++i)
            if (steps_[i].hi() != steps_[i + 1].lo())
                throw ValidationError("trajectory steps must tile the interval");
        boundaries_.reserve(steps_.size() + 1);
        for (const Step& s : steps_) boundaries_.push_back(s.lo());
        boundaries_.push_back(steps_.back().hi());
    }

    double front_t() const { return boundaries_.front(); }
    double back_t() const { return boundaries_.back(); }

    /// Step boundaries, ascending; a natural quadrature mesh for functionals
    /// of the trajectory.
    const std::vector<double>& step_boundaries() const { return boundaries_; }

    Complex lambda() const { return lambda_; }

    /// Scalar right-hand side f of l[y] - lambda y = f, when known.
    const std::function<Complex(double)>& scalar_rhs() const { return rhs_; }
    bool has_scalar_rhs() const { return static_cast<bool>(rhs_); }

    Vec2 front_state() const { return eval(front_t()); }
    Vec2 back_state() const { return eval(back_t()); }

    Vec2 eval(double t) const {
        const Step& s = locate(t);
        const double th = (t - s.t0) / s.h;
        const Vec2 p = s.q[0] + th * (s.q[1] + th * (s.q[2] + th * s.q[3]));
        return s.w0 + (s.h * th) * p;
    }

    /// One-sided time derivative; at an interior step boundary this is the
    /// right limit, at the right endpoint the left limit.
    Vec2 derivative(double t) const {
        const Step& s = locate(t);
        const double th = (t - s.t0) / s.h;
        return s.q[0] + th * (2.0 * s.q[1] + th * (3.0 * s.q[2] + th * 4.0 * s.q[3]));
    }

private:
    const Step& locate(double t) const {
        const double lo = boundaries_.front(), hi = boundaries_.back();
        const double slack = 1e-9 * (1.0 + hi - lo);
        if (t < lo - slack || t > hi + slack)
            throw ValidationError("trajectory evaluated outside its interval");
        t = std::clamp(t, lo, hi);
        std::size_t l = 0, r = steps_.size() - 1;
        while (l < r) { // last step whose left edge is <= t
            const std::size_t m = (l + r + 1) / 2;
            if (steps_[m].lo() <= t)
                l = m;
            else
                r = m - 1;
        }
        return steps_[l];
    }

    std::vector<Step> steps_;
    std::vector<double> boundaries_;
    Complex lambda_;
    std::function<Complex(double)> rhs_;
};

} // namespace qsl
