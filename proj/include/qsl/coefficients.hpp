#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "qsl/piecewise.hpp"
#include "qsl/quadrature.hpp"

namespace qsl {

/// The three integrability norms required of a coefficient pair.
struct L1Report {
    double inv_p = 0.0;    // ||1/p||_1
    double q_over_p = 0.0; // ||Q/p||_1
    double q2_over_p = 0.0; // ||Q^2/p||_1
};

/// Validated coefficient pair (p, Q) on a shared interval. The distributional
/// potential q = Q' is never materialized; everything downstream works
/// through Q and the ratios 1/p, Q/p, Q^2/p.
class Coefficients {
public:
    Coefficients(PiecewiseFunction p, PiecewiseFunction Q, const QuadratureConfig& quad = {})
        : p_(std::move(p)), Q_(std::move(Q)) {
        if (!p_.interval().same_as(Q_.interval()))
            throw ValidationError("p and Q must share the same interval");
        iv_ = p_.interval();
        mesh_ = p_.breakpoints();
        mesh_.insert(mesh_.end(), Q_.breakpoints().begin(), Q_.breakpoints().end());
        std::sort(mesh_.begin(), mesh_.end());
        mesh_.erase(std::unique(mesh_.begin(), mesh_.end()), mesh_.end());
        singular_ = p_.power_anchors();
        singular_.insert(singular_.end(), Q_.power_anchors().begin(), Q_.power_anchors().end());
        std::sort(singular_.begin(), singular_.end());
        singular_.erase(std::unique(singular_.begin(), singular_.end()), singular_.end());
        validate(quad);
    }

    const PiecewiseFunction& p() const { return p_; }
    const PiecewiseFunction& Q() const { return Q_; }
    const Interval& interval() const { return iv_; }
    const L1Report& l1_report() const { return report_; }

    /// Union of the breakpoints of p and Q; the hard mesh for the ODE core.
    const std::vector<double>& mesh() const { return mesh_; }
    const std::vector<double>& singular_points() const { return singular_; }

    bool is_real() const { return p_.is_real() && Q_.is_real(); }

    /// Reconstructed classical derivative y' = (D1y + Q y) / p.
    Complex classical_derivative(double t, Complex y, Complex d1y) const {
        return (d1y + Q_(t) * y) / p_(t);
    }

private:
    void validate(const QuadratureConfig& quad) {
        auto norm_of = [&](auto&& fn, const char* what) {
            auto g = [&](double t) { return std::abs(fn(t)); };
            try {
                return integrate(g, iv_.a, iv_.b, mesh_, singular_, quad).value;
            } catch (const NumericalError& e) {
                throw ValidationError(std::string(what) + " is not integrable: " + e.what());
            }
        };
        report_.inv_p = norm_of([&](double t) { return 1.0 / p_(t); }, "1/p");
        report_.q_over_p = norm_of([&](double t) { return Q_(t) / p_(t); }, "Q/p");
        report_.q2_over_p = norm_of([&](double t) { Complex q = Q_(t); return q * q / p_(t); },
                                    "Q^2/p");
    }

    PiecewiseFunction p_;
    PiecewiseFunction Q_;
    Interval iv_;
    L1Report report_;
    std::vector<double> mesh_;
    std::vector<double> singular_;
};

inline Coefficients build_coefficients(PiecewiseFunction p, PiecewiseFunction Q,
                                       const QuadratureConfig& quad = {}) {
    return Coefficients(std::move(p), std::move(Q), quad);
}

/// Coefficients of the formally adjoint expression: conjugated p and Q.
inline Coefficients adjoint_coefficients(const Coefficients& c) {
    return Coefficients(c.p().conjugated(), c.Q().conjugated());
}

/// The ratio functions 1/p, Q/p, Q^2/p on the shared mesh. Immutable and
/// cheap to copy; entries of the system matrix are built from these.
class RatioSet {
public:
    explicit RatioSet(const Coefficients& c)
        : impl_(std::make_shared<const Coefficients>(c)) {}

    MeshedFunction r1() const {
        auto impl = impl_;
        return {[impl](double t) { return 1.0 / impl->p()(t); }, impl->mesh(), impl->singular_points()};
    }
    MeshedFunction r2() const {
        auto impl = impl_;
        return {[impl](double t) { return impl->Q()(t) / impl->p()(t); }, impl->mesh(),
                impl->singular_points()};
    }
    MeshedFunction r3() const {
        auto impl = impl_;
        return {[impl](double t) {
                    Complex q = impl->Q()(t);
                    return q * q / impl->p()(t);
                },
                impl->mesh(), impl->singular_points()};
    }

    Complex r1_at(double t) const { return 1.0 / impl_->p()(t); }
    Complex r2_at(double t) const { return impl_->Q()(t) / impl_->p()(t); }
    Complex r3_at(double t) const {
        Complex q = impl_->Q()(t);
        return q * q / impl_->p()(t);
    }

    const Interval& interval() const { return impl_->interval(); }
    const std::vector<double>& mesh() const { return impl_->mesh(); }
    const std::vector<double>& singular_points() const { return impl_->singular_points(); }
    const Coefficients& coefficients() const { return *impl_; }

private:
    std::shared_ptr<const Coefficients> impl_;
};

inline RatioSet ratios(const Coefficients& c) { return RatioSet(c); }

/// Family {eps -> Coefficients}, eps strictly decreasing to the mandatory 0 member.
struct CoefficientFamily {
    std::vector<double> epsilons; // strictly decreasing, last entry 0
    std::function<Coefficients(double)> generator;

    CoefficientFamily(std::vector<double> eps, std::function<Coefficients(double)> gen)
        : epsilons(std::move(eps)), generator(std::move(gen)) {
        if (epsilons.empty() || epsilons.back() != 0.0)
            throw ValidationError("coefficient family must contain the eps = 0 member");
        for (std::size_t i = 0; i + 1 < epsilons.size(); ++i)
            if (!(epsilons[i] > epsilons[i + 1]))
                throw ValidationError("family eps values must be strictly decreasing");
        if (!(epsilons.front() > 0.0) && epsilons.size() > 1)
            throw ValidationError("family eps values must be positive before 0");
    }

    Coefficients member(double eps) const { return generator(eps); }
};

/// Replaces every jump of a piecewise-constant Q0 by a centered linear ramp
/// of total width eps. The L1 distance to Q0 is |jump| * eps / 4 per jump.
inline PiecewiseFunction mollify_steps(const PiecewiseFunction& Q0, double eps) {
    if (eps == 0.0) return Q0;
    if (eps < 0.0) throw ValidationError("mollification width must be non-negative");
    const auto jump_list = Q0.jumps();
    const Interval iv = Q0.interval();
    double prev_edge = iv.a;
    std::vector<Segment> segments;
    Complex value = Q0(iv.a);
    for (const auto& [t0, delta] : jump_list) {
        const double lo = t0 - 0.5 * eps;
        const double hi = t0 + 0.5 * eps;
        if (lo < prev_edge || hi > iv.b)
            throw ValidationError("ramp width exceeds the distance between adjacent breakpoints");
        if (lo > prev_edge) segments.push_back({prev_edge, lo, ConstantRule{value}});
        segments.push_back({lo, hi, PolynomialRule{{value, delta / eps}}});
        value += delta;
        prev_edge = hi;
    }
    if (prev_edge < iv.b) segments.push_back({prev_edge, iv.b, ConstantRule{value}});
    return PiecewiseFunction(iv, std::move(segments));
}

/// Family of mollifications of a piecewise-constant Q0 with fixed p
/// (defaults to p == 1 on the interval of Q0).
inline CoefficientFamily mollified_family(const PiecewiseFunction& Q0, std::vector<double> widths,
                                          std::optional<PiecewiseFunction> p = std::nullopt) {
    if (widths.empty()) throw ValidationError("mollified family needs at least one width");
    for (std::size_t i = 0; i < widths.size(); ++i) {
        if (!(widths[i] > 0.0)) throw ValidationError("mollification widths must be positive");
        if (i + 1 < widths.size() && !(widths[i] > widths[i + 1]))
            throw ValidationError("mollification widths must be strictly decreasing");
    }
    mollify_steps(Q0, widths.front()); // feasibility check for the widest ramp
    PiecewiseFunction pfun = p ? *p : PiecewiseFunction::constant({1.0, 0.0}, Q0.interval());
    if (!pfun.interval().same_as(Q0.interval()))
        throw ValidationError("p and Q0 must share the same interval");
    std::vector<double> eps = std::move(widths);
    eps.push_back(0.0);
    return CoefficientFamily(std::move(eps), [Q0, pfun](double e) {
        return Coefficients(pfun, mollify_steps(Q0, e));
    });
}

} // namespace qsl
