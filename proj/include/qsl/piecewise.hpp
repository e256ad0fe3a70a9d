#pragma once

#include <algorithm>
#include <cmath>
#include <variant>
#include <vector>

#include "qsl/complex2.hpp"
#include "qsl/errors.hpp"

namespace qsl {

/// Closed interval [a, b] with a < b.
struct Interval {
    double a = 0.0;
    double b = 1.0;

    double length() const { return b - a; }
    bool contains(double t) const { return t >= a && t <= b; }

    void validate() const {
        if (!(std::isfinite(a) && std::isfinite(b)))
            throw ValidationError("interval endpoints must be finite");
        if (!(a < b)) throw ValidationError("interval is empty: requires a < b");
    }
    bool same_as(const Interval& o, double tol = 1e-12) const {
        const double s = 1.0 + std::abs(a) + std::abs(b);
        return std::abs(a - o.a) <= tol * s && std::abs(b - o.b) <= tol * s;
    }
};

struct ConstantRule {
    Complex value{0.0, 0.0};
};

/// sum_k coeffs[k] * (t - lo)^k, in local coordinates of the segment.
struct PolynomialRule {
    std::vector<Complex> coeffs;
};

/// scale * |t - anchor|^exponent; the anchor may not lie inside the open
/// segment, so the base never changes sign. exponent > -1 keeps it in L1.
struct ScaledPowerRule {
    Complex scale{1.0, 0.0};
    double anchor = 0.0;
    double exponent = 0.0;
};

/// 0 before the ramp, height after; linear on [center - width/2, center + width/2].
struct MollifiedStepRule {
    double center = 0.0;
    Complex height{1.0, 0.0};
    double width = 0.0;
};

using SegmentRule = std::variant<ConstantRule, PolynomialRule, ScaledPowerRule, MollifiedStepRule>;

struct Segment {
    double lo = 0.0;
    double hi = 1.0;
    SegmentRule rule;
};

namespace detail {

inline Complex eval_rule(const SegmentRule& rule, double lo, double t) {
    return std::visit(
        [&](const auto& r) -> Complex {
            using R = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<R, ConstantRule>) {
                return r.value;
            } else if constexpr (std::is_same_v<R, PolynomialRule>) {
                const double u = t - lo;
                Complex acc{0.0, 0.0};
                for (auto it = r.coeffs.rbegin(); it != r.coeffs.rend(); ++it) acc = acc * u + *it;
                return acc;
            } else if constexpr (std::is_same_v<R, ScaledPowerRule>) {
                const double u = std::abs(t - r.anchor);
                return r.scale * std::pow(u, r.exponent);
            } else {
                const double left = r.center - 0.5 * r.width;
                if (t <= left) return {0.0, 0.0};
                if (t >= r.center + 0.5 * r.width) return r.height;
                return r.height * ((t - left) / r.width);
            }
        },
        rule);
}

inline bool rule_is_real(const SegmentRule& rule) {
    return std::visit(
        [](const auto& r) -> bool {
            using R = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<R, ConstantRule>) {
                return r.value.imag() == 0.0;
            } else if constexpr (std::is_same_v<R, PolynomialRule>) {
                return std::all_of(r.coeffs.begin(), r.coeffs.end(),
                                   [](Complex c) { return c.imag() == 0.0; });
            } else if constexpr (std::is_same_v<R, ScaledPowerRule>) {
                return r.scale.imag() == 0.0;
            } else {
                return r.height.imag() == 0.0;
            }
        },
        rule);
}

inline SegmentRule rule_conjugated(const SegmentRule& rule) {
    return std::visit(
        [](const auto& r) -> SegmentRule {
            using R = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<R, ConstantRule>) {
                return ConstantRule{std::conj(r.value)};
            } else if constexpr (std::is_same_v<R, PolynomialRule>) {
                PolynomialRule out = r;
                for (auto& c : out.coeffs) c = std::conj(c);
                return out;
            } else if constexpr (std::is_same_v<R, ScaledPowerRule>) {
                return ScaledPowerRule{std::conj(r.scale), r.anchor, r.exponent};
            } else {
                return MollifiedStepRule{r.center, std::conj(r.height), r.width};
            }
        },
        rule);
}

} // namespace detail

/// Complex-valued function on [a, b] assembled from analytic segment rules.
/// Evaluation at interior breakpoints takes the right limit; the value at b
/// is the left limit.
class PiecewiseFunction {
public:
    PiecewiseFunction(Interval iv, std::vector<Segment> segments) : iv_(iv) {
        iv_.validate();
        if (segments.empty()) throw ValidationError("piecewise function needs at least one segment");
        std::sort(segments.begin(), segments.end(),
                  [](const Segment& x, const Segment& y) { return x.lo < y.lo; });
        const double tol = 1e-12 * (1.0 + std::abs(iv_.a) + std::abs(iv_.b));
        if (std::abs(segments.front().lo - iv_.a) > tol || std::abs(segments.back().hi - iv_.b) > tol)
            throw ValidationError("segments do not cover the interval");
        nodes_.push_back(iv_.a);
        for (std::size_t i = 0; i < segments.size(); ++i) {
            const Segment& s = segments[i];
            if (!(s.lo < s.hi)) throw ValidationError("segment has non-positive length");
            if (i + 1 < segments.size() && std::abs(s.hi - segments[i + 1].lo) > tol)
                throw ValidationError("segments leave a gap or overlap");
            validate_rule(s);
            nodes_.push_back(i + 1 < segments.size() ? segments[i + 1].lo : iv_.b);
            rules_.push_back(s.rule);
        }
        nodes_.front() = iv_.a;
        nodes_.back() = iv_.b;
        build_breakpoints();
    }

    static PiecewiseFunction constant(Complex v, Interval iv) {
        return PiecewiseFunction(iv, {Segment{iv.a, iv.b, ConstantRule{v}}});
    }

    /// Two constant pieces: `before` on [a, t0), `after` on [t0, b].
    static PiecewiseFunction step(Interval iv, double t0, Complex before, Complex after) {
        if (!(t0 > iv.a && t0 < iv.b)) throw ValidationError("step point must be interior");
        return PiecewiseFunction(iv, {Segment{iv.a, t0, ConstantRule{before}},
                                      Segment{t0, iv.b, ConstantRule{after}}});
    }

    Complex operator()(double t) const {
        t = std::clamp(t, iv_.a, iv_.b);
        std::size_t i = segment_index(t);
        return detail::eval_rule(rules_[i], nodes_[i], t);
    }

    const Interval& interval() const { return iv_; }
    double lower() const { return iv_.a; }
    double upper() const { return iv_.b; }

    /// Segment boundaries plus ramp kink points, sorted, including a and b.
    const std::vector<double>& breakpoints() const { return breakpoints_; }

    /// Anchors of scaled-power rules (potential singular points of ratios).
    const std::vector<double>& power_anchors() const { return anchors_; }

    std::size_t segment_count() const { return rules_.size(); }
    const std::vector<double>& nodes() const { return nodes_; }
    const SegmentRule& rule(std::size_t i) const { return rules_[i]; }

    bool is_real() const {
        return std::all_of(rules_.begin(), rules_.end(), detail::rule_is_real);
    }

    PiecewiseFunction conjugated() const {
        PiecewiseFunction out = *this;
        for (auto& r : out.rules_) r = detail::rule_conjugated(r);
        return out;
    }

    /// Multiplies every segment value by a constant factor.
    PiecewiseFunction scaled(Complex factor) const {
        PiecewiseFunction out = *this;
        for (auto& r : out.rules_) {
            if (auto* k = std::get_if<ConstantRule>(&r)) {
                k->value *= factor;
            } else if (auto* p = std::get_if<PolynomialRule>(&r)) {
                for (auto& c : p->coeffs) c *= factor;
            } else if (auto* sp = std::get_if<ScaledPowerRule>(&r)) {
                sp->scale *= factor;
            } else {
                std::get<MollifiedStepRule>(r).height *= factor;
            }
        }
        return out;
    }

    /// Adds a constant to every segment. Only constant and polynomial rules
    /// support this representation.
    PiecewiseFunction shifted(Complex c) const {
        PiecewiseFunction out = *this;
        for (auto& r : out.rules_) {
            if (auto* k = std::get_if<ConstantRule>(&r)) {
                k->value += c;
            } else if (auto* p = std::get_if<PolynomialRule>(&r)) {
                if (p->coeffs.empty()) p->coeffs.push_back({0.0, 0.0});
                p->coeffs[0] += c;
            } else {
                throw ValidationError("shift is only defined for constant and polynomial rules");
            }
        }
        return out;
    }

    /// Jump list (location, increment) for a piecewise-constant function.
    std::vector<std::pair<double, Complex>> jumps() const {
        std::vector<std::pair<double, Complex>> out;
        for (std::size_t i = 0; i < rules_.size(); ++i) {
            if (!std::holds_alternative<ConstantRule>(rules_[i]))
                throw ValidationError("jump extraction requires a piecewise-constant function");
            if (i == 0) continue;
            const Complex prev = std::get<ConstantRule>(rules_[i - 1]).value;
            const Complex cur = std::get<ConstantRule>(rules_[i]).value;
            if (cur != prev) out.emplace_back(nodes_[i], cur - prev);
        }
        return out;
    }

    bool operator==(const PiecewiseFunction& o) const {
        if (!(iv_.a == o.iv_.a && iv_.b == o.iv_.b) || nodes_ != o.nodes_) return false;
        for (std::size_t i = 0; i < rules_.size(); ++i)
            if (!rule_equal(rules_[i], o.rules_[i])) return false;
        return true;
    }

private:
    std::size_t segment_index(double t) const {
        if (t >= nodes_.back()) return rules_.size() - 1;
        auto it = std::upper_bound(nodes_.begin(), nodes_.end(), t);
        std::size_t i = static_cast<std::size_t>(it - nodes_.begin());
        return i == 0 ? 0 : i - 1;
    }

    void validate_rule(const Segment& s) {
        if (const auto* sp = std::get_if<ScaledPowerRule>(&s.rule)) {
            if (!(sp->exponent > -1.0))
                throw ValidationError("scaled-power rule is not integrable: exponent <= -1");
            if (sp->anchor > s.lo && sp->anchor < s.hi)
                throw ValidationError("scaled-power anchor must not lie inside the open segment");
        } else if (const auto* ms = std::get_if<MollifiedStepRule>(&s.rule)) {
            if (!(ms->width > 0.0)) throw ValidationError("mollified-step width must be positive");
            if (ms->center - 0.5 * ms->width < s.lo - 1e-12 ||
                ms->center + 0.5 * ms->width > s.hi + 1e-12)
                throw ValidationError("mollified-step ramp must lie inside its segment");
        }
    }

    void build_breakpoints() {
        breakpoints_ = nodes_;
        for (std::size_t i = 0; i < rules_.size(); ++i) {
            if (const auto* ms = std::get_if<MollifiedStepRule>(&rules_[i])) {
                breakpoints_.push_back(ms->center - 0.5 * ms->width);
                breakpoints_.push_back(ms->center + 0.5 * ms->width);
            } else if (const auto* sp = std::get_if<ScaledPowerRule>(&rules_[i])) {
                if (sp->exponent != 0.0 && iv_.contains(sp->anchor)) anchors_.push_back(sp->anchor);
            }
        }
        std::sort(breakpoints_.begin(), breakpoints_.end());
        breakpoints_.erase(std::unique(breakpoints_.begin(), breakpoints_.end()), breakpoints_.end());
        std::sort(anchors_.begin(), anchors_.end());
        anchors_.erase(std::unique(anchors_.begin(), anchors_.end()), anchors_.end());
    }

    static bool rule_equal(const SegmentRule& x, const SegmentRule& y) {
        if (x.index() != y.index()) return false;
        if (const auto* a = std::get_if<ConstantRule>(&x))
            return a->value == std::get<ConstantRule>(y).value;
        if (const auto* a = std::get_if<PolynomialRule>(&x))
            return a->coeffs == std::get<PolynomialRule>(y).coeffs;
        if (const auto* a = std::get_if<ScaledPowerRule>(&x)) {
            const auto& b = std::get<ScaledPowerRule>(y);
            return a->scale == b.scale && a->anchor == b.anchor && a->exponent == b.exponent;
        }
        const auto& a = std::get<MollifiedStepRule>(x);
        const auto& b = std::get<MollifiedStepRule>(y);
        return a.center == b.center && a.height == b.height && a.width == b.width;
    }

    Interval iv_;
    std::vector<double> nodes_;
    std::vector<SegmentRule> rules_;
    std::vector<double> breakpoints_;
    std::vector<double> anchors_;
};

} // namespace qsl
